use mclab_core::excursion::{
    aldous_limic_sequence, decompose_V, eta_thinned_W, extract_excursions, reflect, sample_V,
    sample_W, shift_identity_check, sigma_sample, sum_sq_excursions, EtaMode, ExcursionList,
    SampledPath, SequenceMode, Sigma,
};
use mclab_core::rng::replicate_seed;
use mclab_core::stats::EstimateWithCI;
use mclab_core::{MassVector, ParamTriple};

fn v(x: &[f64]) -> MassVector {
    MassVector::ord(x.to_vec()).unwrap()
}

fn params(kappa: f64, t: f64, c: &[f64]) -> ParamTriple {
    ParamTriple::new(kappa, t, v(c)).unwrap()
}

fn path(values: &[f64]) -> SampledPath {
    SampledPath::from_values(1.0, values.to_vec()).unwrap()
}

#[test]
fn v_without_rates_is_zero() {
    let p = sample_V(&MassVector::empty(), 2.0, 0.01, 3).unwrap();
    assert!(p.values().iter().all(|&x| x == 0.0));
}

#[test]
fn v_starts_at_zero_and_matches_its_mean() {
    let c1 = 0.8;
    let s = 1.0;
    let reps = 20_000u64;
    let samples: Vec<f64> = (0..reps)
        .map(|r| {
            let path = sample_V(&v(&[c1]), s, 0.01, replicate_seed(4, r)).unwrap();
            assert_eq!(path.values()[0], 0.0);
            *path.values().last().unwrap()
        })
        .collect();
    let est = EstimateWithCI::from_samples(&samples).unwrap();
    let exact = c1 * (1.0 - (-c1 * s).exp()) - c1 * c1 * s;
    assert!(est.covers(exact, 4.0), "{est:?} vs {exact}");
}

#[test]
fn w_drift_only_and_brownian_variance() {
    let w = sample_W(&params(0.0, 1.0, &[]), 1.0, 0.125, 0).unwrap();
    for (k, &x) in w.values().iter().enumerate() {
        assert!((x - w.time(k)).abs() < 1e-12);
    }
    let reps = 20_000u64;
    let ends: Vec<f64> = (0..reps)
        .map(|r| {
            *sample_W(&params(1.0, 0.0, &[]), 2.0, 0.01, replicate_seed(8, r))
                .unwrap()
                .values()
                .last()
                .unwrap()
        })
        .collect();
    // W(s) = BM(s) - s^2/2 here, so centre at the drift
    let sq: Vec<f64> = ends.iter().map(|x| (x + 2.0) * (x + 2.0)).collect();
    let var = EstimateWithCI::from_samples(&sq).unwrap();
    assert!(var.covers(2.0, 4.0), "{var:?}");
    assert_eq!(
        sample_W(&params(1.0, 0.3, &[0.5, 0.2]), 1.0, 0.01, 1)
            .unwrap()
            .values()[0],
        0.0
    );
}

#[test]
fn reflection_examples() {
    let up = reflect(&path(&[0.0, 0.5, 0.5, 2.0]));
    assert_eq!(up.values(), &[0.0, 0.5, 0.5, 2.0]);
    let down = reflect(&path(&[0.0, -1.0, -2.0, -3.0]));
    assert!(down.values().iter().all(|&x| x == 0.0));
    assert_eq!(
        reflect(&path(&[0.0, -1.0, -2.0, -1.0, 0.0])).values(),
        &[0.0, 0.0, 0.0, 1.0, 2.0]
    );
}

#[test]
fn excursion_extraction_examples() {
    let none = extract_excursions(&path(&[0.0; 5]), 0.0).unwrap();
    assert!(none.excursions.is_empty() && !none.is_censored());
    let e = extract_excursions(&path(&[0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0]), 0.0).unwrap();
    assert_eq!(e.excursions, vec![(0.0, 3.0), (4.0, 6.0)]);
    assert_eq!(e.lengths(), vec![3.0, 2.0]);
    assert_eq!(sum_sq_excursions(&e), 13.0);
    assert_eq!(sum_sq_excursions(&ExcursionList::default()), 0.0);
    let full = extract_excursions(&path(&[0.0, 1.0, 2.0, 3.0]), 0.0).unwrap();
    assert_eq!(sum_sq_excursions(&full), 0.0);
    assert!(full.is_censored());
    assert!(extract_excursions(&path(&[0.0, -1.0]), 0.0).is_err());
}

#[test]
fn sigma_and_shift_identity() {
    let p = params(1.0, 1.0, &[0.6]);
    let mut hits = 0;
    for seed in 0..50 {
        let check = shift_identity_check(&p, 10.0, 1e-3, seed).unwrap();
        assert!(check.passed, "seed {seed}: {check:?}");
        assert_eq!(check.sigma, sigma_sample(&p, 10.0, 1e-3, seed).unwrap());
        hits += usize::from(matches!(check.sigma, Sigma::Hit(_)));
    }
    assert!(hits > 40);
}

#[test]
fn eta_thinning_reductions() {
    let p = params(1.0, 0.5, &[]);
    let eta = eta_thinned_W(&p, 2.0, 0.01, 6, EtaMode::Sample).unwrap();
    let w = sample_W(&params(1.0, -0.5, &[]), 2.0, 0.01, 6).unwrap();
    assert_eq!(eta.values(), w.values());

    let p = params(1.0, 0.5, &[1.2, 0.4]);
    let forced = eta_thinned_W(&p, 2.0, 0.01, 9, EtaMode::ForceOne).unwrap();
    let w = sample_W(&params(1.0, -0.5, &[1.2, 0.4]), 2.0, 0.01, 9).unwrap();
    assert_eq!(forced.values(), w.values());
}

#[test]
fn approximating_sequences() {
    let x = aldous_limic_sequence(1.0, &MassVector::empty(), 8, 0, SequenceMode::Brownian).unwrap();
    assert_eq!(x.len(), 8);
    assert!(x.iter().all(|&m| (m - 0.25).abs() < 1e-12));
    let one =
        aldous_limic_sequence(8.0, &MassVector::empty(), 1, 0, SequenceMode::Brownian).unwrap();
    assert!((one[0] - 0.5).abs() < 1e-12);
    let c = aldous_limic_sequence(1.0, &v(&[1.0]), 8, 1, SequenceMode::Brownian).unwrap();
    assert_eq!(c.len(), 9);
    assert!((c[0] - 0.5).abs() < 1e-12);
    assert!(c[1..].iter().all(|&m| (m - 0.25).abs() < 1e-12));
}

#[test]
fn decomposition_examples() {
    let zero = decompose_V(
        &sample_V(&MassVector::empty(), 1.0, 0.1, 0).unwrap(),
        &MassVector::empty(),
    )
    .unwrap();
    for part in [&zero.martingale, &zero.compensator, &zero.bracket] {
        assert!(part.iter().all(|&x| x == 0.0));
    }

    let c = v(&[1.3]);
    let h = 0.01;
    let mut checked = 0;
    for seed in 0..20 {
        let path = sample_V(&c, 3.0, h, seed).unwrap();
        let d = decompose_V(&path, &c).unwrap();
        let Some(jump) = path.jumps().unwrap().first().copied() else {
            continue;
        };
        let k = (jump.time / h).ceil() as usize + 1;
        if k >= path.values().len() {
            continue;
        }
        let s = path.time(k);
        assert!((d.compensator[k] - 1.3f64.powi(2) * (s - jump.time)).abs() < 1e-9);
        assert!((d.bracket[k] - 1.3f64.powi(3) * jump.time).abs() < 1e-9);
        checked += 1;
    }
    assert!(checked > 5);
}
