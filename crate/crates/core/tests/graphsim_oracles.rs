use mclab_core::graphsim::{
    exact_connect_prob, exact_disjoint_connect_prob, exact_partition_law, mc_connect_prob,
    sample_components, simulate_coalescent,
};
use mclab_core::rng::replicate_seed;
use mclab_core::MassVector;

fn v(x: &[f64]) -> MassVector {
    MassVector::ord(x.to_vec()).unwrap()
}

fn triangle(t: f64) -> f64 {
    let p = 1.0 - (-t).exp();
    3.0 * p * p - 2.0 * p * p * p
}

#[test]
fn no_edges_at_time_zero() {
    let part = sample_components(&v(&[1.0, 1.0]), 0.0, 7).unwrap();
    assert_eq!(part.num_components(), 2);
    assert_eq!(part.component_masses().masses(), &[1.0, 1.0]);
}

#[test]
fn two_block_merge_frequency() {
    let (a, b, t) = (1.5, 0.8, 0.6);
    let x = v(&[a, b]);
    let reps = 100_000;
    let merged = (0..reps).filter(|&r| {
        sample_components(&x, t, replicate_seed(11, r))
            .unwrap()
            .num_components()
            == 1
    });
    let freq = merged.count() as f64 / reps as f64;
    let p = 1.0 - (-a * b * t).exp();
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    assert!((freq - p).abs() < 4.0 * se, "{freq} vs {p}");
}

#[test]
fn three_unit_blocks_fully_connected() {
    let t = 0.7;
    let x = v(&[1.0; 3]);
    let reps = 100_000;
    let hits = (0..reps).filter(|&r| {
        sample_components(&x, t, replicate_seed(3, r))
            .unwrap()
            .num_components()
            == 1
    });
    let freq = hits.count() as f64 / reps as f64;
    let p = triangle(t);
    assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / reps as f64).sqrt());
}

#[test]
fn single_block_has_no_merges() {
    let traj = simulate_coalescent(&v(&[1.0]), 10.0, 1).unwrap();
    assert!(traj.events.is_empty());
    assert_eq!(traj.final_state.component_masses().masses(), &[1.0]);
}

#[test]
fn two_block_merge_time_is_exponential() {
    let (a, b) = (2.0, 0.5);
    let x = v(&[a, b]);
    let reps = 50_000u64;
    let mean = (0..reps)
        .map(|r| {
            simulate_coalescent(&x, f64::INFINITY, replicate_seed(5, r))
                .unwrap()
                .events[0]
                .time
        })
        .sum::<f64>()
        / reps as f64;
    let expected = 1.0 / (a * b);
    assert!(
        (mean - expected).abs() < 4.0 * expected / (reps as f64).sqrt(),
        "{mean}"
    );
}

#[test]
fn three_blocks_merge_twice_first_at_rate_three() {
    let x = v(&[1.0; 3]);
    let reps = 50_000u64;
    let mut sum = 0.0;
    for r in 0..reps {
        let traj = simulate_coalescent(&x, f64::INFINITY, replicate_seed(9, r)).unwrap();
        assert_eq!(traj.events.len(), 2);
        assert!(traj.events[0].time < traj.events[1].time);
        sum += traj.events[0].time;
    }
    let mean = sum / reps as f64;
    let expected = 1.0 / 3.0;
    assert!(
        (mean - expected).abs() < 4.0 * expected / (reps as f64).sqrt(),
        "{mean}"
    );
}

#[test]
fn exact_connection_closed_forms() {
    for t in [0.0, 0.3, 1.0, 4.0] {
        let p = exact_connect_prob(&v(&[1.0, 1.0]), t, &[0, 1]).unwrap();
        assert!((p - (1.0 - (-t).exp())).abs() < 1e-14);
        let q = exact_connect_prob(&v(&[1.0; 3]), t, &[0, 1, 2]).unwrap();
        assert!((q - triangle(t)).abs() < 1e-14);
    }
    for i in 0..4 {
        assert_eq!(
            exact_connect_prob(&v(&[2.0, 1.0, 0.5, 0.1]), 0.5, &[i]).unwrap(),
            1.0,
            "block {i}"
        );
    }
}

#[test]
fn partition_law_sums_to_one() {
    let law = exact_partition_law(&v(&[4.0, 3.0, 2.0, 1.0]), 0.08).unwrap();
    assert_eq!(law.len(), 15);
    assert!((law.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn enumeration_is_capped() {
    assert!(exact_connect_prob(&v(&[1.0; 8]), 0.1, &[0, 1]).is_err());
}

#[test]
fn disjoint_connections() {
    let x2 = v(&[1.0, 1.0]);
    assert_eq!(
        exact_disjoint_connect_prob(&x2, 1.0, &[(0, 1), (0, 1)]).unwrap(),
        0.0
    );
    let single = exact_disjoint_connect_prob(&x2, 1.0, &[(0, 1)]).unwrap();
    assert!((single - exact_connect_prob(&x2, 1.0, &[0, 1]).unwrap()).abs() < 1e-14);

    let x4 = v(&[1.0; 4]);
    for t in [0.2, 1.0, 3.0] {
        let joint = exact_disjoint_connect_prob(&x4, t, &[(0, 1), (2, 3)]).unwrap();
        let product = exact_connect_prob(&x4, t, &[0, 1]).unwrap()
            * exact_connect_prob(&x4, t, &[2, 3]).unwrap();
        assert!(joint <= product + 1e-12);
        if t == 3.0 {
            assert!(joint < product - 1e-6);
        }
    }
}

#[test]
fn monte_carlo_connection_estimates() {
    let x = v(&[1.0, 1.0]);
    let est = mc_connect_prob(&x, 1.0, &[0, 1], 100_000, 42).unwrap();
    let p = 1.0 - (-1.0f64).exp();
    assert!((p - 0.63212).abs() < 1e-5);
    assert!((est.mean - p).abs() < 4.0 * est.std_error);
    assert_eq!(
        mc_connect_prob(&x, 0.0, &[0, 1], 1000, 1).unwrap().mean,
        0.0
    );
    let one = mc_connect_prob(&x, 1.0, &[1], 1000, 1).unwrap();
    assert_eq!(one.mean, 1.0);
}
