use mclab_core::graphsim::exact_connect_prob;
use mclab_core::moments::{
    bound_Sn, bound_connect, bound_negative_time, bound_npoint, estimate_ESk, estimate_functional,
    generator_closed_odd, generator_closed_product, generator_direct, ConstantsTable, Functional,
    Observable, Sampler,
};
use mclab_core::MassVector;
use num_bigint::BigUint;

fn v(x: &[f64]) -> MassVector {
    MassVector::ord(x.to_vec()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn constants_table() {
    let table = ConstantsTable::new(6).unwrap();
    assert_eq!(table.c(2), Some(&BigUint::from(1u32)));
    assert_eq!(table.c(3), Some(&BigUint::from(6u32)));
    assert_eq!(table.c(4), Some(&BigUint::from(162u32)));
    assert_eq!(table.d(2), Some(&BigUint::from(2u32)));
    assert_eq!(table.d(3), Some(&BigUint::from(10u32)));
}

#[test]
fn pair_bound_examples() {
    let x = v(&[1.0, 1.0]);
    let factor = bound_connect(&x, 0.25).unwrap();
    assert!(close(factor, 0.5, 1e-15));
    let exact = exact_connect_prob(&x, 0.25, &[0, 1]).unwrap();
    assert!(close(exact, 1.0 - (-0.25f64).exp(), 1e-14));
    assert!(exact <= factor);
    assert_eq!(bound_connect(&x, 0.0).unwrap(), 0.0);
    assert_eq!(exact_connect_prob(&x, 0.0, &[0, 1]).unwrap(), 0.0);
    assert!(bound_connect(&x, 0.4999).unwrap() > 1e3);
    assert!(bound_connect(&x, 0.5).is_err());
}

#[test]
fn npoint_bound_examples() {
    let table = ConstantsTable::new(4).unwrap();
    let x = v(&[2.0, 1.0, 0.5]);
    let t = 0.15;
    let two = bound_npoint(&x, t, &[0, 2], &table).unwrap();
    let gap = 1.0 - t * x.s2();
    assert!(close(two, x[0] * x[2] * t / gap, 1e-14));

    let ones = v(&[1.0; 3]);
    let b = bound_npoint(&ones, 0.2, &[0, 1, 2], &table).unwrap();
    assert!(close(b, 6.0 * 0.2f64.powf(1.5) / 0.4f64.powi(3), 1e-14));
    assert!(exact_connect_prob(&ones, 0.2, &[0, 1, 2]).unwrap() <= b);

    let with_zero = v(&[1.0, 0.5, 0.0]);
    assert_eq!(bound_npoint(&with_zero, 0.3, &[0, 2], &table).unwrap(), 0.0);
    assert_eq!(exact_connect_prob(&with_zero, 0.3, &[0, 2]).unwrap(), 0.0);
}

#[test]
fn moment_bound_examples() {
    let table = ConstantsTable::new(4).unwrap();
    assert!(close(
        bound_Sn(&v(&[1.0, 1.0]), 0.25, 2, &table).unwrap(),
        8.0,
        1e-14
    ));
    let x = v(&[1.5, 0.5, 0.25]);
    for n in 2..=4 {
        assert!(x.s_k(n).unwrap() <= bound_Sn(&x, 0.0, n, &table).unwrap());
    }
    let ones = v(&[1.0; 3]);
    let est = estimate_ESk(&ones, 0.1, 3, 10_000, 5).unwrap();
    assert!(est.mean + 3.0 * est.std_error <= bound_Sn(&ones, 0.1, 3, &table).unwrap());
}

#[test]
fn negative_time_bound_examples() {
    let table = ConstantsTable::new(2).unwrap();
    assert!(close(
        bound_negative_time(-1.0, &table).unwrap(),
        2.0,
        1e-15
    ));
    assert!(close(
        bound_negative_time(-2.0, &table).unwrap(),
        1.0,
        1e-15
    ));
    assert!(bound_negative_time(-1e-9, &table).unwrap() > 1e9);
    assert!(bound_negative_time(0.0, &table).is_err());
}

#[test]
fn two_block_moment_closed_forms() {
    let x = v(&[1.0, 1.0]);
    let zero = estimate_ESk(&x, 0.0, 2, 100, 1).unwrap();
    assert_eq!((zero.mean, zero.std_error), (2.0, 0.0));
    let t: f64 = 0.7;
    let q = 1.0 - (-t).exp();
    let s2 = estimate_ESk(&x, t, 2, 50_000, 2).unwrap();
    assert!(s2.covers(2.0 + 2.0 * q, 4.0), "{s2:?}");
    let joint = estimate_functional(
        &x,
        t,
        Functional::Joint { n: 2, m: 3 },
        Sampler::Dynamics,
        50_000,
        3,
    )
    .unwrap();
    assert!(joint.covers(4.0 * (1.0 - q) + 32.0 * q, 4.0), "{joint:?}");
}

#[test]
fn generator_examples() {
    let (a, b) = (1.3, 0.6);
    let g = generator_direct(&[a, b], Observable::PowerSum(2)).unwrap();
    assert!(close(g, 2.0 * a * a * b * b, 1e-14));
    assert!(close(
        generator_direct(&[1.0, 1.0], Observable::PowerSum(2)).unwrap(),
        2.0,
        1e-15
    ));
    assert!(close(
        generator_direct(&[1.0, 1.0], Observable::PowerSum(3)).unwrap(),
        6.0,
        1e-15
    ));
    for g in [
        Observable::PowerSum(2),
        Observable::PowerSum(5),
        Observable::PowerSumProduct { n: 2, m: 3 },
    ] {
        assert_eq!(generator_direct(&[0.7], g).unwrap(), 0.0);
    }
    assert!(close(
        generator_closed_odd(&[1.0, 1.0], 1).unwrap(),
        6.0,
        1e-15
    ));
    assert!(generator_closed_odd(&[1.0], 1).unwrap().abs() < 1e-15);
    let prod = generator_direct(&[1.0, 1.0], Observable::PowerSumProduct { n: 1, m: 2 }).unwrap();
    assert!(close(prod, 12.0, 1e-15));
    assert!(close(
        generator_closed_product(&[1.0, 1.0], 1, 2).unwrap(),
        12.0,
        1e-14
    ));
    assert!(generator_closed_product(&[0.9], 2, 4).unwrap().abs() < 1e-12);
}

#[test]
fn closed_forms_match_direct_sums() {
    let vectors: [&[f64]; 3] = [
        &[0.9, 0.8, 0.55, 0.5, 0.31, 0.3, 0.2, 0.12, 0.05, 0.01],
        &[1.0, 0.5, 0.25, 0.125],
        &[0.7, 0.7, 0.7],
    ];
    for x in vectors {
        for k in 1..=3 {
            let direct = generator_direct(x, Observable::PowerSum(2 * k + 1)).unwrap();
            assert!(close(generator_closed_odd(x, k).unwrap(), direct, 1e-10));
        }
        for n in 1..=2 {
            for m in 2..=4 {
                let direct = generator_direct(x, Observable::PowerSumProduct { n, m }).unwrap();
                assert!(close(
                    generator_closed_product(x, n, m).unwrap(),
                    direct,
                    1e-10
                ));
            }
        }
    }
}
