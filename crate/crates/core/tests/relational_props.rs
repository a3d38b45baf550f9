use cyclochron_core::cycles::ClockEnsemble;
use cyclochron_core::relational_time::{
    classify, decode_time, decode_time_exact, distinguishability_gap, fingerprint_at,
    fingerprint_at_exact, recurrence_time, EnsembleKind,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn float_345() -> ClockEnsemble {
    ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap()
}

fn exact_345() -> ClockEnsemble {
    ClockEnsemble::from_exact_periods(&[rat(3, 1), rat(4, 1), rat(5, 1)]).unwrap()
}

/// Instants in `[0, end)` on a `step` grid whose fingerprint lies within `tol` of `target`.
fn scan_hits(e: &ClockEnsemble, t_target: f64, end: f64, step: f64, tol: f64) -> Vec<f64> {
    let target = fingerprint_at(e, t_target);
    let n = (end / step) as usize;
    (0..n)
        .map(|j| j as f64 * step)
        .filter(|&t| fingerprint_at(e, t).distance(&target) <= tol)
        .collect()
}

#[test]
fn crt_decode_of_seven() {
    let e = exact_345();
    let f = fingerprint_at_exact(&e, &rat(7, 1)).unwrap();
    assert_eq!(
        decode_time_exact(&e, &f, (0.0, 60.0)).unwrap(),
        vec![rat(7, 1)]
    );
    assert_eq!(decode_time(&e, &f, (0.0, 60.0), 1e-9).unwrap(), vec![7.0]);
    let float = decode_time(
        &float_345(),
        &fingerprint_at(&float_345(), 7.0),
        (0.0, 60.0),
        1e-9,
    )
    .unwrap();
    assert_eq!(float.len(), 1);
    assert!((float[0] - 7.0).abs() < 1e-9);
}

#[test]
fn crt_decode_agrees_with_scan() {
    let hits = scan_hits(&float_345(), 7.0, 60.0, 1e-3, 1e-6);
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|t| (t - 7.0).abs() < 2e-3), "{hits:?}");
}

#[test]
fn round_trip_one_hundred_instants() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let e = float_345();
    let x = exact_345();
    for _ in 0..100 {
        let t: f64 = rng.random_range(0.0..60.0);
        let got = decode_time(&e, &fingerprint_at(&e, t), (0.0, 60.0), 1e-9).unwrap();
        assert_eq!(got.len(), 1, "t = {t}: {got:?}");
        assert!((got[0] - t).abs() <= 1e-9, "t = {t}: {got:?}");

        let q = rat(rng.random_range(0..60_000), 1000);
        let f = fingerprint_at_exact(&x, &q).unwrap();
        assert_eq!(decode_time_exact(&x, &f, (0.0, 60.0)).unwrap(), vec![q]);
    }
}

#[test]
fn window_wider_than_period_aliases() {
    let e = float_345();
    let got = decode_time(&e, &fingerprint_at(&e, 7.0), (0.0, 180.0), 1e-9).unwrap();
    assert_eq!(got.len(), 3);
    for (g, want) in got.iter().zip([7.0, 67.0, 127.0]) {
        assert!((g - want).abs() < 1e-9);
    }
}

#[test]
fn recurrence_of_commensurate_ensemble() {
    assert_eq!(recurrence_time(&float_345(), 1e-6).unwrap(), 60.0);
    assert_eq!(recurrence_time(&exact_345(), 1e-6).unwrap(), 60.0);
}

/// First scan instant past the initial neighbourhood where every phase is back within `eps`.
fn scan_recurrence(periods: &[f64], eps: f64, step: f64, end: f64) -> Option<f64> {
    let mut left_start = false;
    let n = (end / step) as usize;
    for j in 1..n {
        let t = j as f64 * step;
        let d = periods
            .iter()
            .map(|p| {
                let x = (t / p).fract();
                x.min(1.0 - x)
            })
            .fold(0.0, f64::max);
        if d > eps {
            left_start = true;
        } else if left_start {
            return Some(t);
        }
    }
    None
}

#[test]
fn recurrence_of_root_two_matches_scan() {
    let periods = [1.0, std::f64::consts::SQRT_2];
    let e = ClockEnsemble::from_periods(&periods).unwrap();
    let r = recurrence_time(&e, 0.01).unwrap();
    let step = 1e-4;
    let scan = scan_recurrence(&periods, 0.01, step, 100.0).unwrap();
    assert!((r - scan).abs() <= step, "analytic {r}, scan {scan}");
    assert!((r - 41.0).abs() < 0.01);
}

#[test]
fn root_two_is_ergodic_and_345_periodic() {
    let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
    assert_eq!(classify(&e, 1e-12).unwrap().kind, EnsembleKind::Ergodic);
    let c = classify(&float_345(), 1e-12).unwrap();
    assert_eq!(c.kind, EnsembleKind::Periodic);
    assert_eq!(c.system_period, Some(60.0));
}

#[test]
fn gap_matches_recurrence_inside_window() {
    let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
    let r = recurrence_time(&e, 0.01).unwrap();
    assert_eq!(distinguishability_gap(&e, 0.01, 100.0).unwrap(), r);
    assert_eq!(distinguishability_gap(&e, 0.01, 10.0).unwrap(), 10.0);
}

#[test]
fn ergodic_orbit_fills_the_torus() {
    let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
    let eps = 0.05;
    let target = [0.3, 0.6];
    let n = 400_000;
    let step = 0.2357;
    let inside = (0..n)
        .filter(|&j| {
            let f = fingerprint_at(&e, j as f64 * step);
            f.phases()
                .iter()
                .zip(target)
                .all(|(p, q)| cyclochron_core::numerics::torus_distance(*p, q) <= eps)
        })
        .count();
    let density = inside as f64 / n as f64;
    let expected = (2.0 * eps) * (2.0 * eps);
    assert!(
        density > expected / 2.0 && density < expected * 2.0,
        "density {density}"
    );
}

fn small_periods() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(2i64..=9, 2..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn global_flip_with_conjugation_preserves_decode(periods in small_periods(), num in 0i64..1000) {
        let exact: Vec<BigRational> = periods.iter().map(|&p| rat(p, 1)).collect();
        let e = ClockEnsemble::from_exact_periods(&exact).unwrap();
        let lcm = periods.iter().fold(1i64, |a, &b| num_integer::lcm(a, b));
        let t = rat(num * lcm, 1000);
        let f = fingerprint_at_exact(&e, &t).unwrap();
        let w = (0.0, lcm as f64);
        let plain = decode_time_exact(&e, &f, w).unwrap();
        let flipped = decode_time_exact(&e.inverted(), &f.conjugate(), w).unwrap();
        prop_assert_eq!(&plain, &flipped);
        prop_assert!(plain.contains(&t));

        let fe = ClockEnsemble::from_periods(&periods.iter().map(|&p| p as f64).collect::<Vec<_>>()).unwrap();
        let tf = num as f64 * lcm as f64 / 1000.0;
        let ff = fingerprint_at(&fe, tf);
        let a = decode_time(&fe, &ff, w, 1e-9).unwrap();
        let b = decode_time(&fe.inverted(), &ff.conjugate(), w, 1e-9).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * lcm as f64);
        }
    }
}

#[test]
fn single_flip_breaks_decoding_of_witness() {
    let e = exact_345();
    let f = fingerprint_at_exact(&e, &rat(7, 1)).unwrap();
    let one = decode_time_exact(&e.with_inverted(0), &f, (0.0, 60.0)).unwrap();
    assert_ne!(one, vec![rat(7, 1)]);
}
