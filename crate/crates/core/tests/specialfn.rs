mod common;

use common::{c, rel_err, C};
use polylog_rh::specialfn::{
    li, li1, li21n, li_derivative, li_series, zeta_value, SeriesConfig,
};
use polylog_rh::{in_domain, log_power_term, principal_log, DomainId, PolylogError};
use proptest::prelude::*;

fn domain_point() -> impl Strategy<Value = C> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(x, y)| c(x, y))
        .prop_filter("off the cut", |z| in_domain(*z, DomainId::CutPlaneD) && z.im.abs() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_conjugation(x in -5.0..5.0f64, y in 1e-6..5.0f64) {
        let z = c(x, y);
        let a = principal_log(z.conj()).unwrap();
        let b = principal_log(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
    }

    #[test]
    fn principal_branch_is_contained(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let z = c(x, y);
        if in_domain(z, DomainId::CutPlaneDPrime) {
            prop_assert!(principal_log(z).unwrap().im.abs() < std::f64::consts::PI);
        }
    }

    #[test]
    fn strip_is_the_intersection(x in -1.0..2.0f64, y in -3.0..3.0f64) {
        let z = c(x, y);
        prop_assert_eq!(
            in_domain(z, DomainId::Strip),
            in_domain(z, DomainId::HalfPlanePlus) && in_domain(z, DomainId::HalfPlaneMinus)
        );
    }

    #[test]
    fn li_conjugation(k in 1usize..=6, z in domain_point()) {
        let a = li(k, z.conj()).unwrap();
        let b = li(k, z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn li21n_conjugation(k in 2usize..=6, w in domain_point()) {
        let a = li21n(k, w.conj()).unwrap();
        let b = li21n(k, w).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn derivative_law(k in 2usize..=6, r in 0.05..0.9f64, theta in -3.1..3.1f64) {
        let z = C::from_polar(r, theta);
        let h = 1e-5;
        let fd = (li(k, z + h).unwrap() - li(k, z - h).unwrap()) / (2.0 * h);
        prop_assert!(rel_err(fd, li_derivative(k, z).unwrap()) <= 1e-8);
    }

    #[test]
    fn series_and_path_agree_on_the_overlap(k in 1usize..=6, r in 0.41..0.5f64, theta in -3.1..3.1f64) {
        let cfg = SeriesConfig::<f64>::default();
        let z = C::from_polar(r, theta);
        let series = li_series(k, z, &cfg).unwrap();
        // force the path strategy with a smaller switch radius
        let small = SeriesConfig { radius_switch: 0.3, ..cfg };
        let path = polylog_rh::specialfn::li_with(k, z, &small).unwrap();
        prop_assert!((series - path).norm() <= 1e-10);
    }
}

#[test]
fn real_monotone_on_unit_interval() {
    for k in 1..=6 {
        let mut prev = 0.0;
        for i in 1..100 {
            let v = li(k, c(i as f64 / 100.0, 0.0)).unwrap();
            assert_eq!(v.im, 0.0);
            assert!(v.re > prev, "k={k} x={}", i as f64 / 100.0);
            prev = v.re;
        }
    }
}

#[test]
fn goldens() {
    let half = c(0.5, 0.0);
    assert!((li(2, half).unwrap().re - 0.582_240_526_465_012_5).abs() <= 1e-12);
    assert!((li(2, c(-1.0, 0.0)).unwrap().re + 0.822_467_033_424_113_2).abs() <= 1e-12);
    assert!((li1(half).unwrap().re - std::f64::consts::LN_2).abs() <= 1e-16);
    assert!((zeta_value::<f64>(2, 6).unwrap() - 1.644_934_066_848_226_4).abs() <= 1e-14);
    assert!((zeta_value::<f64>(3, 6).unwrap() - 1.202_056_903_159_594_3).abs() <= 1e-14);
    assert!((zeta_value::<f64>(50, 6).unwrap() - 1.000_000_000_000_000_9).abs() <= 1e-15);
    // Li_3(1/2) = 7/8 zeta(3) - pi^2/12 log 2 + log^3(2)/6
    let l2 = std::f64::consts::LN_2;
    let pi2 = std::f64::consts::PI.powi(2);
    let li3 = 0.875 * 1.202_056_903_159_594_3 - pi2 / 12.0 * l2 + l2.powi(3) / 6.0;
    assert!((li(3, half).unwrap().re - li3).abs() <= 1e-13);
}

#[test]
fn li21n_at_half_matches_reflection() {
    // zeta(2) - Li_2(1/2) - log(1/2) Li_1(1/2) with log(1/2) Li_1(1/2) = -log^2 2
    let l2 = std::f64::consts::LN_2;
    let expect = 1.644_934_066_848_226_4 - 0.582_240_526_465_012_5 - l2 * l2;
    assert!((li21n(2, c(0.5, 0.0)).unwrap().re - expect).abs() <= 1e-12);
}

#[test]
fn li21n_tends_to_zeta() {
    // the gap at 1 - eps shrinks with eps for every weight
    for k in 2..=6 {
        let z = zeta_value::<f64>(k, 6).unwrap();
        let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&e| (li21n(k, c(1.0 - e, 0.0)).unwrap().re - z).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "k={k} {gaps:?}");
    }
}

#[test]
fn log_power_examples() {
    let e = c(std::f64::consts::E, 0.0);
    assert_eq!(log_power_term(c(1.0, 0.0), 3).unwrap(), c(0.0, 0.0));
    assert!((log_power_term(e, 1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    assert!((log_power_term(e, 2).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    assert!(matches!(log_power_term(c(-1.0, 0.0), 1), Err(PolylogError::Domain(_))));
}

#[test]
fn domain_errors_name_the_domain() {
    let err = li(2, c(2.0, 0.0)).unwrap_err();
    assert!(matches!(err, PolylogError::Domain(_)));
    assert!(err.to_string().contains("on cut of D"), "{err}");
}
