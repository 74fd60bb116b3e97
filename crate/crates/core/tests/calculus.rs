mod common;

use common::{c, random_spd, random_vec, rng};
use proptest::prelude::*;
use rand::Rng;
use sectorial_core::calculus::*;
use sectorial_core::kernels::FracOrder;
use sectorial_core::operators::OperatorHandle;
use sectorial_core::vector::{dist, norm, rel_dist};
use sectorial_core::{Error, C64};

fn diag(v: &[f64]) -> OperatorHandle {
    OperatorHandle::diagonal(v.iter().map(|&x| c(x)).collect(), 0.0).unwrap()
}

fn order(a: f64) -> FracOrder {
    FracOrder::real(a).unwrap()
}

#[test]
fn resolvent_component_needs_no_nodes() {
    let a = OperatorHandle::dirichlet_laplacian_1d(5).unwrap();
    let x = random_vec(&mut rng(1), 5);
    let (y, stats) = apply_extended_stats(&ExtendedFunction::linear(c(1.0), c(0.0)), &a, &x, &ContourSpec::default()).unwrap();
    assert_eq!(stats.nodes_per_ray, 0);
    assert!(dist(&y, &a.solve_shifted(c(1.0), &x).unwrap()) < 1e-15);
    let id = apply_extended(&ExtendedFunction::linear(c(0.0), c(1.0)), &a, &x, &ContourSpec::default()).unwrap();
    assert_eq!(id, x);
}

#[test]
fn elementary_function_matches_spectral() {
    let a = diag(&[1.0, 4.0]);
    let g = scalar_fn(|l: C64| Ok(l / ((1.0 + l) * (1.0 + l))));
    let x = vec![c(1.0), c(1.0)];
    let y = apply_extended(&ExtendedFunction::elementary(&g), &a, &x, &ContourSpec::default()).unwrap();
    assert!(dist(&y, &[c(0.25), c(4.0 / 25.0)]) < 1e-10);
}

#[test]
fn angle_must_exceed_omega() {
    let a = OperatorHandle::diagonal(vec![C64::new(1.0, 1.0)], 0.8).unwrap();
    let g = scalar_fn(|l: C64| Ok(l / ((1.0 + l) * (1.0 + l))));
    let spec = ContourSpec { phi: Some(0.5), ..ContourSpec::default() };
    let err = apply_extended(&ExtendedFunction::elementary(&g), &a, &[c(1.0)], &spec).unwrap_err();
    assert!(matches!(err, Error::ContourAngle { .. }));
}

#[test]
fn adaptive_refinement_and_fixed_contours() {
    let a = OperatorHandle::dirichlet_laplacian_1d(8).unwrap();
    let x = random_vec(&mut rng(2), 8);
    let g = scalar_fn(|l: C64| Ok(l.sqrt() / ((1.0 + l) * (1.0 + l))));
    let oracle = a.spectral_apply(|l| g.eval(l), &x).unwrap();
    let (y, stats) = apply_extended_stats(&ExtendedFunction::elementary(&g), &a, &x, &ContourSpec::default().adaptive(1e-11)).unwrap();
    assert!(rel_dist(&y, &oracle) < 1e-10);
    assert!(stats.refinements >= 1);
    let fixed = ContourSpec::fixed(1.5, (-20.0, 20.0), 400);
    let y = apply_extended(&ExtendedFunction::elementary(&g), &a, &x, &fixed).unwrap();
    assert!(rel_dist(&y, &oracle) < 1e-9);
}

#[test]
fn frac_power_examples() {
    let x = random_vec(&mut rng(3), 4);
    let id = OperatorHandle::identity(4).unwrap();
    for a in [0.1, 0.3, 0.9] {
        assert!(rel_dist(&frac_power(&id, order(a), &x, &ContourSpec::default()).unwrap(), &x) < 1e-12);
    }
    let d = diag(&[1.0, 4.0]);
    let y = frac_power(&d, order(0.5), &[c(1.0), c(1.0)], &ContourSpec::default()).unwrap();
    assert!(dist(&y, &[c(1.0), c(2.0)]) < 1e-12);
    let mut r = rng(4);
    for _ in 0..3 {
        let lo = r.gen_range(0.01..10.0);
        let a = random_spd(&mut r, 10, lo, 1e4);
        let x = random_vec(&mut r, 10);
        for al in [0.25, 0.5, 0.75] {
            let got = frac_power(&a, order(al), &x, &ContourSpec::default()).unwrap();
            let want = a.spectral_apply(|l| Ok(l.powf(al)), &x).unwrap();
            assert!(rel_dist(&got, &want) <= 1e-8);
        }
    }
}

#[test]
fn sqrt_calculus_examples() {
    let h = scalar_fn(|m: C64| Ok((-m).exp())).with_sector(std::f64::consts::FRAC_PI_2);
    let y = sqrt_calculus_apply(&diag(&[4.0]), &h, &[c(1.0)], &ContourSpec::default()).unwrap();
    assert!((y[0] - c((-2f64).exp())).norm() < 1e-12);

    let a = diag(&[1.0, 4.0]);
    let hh = scalar_fn(|m: C64| Ok(m * m / ((1.0 + m * m) * (1.0 + m * m))));
    let y = sqrt_calculus_apply(&a, &hh, &[c(1.0), c(1.0)], &ContourSpec::default()).unwrap();
    assert!(dist(&y, &[c(0.25), c(4.0 / 25.0)]) < 1e-10);

    let lap = OperatorHandle::dirichlet_laplacian_1d(8).unwrap();
    let x = random_vec(&mut rng(5), 8);
    let t = 0.1;
    let h = scalar_fn(move |m: C64| Ok((-m * t).exp())).with_sector(std::f64::consts::FRAC_PI_2);
    let y = sqrt_calculus_apply(&lap, &h, &x, &ContourSpec::default()).unwrap();
    let want = lap.spectral_apply(|l| Ok((-l.sqrt() * t).exp()), &x).unwrap();
    assert!(rel_dist(&y, &want) <= 1e-9);
}

#[test]
fn contour_angle_independence() {
    let mut r = rng(6);
    let a = random_spd(&mut r, 8, 0.1, 1e3);
    let x = random_vec(&mut r, 8);
    let g = scalar_fn(|l: C64| Ok(l.powf(0.3) / ((1.0 + l) * (1.0 + l))));
    let f = ExtendedFunction::elementary(&g);
    let tol = 1e-11;
    let base = apply_extended(&f, &a, &x, &ContourSpec { phi: Some(0.6), ..ContourSpec::default().adaptive(tol) }).unwrap();
    for phi in [1.2, 2.0, 2.8] {
        let other = apply_extended(&f, &a, &x, &ContourSpec { phi: Some(phi), ..ContourSpec::default().adaptive(tol) }).unwrap();
        assert!(dist(&base, &other) <= 10.0 * tol * norm(&x), "phi {phi}");
    }
}

#[test]
fn frac_power_semigroup_law() {
    let mut r = rng(7);
    for _ in 0..3 {
        let a = random_spd(&mut r, 8, 0.5, 100.0);
        let x = random_vec(&mut r, 8);
        for (al, be) in [(0.2, 0.3), (0.45, 0.45), (0.1, 0.7)] {
            let ab = frac_power(&a, order(al), &frac_power(&a, order(be), &x, &ContourSpec::default()).unwrap(), &ContourSpec::default()).unwrap();
            let sum = frac_power(&a, order(al + be), &x, &ContourSpec::default()).unwrap();
            assert!(dist(&ab, &sum) <= 1e-7 * norm(&sum));
        }
    }
}

#[test]
fn frac_power_near_one_approaches_a() {
    let mut r = rng(8);
    for _ in 0..3 {
        let a = random_spd(&mut r, 8, 1.0, 10.0);
        let x = random_vec(&mut r, 8);
        let ax = a.apply(&x).unwrap();
        let y = frac_power(&a, order(1.0 - 1e-3), &x, &ContourSpec::default()).unwrap();
        assert!(dist(&y, &ax) <= 1e-2 * norm(&ax));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn multiplicative_on_elementary_functions(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let d: Vec<f64> = (0..6).map(|_| 10f64.powf(r.gen_range(-2.0..2.0))).collect();
        let a = diag(&d);
        let x = random_vec(&mut r, 6);
        let s = r.gen_range(0.2..0.8);
        let f1 = scalar_fn(move |l: C64| Ok(l.powf(s) / (1.0 + l)));
        let f2 = scalar_fn(|l: C64| Ok(l / ((2.0 + l) * (2.0 + l))));
        let prod = scalar_fn(move |l: C64| Ok(l.powf(s) / (1.0 + l) * l / ((2.0 + l) * (2.0 + l))));
        let spec = ContourSpec::default();
        let lhs = apply_extended(&ExtendedFunction::elementary(&prod), &a, &x, &spec).unwrap();
        let inner = apply_extended(&ExtendedFunction::elementary(&f2), &a, &x, &spec).unwrap();
        let rhs = apply_extended(&ExtendedFunction::elementary(&f1), &a, &inner, &spec).unwrap();
        prop_assert!(dist(&lhs, &rhs) <= 1e-8 * norm(&x));
    }
}
