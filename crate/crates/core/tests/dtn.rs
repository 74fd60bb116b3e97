mod common;

use common::{c, random_real_vec, random_spd, random_vec, rng};
use sectorial_core::calculus::ContourSpec;
use sectorial_core::dtn::*;
use sectorial_core::extension::extend_bessel;
use sectorial_core::kernels::{c_alpha, kernel_u_neumann, FracOrder, SectorPoint};
use sectorial_core::operators::OperatorHandle;
use sectorial_core::vector::{dist, norm, rel_dist, sub};
use sectorial_core::{Error, C64};

fn diag(v: &[f64]) -> OperatorHandle {
    OperatorHandle::diagonal(v.iter().map(|&x| c(x)).collect(), 0.0).unwrap()
}

fn order(a: f64) -> FracOrder {
    FracOrder::real(a).unwrap()
}

#[test]
fn apply_examples() {
    let one = diag(&[1.0]);
    let got = dtn_apply(&one, order(0.5), &[c(1.0)], 1.0, &ContourSpec::default()).unwrap();
    assert!((got[0] - c((-1f64).exp())).norm() < 1e-12);
    let d = diag(&[1.0, 4.0]);
    let al = order(0.3);
    let got = dtn_apply(&d, al, &[c(1.0), c(1.0)], 1e-7, &ContourSpec::default()).unwrap();
    let ca = c_alpha(al);
    let want = [ca, ca * 4f64.powf(0.3)];
    assert!(dist(&got, &want) <= 1e-6);
    let zero = dtn_apply(&d, al, &[c(0.0), c(0.0)], 0.5, &ContourSpec::default()).unwrap();
    assert_eq!(norm(&zero), 0.0);
}

#[test]
fn agrees_with_differences_of_the_extension() {
    let lap = OperatorHandle::dirichlet_laplacian_1d(6).unwrap();
    let x = random_real_vec(&mut rng(1), 6);
    let spec = ContourSpec::default();
    for al in [0.2, 0.5, 0.8] {
        let t = 0.3;
        let neumann = dtn_apply(&lap, order(al), &x, t, &spec).unwrap();
        let fd = |h: f64| -> Vec<C64> {
            let up = extend_bessel(&lap, order(al), &x, c(t + h), &spec).unwrap();
            let um = extend_bessel(&lap, order(al), &x, c(t - h), &spec).unwrap();
            sub(&um, &up).iter().map(|v| v / (2.0 * h) * t.powf(1.0 - 2.0 * al)).collect()
        };
        let e1 = dist(&fd(1e-2), &neumann);
        let e2 = dist(&fd(5e-3), &neumann);
        assert!(e1 < 1e-2 * norm(&neumann), "alpha {al}");
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "alpha {al}: ratio {ratio}");
    }
}

#[test]
fn half_order_on_two_eigenvalues() {
    let d = diag(&[1.0, 4.0]);
    let r = dtn_limit(&d, order(0.5), &[c(1.0), c(1.0)], &default_schedule(), &ContourSpec::default()).unwrap();
    assert!(r.rel_error <= 1e-9, "{}", r.rel_error);
    assert!((r.observed_order - 1.0).abs() < 0.15);
    assert_eq!(r.expected_order(), 1.0);
}

#[test]
fn identity_limit() {
    let id = OperatorHandle::identity(3).unwrap();
    let x = random_vec(&mut rng(2), 3);
    for al in [0.2, 0.5, 0.8] {
        let r = dtn_limit(&id, order(al), &x, &default_schedule(), &ContourSpec::default()).unwrap();
        assert!(r.rel_error <= 1e-9, "alpha {al}: {}", r.rel_error);
        let want: Vec<C64> = x.iter().map(|v| v * c_alpha(order(al))).collect();
        assert!(rel_dist(&r.extrapolated_limit, &want) <= 1e-9);
    }
}

#[test]
fn laplacian_order() {
    let lap = OperatorHandle::dirichlet_laplacian_1d(16).unwrap();
    let x = random_real_vec(&mut rng(3), 16);
    let r = dtn_limit(&lap, order(0.25), &x, &default_schedule(), &ContourSpec::default()).unwrap();
    assert!(r.rel_error <= 1e-6);
    assert!((r.observed_order - 1.5).abs() <= 0.15, "{}", r.observed_order);
    assert!(r.fit_residual <= FIT_RESIDUAL_MAX);
    assert_eq!(r.neumann_samples.len(), r.t_schedule.len());
}

#[test]
fn neumann_limit_matches_scaled_power() {
    let mut r = rng(4);
    let ops = [
        diag(&[0.3, 1.0, 7.0, 40.0]),
        random_spd(&mut r, 6, 0.5, 100.0),
        OperatorHandle::dirichlet_laplacian_1d(8).unwrap(),
    ];
    for a in &ops {
        let x = random_real_vec(&mut r, a.dim());
        for al in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let res = dtn_limit(a, order(al), &x, &default_schedule(), &ContourSpec::default()).unwrap();
            assert!(res.rel_error <= 1e-6, "alpha {al}: {}", res.rel_error);
        }
    }
}

#[test]
fn scalar_consistency_with_the_kernel_limit() {
    for l2 in [0.25, 1.0, 9.0] {
        for al in [0.2, 0.6] {
            let r = dtn_limit(&diag(&[l2]), order(al), &[c(1.0)], &default_schedule(), &ContourSpec::default()).unwrap();
            let lim = c_alpha(order(al)) * l2.powf(al);
            assert!((r.extrapolated_limit[0] - lim).norm() <= 1e-9 * lim.norm());
            let near = kernel_u_neumann(order(al), &SectorPoint::real(1e-9, l2.sqrt()).unwrap()).unwrap();
            assert!((near - lim).norm() <= 1e-6 * lim.norm());
        }
    }
}

#[test]
fn short_or_unordered_schedules_rejected() {
    let d = diag(&[1.0, 2.0]);
    let x = [c(1.0), c(1.0)];
    let err = dtn_limit(&d, order(0.3), &x, &[0.1, 0.05, 0.025], &ContourSpec::default()).unwrap_err();
    match err {
        Error::Precondition(m) => assert!(m.contains("schedule too short")),
        e => panic!("unexpected {e:?}"),
    }
    let up: Vec<f64> = (4..12).map(|k| 2f64.powi(-k)).rev().collect();
    assert!(matches!(dtn_limit(&d, order(0.3), &x, &up, &ContourSpec::default()), Err(Error::Precondition(_))));
}
