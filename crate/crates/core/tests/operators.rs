mod common;

use common::{c, random_spd, random_spd_matrix, random_vec, rng};
use proptest::prelude::*;
use rand::Rng;
use sectorial_core::linalg::{expm, CMatrix};
use sectorial_core::operators::{sector_samples, semigroup_sector, OperatorHandle};
use sectorial_core::vector::{dist, norm, rel_dist, sub};
use sectorial_core::{Error, C64};

fn diag(v: &[f64]) -> OperatorHandle {
    OperatorHandle::diagonal(v.iter().map(|&x| c(x)).collect(), 0.0).unwrap()
}

#[test]
fn identity_resolvent() {
    let a = OperatorHandle::from_dense(CMatrix::identity(3), 0.0).unwrap();
    let x = vec![c(1.0), C64::new(2.0, -1.0), c(-3.0)];
    let l = c(-2.5);
    let got = a.resolvent_minus(l, &x).unwrap();
    let want: Vec<C64> = x.iter().map(|v| v / (l - 1.0)).collect();
    assert!(dist(&got, &want) < 1e-15);
}

#[test]
fn diagonal_resolvent() {
    let a = OperatorHandle::from_dense(CMatrix::from_diag(&[c(1.0), c(4.0)]), 0.0).unwrap();
    let got = a.resolvent_minus(c(-1.0), &[c(1.0), c(0.0)]).unwrap();
    assert!(dist(&got, &[c(-0.5), c(0.0)]) < 1e-15);
}

#[test]
fn random_spd_resolvent_residual() {
    let mut r = rng(3);
    let (m, _) = random_spd_matrix(&mut r, 8, 0.5, 100.0);
    let a = OperatorHandle::from_dense(m.clone(), 0.0).unwrap();
    let x = random_vec(&mut r, 8);
    for k in -3..=3 {
        let l = c(-(10f64.powi(k)));
        let y = a.resolvent_minus(l, &x).unwrap();
        let back = sub(&y.iter().map(|v| v * l).collect::<Vec<_>>(), &m.mul_vec(&y));
        assert!(dist(&back, &x) <= 1e-10 * norm(&x), "lambda {l}");
    }
}

#[test]
fn singular_resolvent_reported() {
    let a = diag(&[1.0, 4.0]);
    assert!(matches!(a.resolvent_minus(c(4.0), &[c(1.0), c(1.0)]), Err(Error::SingularResolvent(_))));
}

#[test]
fn laplacian_spectrum() {
    let a = OperatorHandle::dirichlet_laplacian_1d(3).unwrap();
    let mut ev: Vec<f64> = a.spectral().unwrap().eigenvalues().iter().map(|l| l.re).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    assert!((ev[0] - (2.0 - 2f64.sqrt()) * 16.0).abs() < 1e-12);
    for (k, e) in ev.iter().enumerate() {
        let want = (2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 4.0).cos()) * 16.0;
        assert!((e - want).abs() <= 1e-12 * want, "k {k}");
    }
    assert_eq!(a.omega(), 0.0);
    let m = a.dense().unwrap();
    assert!(m.is_hermitian(0.0));
}

#[test]
fn matrix_free_laplacian_matches_dense() {
    let d = OperatorHandle::dirichlet_laplacian_1d(12).unwrap();
    let f = OperatorHandle::dirichlet_laplacian_1d_matrix_free(12).unwrap();
    assert!(f.dense().is_none() || f.backend_name() != "dense");
    let x = random_vec(&mut rng(5), 12);
    assert!(rel_dist(&f.apply(&x).unwrap(), &d.apply(&x).unwrap()) < 1e-14);
    let l = c(-7.0);
    assert!(rel_dist(&f.resolvent_minus(l, &x).unwrap(), &d.resolvent_minus(l, &x).unwrap()) < 1e-12);
    let sq = |l: C64| Ok(l.sqrt());
    assert!(rel_dist(&f.spectral_apply(sq, &x).unwrap(), &d.spectral_apply(sq, &x).unwrap()) < 1e-12);
}

#[test]
fn sectorial_approximation_examples() {
    let a = diag(&[2.0]).sectorial_approximation(0.5).unwrap();
    assert!((a.apply(&[c(1.0)]).unwrap()[0] - c(1.0)).norm() < 1e-15);
    let z = OperatorHandle::from_dense(CMatrix::zeros(3, 3), 0.0).unwrap();
    for eps in [1e-3, 1.0, 10.0] {
        assert_eq!(z.sectorial_approximation(eps).unwrap().dense().unwrap(), CMatrix::zeros(3, 3));
    }
    let mut r = rng(8);
    let (m, _) = random_spd_matrix(&mut r, 8, 1.0, 50.0);
    let a = OperatorHandle::from_dense(m.clone(), 0.0).unwrap();
    let eps = 1e-4;
    let ae = a.sectorial_approximation(eps).unwrap().dense().unwrap();
    let na = m.norm_2();
    assert!(ae.sub(&m).norm_2() / na <= 2.0 * eps * na);
    // A_ε − A = −εA²(1+εA)⁻¹
    let oracle = m.mul(&m).mul(&sectorial_core::linalg::inverse(&m.scale(c(eps)).shift(c(1.0))).unwrap()).scale(c(-eps));
    assert!(ae.sub(&m).sub(&oracle).norm_2() <= 1e-9 * oracle.norm_2());
}

#[test]
fn sectorial_approximation_commutes_with_resolvent() {
    let mut r = rng(9);
    let (m, _) = random_spd_matrix(&mut r, 6, 0.1, 100.0);
    let a = OperatorHandle::from_dense(m, 0.0).unwrap();
    let x = random_vec(&mut r, 6);
    for eps in [1e-3, 1e-1] {
        let ae = a.sectorial_approximation(eps).unwrap();
        for l in [0.3, 5.0, 80.0] {
            // λ(λ + A_ε)⁻¹ = λ(1+εA)(λ + (1+ελ)A)⁻¹
            let direct: Vec<C64> = ae.solve_shifted(c(l), &x).unwrap().iter().map(|v| v * l).collect();
            let k = 1.0 + eps * l;
            let y: Vec<C64> = a.solve_shifted(c(l / k), &x).unwrap().iter().map(|v| v / k).collect();
            let ay = a.apply(&y).unwrap();
            let rearranged: Vec<C64> = y.iter().zip(&ay).map(|(p, q)| (p + q * eps) * l).collect();
            assert!(rel_dist(&direct, &rearranged) <= 1e-9, "eps {eps} lambda {l}");
        }
    }
}

#[test]
fn sectoriality_estimates() {
    let mut r = rng(10);
    for _ in 0..4 {
        let a = random_spd(&mut r, 8, 0.01, 1e4);
        let est = a.estimate_sectoriality(&a.default_sectoriality_grid()).unwrap();
        assert!(est.m_hat >= 1.0 - 1e-8 && est.m_hat <= 1.0 + 1e-6, "{}", est.m_hat);
    }
    let rot: Vec<C64> = [0.5, 1.0, 3.0, 10.0].iter().map(|&s| C64::new(1.0, s)).collect();
    let a = OperatorHandle::diagonal(rot, 1.48).unwrap();
    let est = a.estimate_sectoriality(&a.default_sectoriality_grid()).unwrap();
    assert!(est.m_hat >= 1.0 && est.m_hat.is_finite());
    // normal operator: the norm is the largest |λ/(λ+μ)| over eigenvalues μ
    let oracle = a
        .default_sectoriality_grid()
        .iter()
        .flat_map(|&l| [0.5, 1.0, 3.0, 10.0].map(|s| l / (l + C64::new(1.0, s)).norm()))
        .fold(1.0, f64::max);
    assert!((est.m_hat - oracle).abs() <= 1e-12 * oracle);
    let j = CMatrix::from_row_major(2, 2, vec![c(1.0), c(10.0), c(0.0), c(1.0)]);
    let a = OperatorHandle::from_dense(j, 0.0).unwrap();
    let est = a.estimate_sectoriality(&a.default_sectoriality_grid()).unwrap();
    assert!(est.m_hat > 1.5, "{}", est.m_hat);
}

#[test]
fn semigroup_bound_examples() {
    let one = diag(&[1.0]);
    let samples = sector_samples(semigroup_sector(0.0), 0.01, 100.0, 10, 10);
    let f = one.semigroup_bound_check(0.0, 0, &samples).unwrap();
    assert_eq!(f.violations, 0);
    assert!(f.kappa > 0.0 && f.kappa <= 1.0);
    let z = C64::new(0.7, 0.4);
    assert!((one.semigroup_norm(0.0, 0, z).unwrap() - (-0.7f64).exp()).abs() < 1e-15);

    let lap = OperatorHandle::dirichlet_laplacian_1d(16).unwrap();
    let mut last = f64::INFINITY;
    for re in [0.01, 0.1, 0.5, 1.0, 2.0] {
        let v = lap.semigroup_norm(1.0, 0, c(re)).unwrap();
        assert!(v < last);
        last = v;
    }
    let f = lap.semigroup_bound_check(0.0, 1, &samples).unwrap();
    assert_eq!(f.violations, 0);
    assert!(f.c.is_finite());
}

#[test]
fn spectral_apply_examples() {
    let mut r = rng(12);
    let a = random_spd(&mut r, 6, 1.0, 10.0);
    let x = random_vec(&mut r, 6);
    assert!(rel_dist(&a.spectral_apply(Ok, &x).unwrap(), &a.apply(&x).unwrap()) < 1e-13);
    let d = OperatorHandle::diagonal(vec![c(1.0), c(4.0)], 0.0).unwrap();
    let got = d.spectral_apply(|l| Ok(l.sqrt()), &[c(3.0), c(5.0)]).unwrap();
    assert!(dist(&got, &[c(3.0), c(10.0)]) < 1e-15);
    let lap = OperatorHandle::dirichlet_laplacian_1d(8).unwrap();
    let x = random_vec(&mut r, 8);
    let oracle = expm(&lap.dense().unwrap().scale(c(-1.0))).mul_vec(&x);
    assert!(dist(&lap.spectral_apply(|l| Ok((-l).exp()), &x).unwrap(), &oracle) <= 1e-10 * norm(&x));
    let bare = OperatorHandle::from_dense(CMatrix::identity(2), 0.0).unwrap();
    assert!(matches!(bare.spectral_apply(Ok, &[c(1.0), c(1.0)]), Err(Error::MissingSpectralData)));
}

#[test]
fn dense_functions() {
    let d = OperatorHandle::from_dense(CMatrix::from_diag(&[c(4.0)]), 0.0).unwrap();
    assert!((d.dense_sqrt().unwrap()[(0, 0)] - c(2.0)).norm() < 1e-14);
    assert!((d.dense_exp(c(0.5)).unwrap()[(0, 0)] - c((-2f64).exp())).norm() < 1e-15);
    let z = OperatorHandle::from_dense(CMatrix::zeros(2, 2), 0.0).unwrap();
    assert_eq!(z.dense_exp(c(1.0)).unwrap(), CMatrix::identity(2));
    let mut r = rng(13);
    for _ in 0..3 {
        let (m, _) = random_spd_matrix(&mut r, 8, 0.1, 1e3);
        let plain = OperatorHandle::from_dense(m.clone(), 0.0).unwrap();
        let spec = plain.clone().with_hermitian_spectral().unwrap();
        let s1 = plain.dense_sqrt().unwrap();
        let s2 = spec.dense_sqrt().unwrap();
        assert!(s1.sub(&s2).norm_2() <= 1e-10 * s2.norm_2());
        assert!(s1.mul(&s1).sub(&m).norm_2() <= 1e-9 * m.norm_2());
    }
    let neg = OperatorHandle::from_dense(CMatrix::from_diag(&[c(-1.0), c(2.0)]), 0.0).unwrap();
    assert!(matches!(neg.dense_sqrt(), Err(Error::BranchCut(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn resolvent_identity(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_spd(&mut r, 6, 0.1, 1e3);
        let x = random_vec(&mut r, 6);
        let l = C64::new(-r.gen_range(0.01..100.0), r.gen_range(-5.0..5.0));
        let m = C64::new(-r.gen_range(0.01..100.0), r.gen_range(-5.0..5.0));
        let lhs = sub(&a.resolvent_minus(l, &x).unwrap(), &a.resolvent_minus(m, &x).unwrap());
        let rhs: Vec<C64> = a.resolvent_minus(l, &a.resolvent_minus(m, &x).unwrap()).unwrap().iter().map(|v| v * (m - l)).collect();
        prop_assert!(rel_dist(&lhs, &rhs) <= 1e-9);
    }

    #[test]
    fn spd_sectoriality_is_one(seed in 0u64..1000, lo in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = random_spd(&mut r, 5, 10f64.powf(lo), 1e3);
        let grid: Vec<f64> = (0..40).map(|i| 10f64.powf(lo - 6.0 + 0.4 * i as f64)).collect();
        let est = a.estimate_sectoriality(&grid).unwrap();
        prop_assert!(est.m_hat <= 1.0 + 1e-6);
    }
}
