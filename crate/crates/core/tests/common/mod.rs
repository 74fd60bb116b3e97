#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sectorial_core::linalg::{hermitian_eig, CMatrix};
use sectorial_core::operators::OperatorHandle;
use sectorial_core::C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random orthogonal matrix from the eigenvectors of a random symmetric matrix.
pub fn random_orthogonal(rng: &mut StdRng, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            m[(i, j)] = c(v);
            m[(j, i)] = c(v);
        }
    }
    hermitian_eig(&m).1
}

/// `Q diag(eig) Qᵀ` with eigenvalues log-uniform in `[lo, lo·cond]`, both ends attained.
pub fn random_spd_matrix(rng: &mut StdRng, n: usize, lo: f64, cond: f64) -> (CMatrix, Vec<f64>) {
    let q = random_orthogonal(rng, n);
    let eig: Vec<f64> = (0..n)
        .map(|i| {
            let f = if i == 0 {
                0.0
            } else if i == n - 1 {
                1.0
            } else {
                rng.gen::<f64>()
            };
            lo * cond.powf(f)
        })
        .collect();
    let d = CMatrix::from_diag(&eig.iter().map(|&e| c(e)).collect::<Vec<_>>());
    let mut a = q.mul(&d).mul(&q.adjoint());
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            let v = (a[(i, j)] + a[(j, i)]) * 0.5;
            a[(i, j)] = C64::new(v.re, 0.0);
            a[(j, i)] = C64::new(v.re, 0.0);
        }
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    (a, eig)
}

pub fn random_spd(rng: &mut StdRng, n: usize, lo: f64, cond: f64) -> OperatorHandle {
    let (a, _) = random_spd_matrix(rng, n, lo, cond);
    OperatorHandle::from_dense(a, 0.0).unwrap().with_hermitian_spectral().unwrap()
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn random_real_vec(rng: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0))).collect()
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
pub fn simpson<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, m: usize) -> C64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}
