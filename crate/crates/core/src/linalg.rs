//! Dense complex linear algebra used by the operator backends: LU solves, a Jacobi eigensolver
//! for Hermitian matrices, the exact 2-norm, the scaling-and-squaring exponential and the
//! Denman–Beavers square root.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds a matrix from row-major entries; panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has the wrong length");
        CMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_row_major(rows, cols, data.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let start = i * out.cols;
                for (o, b) in out.data[start..start + other.cols].iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self + s I`
    pub fn shift(&self, s: C64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn norm_fro(&self) -> f64 {
        crate::vector::norm(&self.data)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Operator 2-norm. Exact (Jacobi on `AᴴA`) up to dimension 64, power iteration above.
    pub fn norm_2(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        if self.cols <= 64 {
            let (vals, _) = hermitian_eig(&gram);
            vals.iter().fold(0.0_f64, |m, &v| m.max(v)).max(0.0).sqrt()
        } else {
            power_norm(&gram, 1e-6, 500).sqrt()
        }
    }
}

fn power_norm(gram: &CMatrix, tol: f64, max_iter: usize) -> f64 {
    let n = gram.rows();
    // deterministic, non-degenerate start vector
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.0)).collect();
    let mut est = 0.0;
    for _ in 0..max_iter {
        let w = gram.mul_vec(&v);
        let nw = crate::vector::norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let nv = crate::vector::norm(&v);
        let next = nw / nv;
        v = w.iter().map(|x| x / nw).collect();
        if (next - est).abs() <= tol * next {
            return next;
        }
        est = next;
    }
    est
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Returns `None` when a pivot vanishes relative to the matrix scale.
    pub fn factor(a: &CMatrix) -> Option<Lu> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.max_abs();
        let tiny = scale * f64::EPSILON * 1e-3;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny || pmax == 0.0 || !pmax.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Some(Lu { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        y
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col = self.solve(&b.column(j));
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> CMatrix {
        self.solve_matrix(&CMatrix::identity(self.dim()))
    }

    pub fn det(&self) -> C64 {
        self.lu.diagonal().iter().fold(C64::new(self.sign, 0.0), |acc, d| acc * d)
    }

    /// `log |det|`, safe against overflow.
    pub fn log_abs_det(&self) -> f64 {
        self.lu.diagonal().iter().map(|d| d.norm().ln()).sum()
    }
}

pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    Lu::factor(a).map(|lu| lu.inverse())
}

/// Cyclic Jacobi eigensolver for Hermitian matrices. Returns ascending eigenvalues and the
/// unitary matrix whose columns are the matching eigenvectors.
pub fn hermitian_eig(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(a.is_square(), "eigensolver needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    // symmetrize to exact Hermitian form
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let total = m.norm_fro();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r <= 1e-300 {
                    continue;
                }
                let e = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();
                // columns: A <- A U
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - ec * akq * s;
                    m[(k, q)] = akp * s + ec * akq * c;
                }
                // rows: A <- Uᴴ A
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - e * aqk * s;
                    m[(q, k)] = apk * s + e * aqk * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - ec * vkq * s;
                    v[(k, q)] = vkp * s + ec * vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[(a, a)].re.partial_cmp(&m[(b, b)].re).unwrap_or(core::cmp::Ordering::Equal));
    let vals: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (newc, &oldc) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, newc)] = v[(i, oldc)];
        }
    }
    (vals, vecs)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential `exp(A)` by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let norm = a.norm_1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(C64::new(0.5_f64.powi(s), 0.0));
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let ident = CMatrix::identity(n);
    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let inner_u = a6.scale(b(13)).add(&a4.scale(b(11))).add(&a2.scale(b(9)));
    let u_poly = a6
        .mul(&inner_u)
        .add(&a6.scale(b(7)))
        .add(&a4.scale(b(5)))
        .add(&a2.scale(b(3)))
        .add(&ident.scale(b(1)));
    let u = a.mul(&u_poly);
    let inner_v = a6.scale(b(12)).add(&a4.scale(b(10))).add(&a2.scale(b(8)));
    let v = a6
        .mul(&inner_v)
        .add(&a6.scale(b(6)))
        .add(&a4.scale(b(4)))
        .add(&a2.scale(b(2)))
        .add(&ident.scale(b(0)));
    let p = v.add(&u);
    let q = v.sub(&u);
    let mut r = match Lu::factor(&q) {
        Some(lu) => lu.solve_matrix(&p),
        // q is a small perturbation of a positive multiple of I after scaling
        None => p,
    };
    for _ in 0..s {
        r = r.mul(&r);
    }
    r
}

/// Principal square root by the determinant-scaled Denman–Beavers iteration.
pub fn sqrtm_denman_beavers(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = a.rows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n);
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let ly = Lu::factor(&y).ok_or(Error::BranchCut(C64::new(0.0, 0.0)))?;
        let lz = Lu::factor(&z).ok_or(Error::BranchCut(C64::new(0.0, 0.0)))?;
        // |det(Y) det(Z)|^(-1/(2n))
        let mu = (-(ly.log_abs_det() + lz.log_abs_det()) / (2.0 * n as f64)).exp();
        let yi = ly.inverse();
        let zi = lz.inverse();
        let muc = C64::new(mu, 0.0);
        let half = C64::new(0.5, 0.0);
        let y_next = y.scale(muc).add(&zi.scale(C64::new(1.0 / mu, 0.0))).scale(half);
        let z_next = z.scale(muc).add(&yi.scale(C64::new(1.0 / mu, 0.0))).scale(half);
        let change = y_next.sub(&y).norm_fro() / y_next.norm_fro().max(f64::MIN_POSITIVE);
        y = y_next;
        z = z_next;
        if !y.is_finite() {
            break;
        }
        if change <= tol {
            // polish: the scaled iteration converges to the same root
            let res = y.mul(&y).sub(a).norm_fro() / scale;
            if res <= 1e3 * tol.max(1e-14) {
                return Ok(y);
            }
        }
    }
    Err(Error::NonConvergence { what: "Denman-Beavers square root", change: f64::NAN })
}
