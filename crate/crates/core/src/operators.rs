//! Sectorial operator backends.
//!
//! An [`OperatorHandle`] exposes `x ↦ Ax`, resolvent solves `(λ - A)⁻¹x`, the claimed sector
//! half-angle `ω` and, optionally, an eigendecomposition used as an independent oracle. The
//! contour calculus only ever calls [`OperatorHandle::resolvent_minus`], never the
//! spectral data.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use spin::RwLock;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, CMatrix, Lu};
use crate::vector;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
/// Tolerance on `|arg λ| ≤ ω` when checking eigenvalues against the claimed sector.
const SECTOR_SLACK: f64 = 1e-9;
/// Upper bound on the memory held by cached factorizations.
const CACHE_BYTES: usize = 1 << 26;

/// Eigendecomposition `A = V Λ V⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    eigenvalues: Vec<C64>,
    vectors: CMatrix,
    inverse: CMatrix,
}

impl SpectralData {
    /// Builds the decomposition from eigenvalues and eigenvectors, inverting `V` by LU.
    pub fn new(eigenvalues: Vec<C64>, vectors: CMatrix) -> Result<Self> {
        let inverse = linalg::inverse(&vectors).ok_or(Error::Domain(String::from("eigenvector matrix is singular")))?;
        Self::from_parts(eigenvalues, vectors, inverse)
    }

    pub fn from_parts(eigenvalues: Vec<C64>, vectors: CMatrix, inverse: CMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        for m in [&vectors, &inverse] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.rows() });
            }
        }
        Ok(SpectralData { eigenvalues, vectors, inverse })
    }

    /// Unitary decomposition of a Hermitian matrix.
    pub fn hermitian(a: &CMatrix) -> Self {
        let (vals, v) = hermitian_eig(a);
        let inverse = v.adjoint();
        SpectralData { eigenvalues: vals.into_iter().map(|l| C64::new(l, 0.0)).collect(), vectors: v, inverse }
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    /// `‖V‖₁ ‖V⁻¹‖₁`.
    pub fn condition(&self) -> f64 {
        self.vectors.norm_1() * self.inverse.norm_1()
    }

    /// `V f(Λ) V⁻¹ x`.
    pub fn apply<F>(&self, f: F, x: &[C64]) -> Result<Vec<C64>>
    where
        F: Fn(C64) -> Result<C64>,
    {
        let c = self.inverse.mul_vec(x);
        let mut fc = Vec::with_capacity(c.len());
        for (ci, &l) in c.iter().zip(&self.eigenvalues) {
            let v = f(l)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Domain(format!("function value not finite at eigenvalue {l}")));
            }
            fc.push(v * ci);
        }
        Ok(self.vectors.mul_vec(&fc))
    }

    /// The matrix `V f(Λ) V⁻¹`.
    pub fn matrix<F>(&self, f: F) -> Result<CMatrix>
    where
        F: Fn(C64) -> Result<C64>,
    {
        let n = self.eigenvalues.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let v = f(self.eigenvalues[j])?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Domain(format!("function value not finite at eigenvalue {}", self.eigenvalues[j])));
            }
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        Ok(scaled.mul(&self.inverse))
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Dense(CMatrix),
    Diagonal(Vec<C64>),
    /// Matrix-free tridiagonal storage: sub-, main and super-diagonal.
    Tridiagonal { sub: Vec<C64>, diag: Vec<C64>, sup: Vec<C64> },
}

/// Factorizations of `λ - A` keyed by the bit pattern of `λ`. Readers only ever see
/// complete entries; eviction drops the oldest insertions.
struct ResolventCache {
    map: RwLock<(BTreeMap<(u64, u64), Arc<Lu>>, VecDeque<(u64, u64)>)>,
    capacity: usize,
}

impl ResolventCache {
    fn new(n: usize) -> Self {
        let capacity = (CACHE_BYTES / (16 * n * n).max(1)).clamp(64, 1 << 16);
        ResolventCache { map: RwLock::new((BTreeMap::new(), VecDeque::new())), capacity }
    }

    fn get(&self, key: (u64, u64)) -> Option<Arc<Lu>> {
        self.map.read().0.get(&key).cloned()
    }

    fn insert(&self, key: (u64, u64), lu: Arc<Lu>) {
        let mut guard = self.map.write();
        let (map, order) = &mut *guard;
        if map.contains_key(&key) {
            return;
        }
        while map.len() >= self.capacity {
            match order.pop_front() {
                Some(old) => {
                    map.remove(&old);
                }
                None => break,
            }
        }
        map.insert(key, lu);
        order.push_back(key);
    }

    fn len(&self) -> usize {
        self.map.read().0.len()
    }
}

/// A sectorial operator on `ℂⁿ`.
pub struct OperatorHandle {
    backend: Backend,
    omega: f64,
    spectral: Option<SpectralData>,
    bracket: (f64, f64),
    real: bool,
    cache: ResolventCache,
}

impl Clone for OperatorHandle {
    fn clone(&self) -> Self {
        OperatorHandle {
            backend: self.backend.clone(),
            omega: self.omega,
            spectral: self.spectral.clone(),
            bracket: self.bracket,
            real: self.real,
            cache: ResolventCache::new(self.dim()),
        }
    }
}

impl core::fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("dim", &self.dim())
            .field("backend", &self.backend_name())
            .field("omega", &self.omega)
            .field("spectral", &self.spectral.is_some())
            .finish()
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if (0.0..PI).contains(&omega) {
        Ok(())
    } else {
        Err(Error::Domain(format!("sector angle {omega} outside [0, pi)")))
    }
}

fn key(l: C64) -> (u64, u64) {
    (l.re.to_bits(), l.im.to_bits())
}

/// Tridiagonal solve with partial pivoting (the LAPACK `gtsv` elimination).
fn tridiag_solve(sub: &[C64], diag: &[C64], sup: &[C64], b: &[C64]) -> Option<Vec<C64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut dl = sub.to_vec();
    let mut du = sup.to_vec();
    let mut x = b.to_vec();
    let scale = diag.iter().chain(sub).chain(sup).fold(0.0_f64, |m, v| m.max(v.norm()));
    let tiny = scale * f64::EPSILON * 1e-3;
    if n == 1 {
        return if d[0].norm() > tiny { Some(vec![x[0] / d[0]]) } else { None };
    }
    for i in 0..n - 1 {
        if d[i].norm() >= dl[i].norm() {
            if d[i].norm() <= tiny {
                return None;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            x[i + 1] = x[i + 1] - fact * x[i];
            if i + 2 < n {
                dl[i] = ZERO;
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            }
            du[i] = temp;
            let tb = x[i];
            x[i] = x[i + 1];
            x[i + 1] = tb - fact * x[i + 1];
        }
    }
    if d[n - 1].norm() <= tiny {
        return None;
    }
    x[n - 1] /= d[n - 1];
    x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - dl[i] * x[i + 2]) / d[i];
    }
    Some(x)
}

impl OperatorHandle {
    fn build(backend: Backend, omega: f64) -> Result<Self> {
        check_omega(omega)?;
        let (n, real, finite) = match &backend {
            Backend::Dense(m) => {
                if !m.is_square() {
                    return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
                }
                (m.rows(), m.as_slice().iter().all(|v| v.im == 0.0), m.is_finite())
            }
            Backend::Diagonal(d) => (d.len(), d.iter().all(|v| v.im == 0.0), d.iter().all(|v| v.re.is_finite() && v.im.is_finite())),
            Backend::Tridiagonal { sub, diag, sup } => {
                let all = || sub.iter().chain(diag).chain(sup);
                (diag.len(), all().all(|v| v.im == 0.0), all().all(|v| v.re.is_finite() && v.im.is_finite()))
            }
        };
        if n == 0 {
            return Err(Error::Precondition(String::from("operator dimension must be positive")));
        }
        if !finite {
            return Err(Error::Domain(String::from("operator entries must be finite")));
        }
        let mut op = OperatorHandle { backend, omega, spectral: None, bracket: (0.0, 0.0), real, cache: ResolventCache::new(n) };
        op.bracket = op.estimate_bracket();
        Ok(op)
    }

    /// Dense operator with claimed sector half-angle `omega`.
    pub fn from_dense(matrix: CMatrix, omega: f64) -> Result<Self> {
        Self::build(Backend::Dense(matrix), omega)
    }

    /// Diagonal operator; its spectral data is the identity transform.
    pub fn diagonal(d: Vec<C64>, omega: f64) -> Result<Self> {
        let n = d.len();
        let op = Self::build(Backend::Diagonal(d.clone()), omega)?;
        let ident = CMatrix::identity(n);
        op.with_spectral(SpectralData { eigenvalues: d, vectors: ident.clone(), inverse: ident })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(vec![C64::new(1.0, 0.0); n], 0.0)
    }

    /// Matrix-free tridiagonal operator. It has no dense representation, so routes that
    /// need matrix functions of `A` reject it.
    pub fn tridiagonal(sub: Vec<C64>, diag: Vec<C64>, sup: Vec<C64>, omega: f64) -> Result<Self> {
        let n = diag.len();
        if sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), found: sub.len().max(sup.len()) });
        }
        Self::build(Backend::Tridiagonal { sub, diag, sup }, omega)
    }

    /// The finite-difference Dirichlet Laplacian `(-1, 2, -1)/h²` on `n` interior points of
    /// `(0, 1)`, stored densely with eigendata from the symmetric eigensolver.
    pub fn dirichlet_laplacian_1d(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("grid size {n} must be at least 2")));
        }
        let h2 = ((n + 1) * (n + 1)) as f64;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(2.0 * h2, 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = C64::new(-h2, 0.0);
                m[(i + 1, i)] = C64::new(-h2, 0.0);
            }
        }
        let spectral = SpectralData::hermitian(&m);
        Self::from_dense(m, 0.0)?.with_spectral(spectral)
    }

    /// Same operator as [`dirichlet_laplacian_1d`](Self::dirichlet_laplacian_1d) in matrix-free
    /// storage, with the closed-form sine eigenbasis attached.
    pub fn dirichlet_laplacian_1d_matrix_free(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("grid size {n} must be at least 2")));
        }
        let h2 = ((n + 1) * (n + 1)) as f64;
        let off = vec![C64::new(-h2, 0.0); n - 1];
        let op = Self::tridiagonal(off.clone(), vec![C64::new(2.0 * h2, 0.0); n], off, 0.0)?;
        let theta = PI / (n + 1) as f64;
        let eig: Vec<C64> = (1..=n)
            .map(|k| C64::new(4.0 * h2 * (0.5 * k as f64 * theta).sin().powi(2), 0.0))
            .collect();
        let norm = (2.0 / (n + 1) as f64).sqrt();
        let mut v = CMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                v[(j, k)] = C64::new(norm * ((j + 1) as f64 * (k + 1) as f64 * theta).sin(), 0.0);
            }
        }
        op.with_spectral(SpectralData { eigenvalues: eig, vectors: v.clone(), inverse: v })
    }

    /// Attaches an eigendecomposition after checking its size and that every eigenvalue lies
    /// in the closed sector of half-angle `ω`.
    pub fn with_spectral(mut self, data: SpectralData) -> Result<Self> {
        if data.eigenvalues.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: data.eigenvalues.len() });
        }
        for &l in &data.eigenvalues {
            if l.norm() > 0.0 && l.arg().abs() > self.omega + SECTOR_SLACK {
                return Err(Error::Domain(format!("eigenvalue {l} outside the sector of half-angle {}", self.omega)));
            }
        }
        self.spectral = Some(data);
        self.bracket = self.estimate_bracket();
        Ok(self)
    }

    /// Attaches the unitary eigendecomposition when the dense matrix is Hermitian.
    pub fn with_hermitian_spectral(self) -> Result<Self> {
        match &self.backend {
            Backend::Dense(m) if m.is_hermitian(1e-13 * m.max_abs()) => {
                let data = SpectralData::hermitian(m);
                self.with_spectral(data)
            }
            _ => Err(Error::Capability("Hermitian dense matrix")),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.backend {
            Backend::Dense(m) => m.rows(),
            Backend::Diagonal(d) => d.len(),
            Backend::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn spectral(&self) -> Option<&SpectralData> {
        self.spectral.as_ref()
    }

    pub fn backend_name(&self) -> &'static str {
        match self.backend {
            Backend::Dense(_) => "dense",
            Backend::Diagonal(_) => "diagonal",
            Backend::Tridiagonal { .. } => "tridiagonal",
        }
    }

    /// Whether all matrix entries are real.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Dense matrix of the operator, if the backend stores one.
    pub fn dense(&self) -> Option<CMatrix> {
        match &self.backend {
            Backend::Dense(m) => Some(m.clone()),
            Backend::Diagonal(d) => Some(CMatrix::from_diag(d)),
            Backend::Tridiagonal { .. } => None,
        }
    }

    fn require_dense(&self) -> Result<CMatrix> {
        self.dense().ok_or(Error::Capability("dense matrix representation"))
    }

    /// Lower and upper estimates of `|λ|` over the spectrum. Exact with spectral data.
    pub fn spectral_bracket(&self) -> (f64, f64) {
        self.bracket
    }

    fn estimate_bracket(&self) -> (f64, f64) {
        if let Some(s) = &self.spectral {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0_f64;
            for l in &s.eigenvalues {
                hi = hi.max(l.norm());
                if l.norm() > 0.0 {
                    lo = lo.min(l.norm());
                }
            }
            if hi == 0.0 {
                return (1.0, 1.0);
            }
            return (lo.min(hi), hi);
        }
        let hi = match &self.backend {
            Backend::Dense(m) => m.norm_1().min(m.norm_inf()),
            Backend::Diagonal(d) => d.iter().fold(0.0_f64, |a, v| a.max(v.norm())),
            Backend::Tridiagonal { sub, diag, sup } => (0..diag.len())
                .map(|i| {
                    diag[i].norm()
                        + if i > 0 { sub[i - 1].norm() } else { 0.0 }
                        + if i + 1 < diag.len() { sup[i].norm() } else { 0.0 }
                })
                .fold(0.0, f64::max),
        };
        if hi == 0.0 {
            return (1.0, 1.0);
        }
        // a few steps of inverse iteration for the smallest modulus
        let n = self.dim();
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.3)).collect();
        let mut lo = hi;
        for _ in 0..30 {
            let w = match self.solve_shifted_uncached(ZERO, &v) {
                Some(w) => w,
                None => return (hi * 1e-12, hi),
            };
            let nw = vector::norm(&w);
            let est = vector::norm(&v) / nw;
            if (est - lo).abs() <= 1e-3 * est {
                lo = est;
                break;
            }
            lo = est;
            v = w.iter().map(|x| x / nw).collect();
        }
        (lo.min(hi), hi)
    }

    fn check_len(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() })
        } else {
            Ok(())
        }
    }

    /// `Ax`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x)?;
        Ok(match &self.backend {
            Backend::Dense(m) => m.mul_vec(x),
            Backend::Diagonal(d) => d.iter().zip(x).map(|(a, b)| a * b).collect(),
            Backend::Tridiagonal { sub, diag, sup } => {
                let n = diag.len();
                (0..n)
                    .map(|i| {
                        let mut s = diag[i] * x[i];
                        if i > 0 {
                            s += sub[i - 1] * x[i - 1];
                        }
                        if i + 1 < n {
                            s += sup[i] * x[i + 1];
                        }
                        s
                    })
                    .collect()
            }
        })
    }

    /// `(s + A)x`.
    pub fn apply_shifted(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        let mut y = self.apply(x)?;
        vector::axpy(&mut y, s, x);
        Ok(y)
    }

    /// `(s + A)⁻¹ b` without touching the cache.
    fn solve_shifted_uncached(&self, s: C64, b: &[C64]) -> Option<Vec<C64>> {
        match &self.backend {
            Backend::Dense(m) => Lu::factor(&m.shift(s)).map(|lu| lu.solve(b)),
            Backend::Diagonal(d) => {
                let mut out = Vec::with_capacity(d.len());
                for (di, bi) in d.iter().zip(b) {
                    let p = di + s;
                    if p.norm() == 0.0 {
                        return None;
                    }
                    out.push(bi / p);
                }
                Some(out)
            }
            Backend::Tridiagonal { sub, diag, sup } => {
                let d: Vec<C64> = diag.iter().map(|v| v + s).collect();
                tridiag_solve(sub, &d, sup, b)
            }
        }
    }

    /// `(λ - A)⁻¹ x`. Dense factorizations are cached per `λ`; for real matrices the
    /// lower half-plane reuses the factorization at `conj λ`.
    pub fn resolvent_minus(&self, lambda: C64, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x)?;
        if self.real && lambda.im < 0.0 {
            let xc: Vec<C64> = x.iter().map(|v| v.conj()).collect();
            let y = self.resolvent_minus(lambda.conj(), &xc)?;
            return Ok(y.into_iter().map(|v| v.conj()).collect());
        }
        match &self.backend {
            Backend::Dense(m) => {
                let k = key(lambda);
                let lu = match self.cache.get(k) {
                    Some(lu) => lu,
                    None => {
                        let shifted = m.scale(C64::new(-1.0, 0.0)).shift(lambda);
                        let lu = Arc::new(Lu::factor(&shifted).ok_or(Error::SingularResolvent(lambda))?);
                        self.cache.insert(k, lu.clone());
                        lu
                    }
                };
                Ok(lu.solve(x))
            }
            _ => {
                let y = self.solve_shifted_uncached(-lambda, x).ok_or(Error::SingularResolvent(lambda))?;
                Ok(y.into_iter().map(|v| -v).collect())
            }
        }
    }

    /// `(s + A)⁻¹ x`.
    pub fn solve_shifted(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        let y = self.resolvent_minus(-s, x)?;
        Ok(y.into_iter().map(|v| -v).collect())
    }

    /// Number of cached factorizations.
    pub fn cached_factorizations(&self) -> usize {
        self.cache.len()
    }

    /// `A_ε = A (1 + εA)⁻¹`, a bounded operator converging to `A` as `ε → 0`.
    pub fn sectorial_approximation(&self, eps: f64) -> Result<OperatorHandle> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Precondition(format!("epsilon {eps} must be positive")));
        }
        let e = C64::new(eps, 0.0);
        let spectral = self.spectral.as_ref().map(|s| SpectralData {
            eigenvalues: s.eigenvalues.iter().map(|l| l / (1.0 + e * l)).collect(),
            vectors: s.vectors.clone(),
            inverse: s.inverse.clone(),
        });
        let mut op = match &self.backend {
            Backend::Diagonal(d) => {
                let mut out = Vec::with_capacity(d.len());
                for l in d {
                    let den = 1.0 + e * l;
                    if den.norm() == 0.0 {
                        return Err(Error::SingularResolvent(-1.0 / e));
                    }
                    out.push(l / den);
                }
                Self::build(Backend::Diagonal(out), self.omega)?
            }
            _ => {
                let a = self.require_dense()?;
                let n = a.rows();
                let lu = Lu::factor(&a.scale(e).shift(C64::new(1.0, 0.0))).ok_or(Error::SingularResolvent(-1.0 / e))?;
                // A and (1 + εA)⁻¹ commute
                let approx = lu.solve_matrix(&a);
                debug_assert_eq!(approx.rows(), n);
                Self::build(Backend::Dense(approx), self.omega)?
            }
        };
        if let Some(s) = spectral {
            op = op.with_spectral(s)?;
        }
        Ok(op)
    }

    /// `‖λ(λ + A)⁻¹‖₂` for `λ > 0`.
    pub fn resolvent_bound(&self, lambda: f64) -> Result<f64> {
        let l = C64::new(lambda, 0.0);
        match &self.backend {
            Backend::Diagonal(d) => {
                let mut m = 0.0_f64;
                for v in d {
                    let den = l + v;
                    if den.norm() == 0.0 {
                        return Err(Error::SingularResolvent(-l));
                    }
                    m = m.max(lambda / den.norm());
                }
                Ok(m)
            }
            Backend::Dense(a) => {
                let lu = Lu::factor(&a.shift(l)).ok_or(Error::SingularResolvent(-l))?;
                Ok(lambda * lu.inverse().norm_2())
            }
            Backend::Tridiagonal { sub, diag, sup } => {
                // power iteration on Bᴴ B with B = (λ + A)⁻¹, using the adjoint tridiagonal
                let d: Vec<C64> = diag.iter().map(|v| v + l).collect();
                let dc: Vec<C64> = d.iter().map(|v| v.conj()).collect();
                let subc: Vec<C64> = sup.iter().map(|v| v.conj()).collect();
                let supc: Vec<C64> = sub.iter().map(|v| v.conj()).collect();
                let n = d.len();
                let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.0)).collect();
                let mut est = 0.0;
                for _ in 0..500 {
                    let w = tridiag_solve(sub, &d, sup, &v).ok_or(Error::SingularResolvent(-l))?;
                    let w = tridiag_solve(&subc, &dc, &supc, &w).ok_or(Error::SingularResolvent(-l))?;
                    let nw = vector::norm(&w);
                    let next = nw / vector::norm(&v);
                    v = w.iter().map(|x| x / nw).collect();
                    if (next - est).abs() <= 1e-6 * next {
                        est = next;
                        break;
                    }
                    est = next;
                }
                Ok(lambda * est.sqrt())
            }
        }
    }

    /// 61 log-spaced points over `[10⁻⁶, 10⁶]` times the spectral radius estimate.
    pub fn default_sectoriality_grid(&self) -> Vec<f64> {
        let rho = self.bracket.1;
        (0..61).map(|i| rho * 10f64.powf(-6.0 + 0.2 * i as f64)).collect()
    }

    /// `M̂ = max over the grid of ‖λ(λ + A)⁻¹‖`.
    pub fn estimate_sectoriality(&self, grid: &[f64]) -> Result<SectorialityEstimate> {
        if grid.is_empty() || grid.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Precondition(String::from("sectoriality grid must hold positive reals")));
        }
        // λ(λ + A)⁻¹ → I as λ → ∞, so the supremum is at least 1 whatever the grid reaches
        let mut m_hat = 1.0_f64;
        for &l in grid {
            m_hat = m_hat.max(self.resolvent_bound(l)?);
        }
        Ok(SectorialityEstimate { m_hat, lambda_grid: grid.to_vec(), kappa_hat: None, c_hat: None })
    }

    /// `V f(Λ) V⁻¹ x`; the independent oracle for the calculus routes.
    pub fn spectral_apply<F>(&self, f: F, x: &[C64]) -> Result<Vec<C64>>
    where
        F: Fn(C64) -> Result<C64>,
    {
        self.check_len(x)?;
        self.spectral.as_ref().ok_or(Error::MissingSpectralData)?.apply(f, x)
    }

    fn check_branch(&self) -> Result<()> {
        if let Some(s) = &self.spectral {
            if let Some(l) = s.eigenvalues.iter().find(|l| l.im == 0.0 && l.re <= 0.0) {
                return Err(Error::BranchCut(*l));
            }
        }
        Ok(())
    }

    /// Principal square root: from the eigendecomposition when present, otherwise by the
    /// Denman–Beavers iteration.
    pub fn dense_sqrt(&self) -> Result<CMatrix> {
        self.check_branch()?;
        if let Some(s) = &self.spectral {
            return s.matrix(|l| Ok(l.sqrt()));
        }
        let a = self.require_dense()?;
        if a.is_hermitian(0.0) {
            let (ev, _) = linalg::hermitian_eig(&a);
            if let Some(l) = ev.iter().find(|&&l| l <= 0.0) {
                return Err(Error::BranchCut(C64::new(*l, 0.0)));
            }
        }
        linalg::sqrtm_denman_beavers(&a, 1e-12)
    }

    /// `e^{-tA}` by scaling and squaring.
    pub fn dense_exp(&self, t: C64) -> Result<CMatrix> {
        let a = self.require_dense()?;
        Ok(linalg::expm(&a.scale(-t)))
    }

    /// `‖(√(A+s))^k e^{-z√(A+s)}‖₂`.
    pub fn semigroup_norm(&self, s: f64, k: u32, z: C64) -> Result<f64> {
        let m = if let Some(sd) = &self.spectral {
            sd.matrix(|l| {
                let w = (l + s).sqrt();
                Ok(w.powu(k) * (-z * w).exp())
            })?
        } else {
            let a = self.require_dense()?.shift(C64::new(s, 0.0));
            let root = linalg::sqrtm_denman_beavers(&a, 1e-12)?;
            let mut m = linalg::expm(&root.scale(-z));
            for _ in 0..k {
                m = root.mul(&m);
            }
            m
        };
        Ok(m.norm_2())
    }

    /// Checks `‖(√(A+s))^k e^{-z√(A+s)}‖ ≤ C (1 + |z|^{-k}) (1 + κ√s)^k e^{-κ Re z √s}`.
    ///
    /// `κ` is half the decay rate the sector geometry guarantees for the sampled angles. `C` is
    /// fitted on the samples with `|z|` at most the median modulus (doubled for slack) and the
    /// bound is then checked on every sample, the outer ones being extrapolation.
    pub fn semigroup_bound_check(&self, s: f64, k: u32, samples: &[C64]) -> Result<SemigroupFit> {
        if !(s >= 0.0) || samples.is_empty() {
            return Err(Error::Precondition(String::from("need s >= 0 and at least one sample")));
        }
        let mut kappa = f64::INFINITY;
        for z in samples {
            if !(z.re > 0.0) {
                return Err(Error::Domain(format!("sample {z} outside the right half-plane")));
            }
            let th = z.arg().abs();
            kappa = kappa.min(0.5 * (th + self.omega / 2.0).cos() / th.cos());
        }
        if !(kappa > 0.0) {
            return Err(Error::FitFailure(format!("sector geometry gives kappa = {kappa}")));
        }
        let bound = |z: C64| {
            let r = z.norm();
            (1.0 + r.powi(-(k as i32))) * (1.0 + kappa * s.sqrt()).powi(k as i32) * (-kappa * z.re * s.sqrt()).exp()
        };
        let mut norms = Vec::with_capacity(samples.len());
        for &z in samples {
            let v = self.semigroup_norm(s, k, z)?;
            if !v.is_finite() {
                return Err(Error::FitFailure(format!("semigroup norm not finite at z = {z}")));
            }
            norms.push(v);
        }
        let mut radii: Vec<f64> = samples.iter().map(|z| z.norm()).collect();
        radii.sort_by(|a, b| a.total_cmp(b));
        let median = radii[radii.len() / 2];
        let mut c = 0.0_f64;
        for (z, v) in samples.iter().zip(&norms) {
            if z.norm() <= median {
                c = c.max(v / bound(*z));
            }
        }
        c *= 2.0;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::FitFailure(format!("constant C = {c}")));
        }
        let violations = samples.iter().zip(&norms).filter(|(z, v)| **v > c * bound(**z)).count();
        Ok(SemigroupFit { s, k, kappa, c, violations, samples: samples.len() })
    }
}

/// Sample grid in the sector `|arg z| ≤ theta`: `n_r` log-spaced moduli in `[r_min, r_max]`
/// times `n_theta` equispaced angles.
pub fn sector_samples(theta: f64, r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let f = if n_r > 1 { i as f64 / (n_r - 1) as f64 } else { 0.0 };
        let r = r_min * (r_max / r_min).powf(f);
        for j in 0..n_theta {
            let g = if n_theta > 1 { j as f64 / (n_theta - 1) as f64 } else { 0.5 };
            out.push(C64::from_polar(r, theta * (2.0 * g - 1.0)));
        }
    }
    out
}

/// Default angular extent for semigroup samples: 90% of `π/2 - ω/2`.
pub fn semigroup_sector(omega: f64) -> f64 {
    0.9 * (FRAC_PI_2 - omega / 2.0)
}

/// Resolvent bound estimate, optionally augmented by a semigroup-bound fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorialityEstimate {
    pub m_hat: f64,
    pub lambda_grid: Vec<f64>,
    pub kappa_hat: Option<f64>,
    pub c_hat: Option<f64>,
}

impl SectorialityEstimate {
    pub fn with_semigroup(mut self, fit: &SemigroupFit) -> Self {
        self.kappa_hat = Some(fit.kappa);
        self.c_hat = Some(fit.c);
        self
    }
}

/// Outcome of [`OperatorHandle::semigroup_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupFit {
    pub s: f64,
    pub k: u32,
    pub kappa: f64,
    pub c: f64,
    pub violations: usize,
    pub samples: usize,
}
