//! Sectorial functional calculus by contour quadrature of resolvents.
//!
//! For `g` holomorphic and decaying polynomially at `0` and `∞` on a sector larger than the
//! spectrum,
//!
//! ```text
//! g(A)x = (1/2πi) ∫_γ g(λ) (λ - A)⁻¹ x dλ,
//! ```
//!
//! where `γ` runs from `∞e^{iφ}` to `0` and out to `∞e^{-iφ}`. With `λ = e^t e^{±iφ}` the
//! integrand is smooth and decays exponentially in `t`, so the trapezoidal rule converges
//! geometrically in the step. Extended functions add `c(1+A)⁻¹x + dx`; unbounded functions
//! are regularized as `(σ+A)^k [g(λ)(σ+λ)^{-k}](A)x`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::FracOrder;
use crate::operators::OperatorHandle;
use crate::vector::{self, pairwise_sum};
use crate::C64;

/// A scalar function holomorphic on a sector `|arg λ| < sector()`.
pub trait ScalarFunction: Sync {
    fn eval(&self, lambda: C64) -> Result<C64>;

    /// Half-angle of the sector on which the function is holomorphic and decays.
    fn sector(&self) -> f64 {
        PI
    }
}

/// Adapter turning a closure into a [`ScalarFunction`].
pub struct FnScalar<F> {
    f: F,
    sector: f64,
}

pub fn scalar_fn<F>(f: F) -> FnScalar<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    FnScalar { f, sector: PI }
}

impl<F> FnScalar<F> {
    pub fn with_sector(mut self, sector: f64) -> Self {
        self.sector = sector;
        self
    }
}

impl<F> ScalarFunction for FnScalar<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    fn eval(&self, lambda: C64) -> Result<C64> {
        (self.f)(lambda)
    }

    fn sector(&self) -> f64 {
        self.sector
    }
}

/// `λ ↦ h(√λ)`; holomorphic on twice the sector of `h`.
pub struct SqrtComposed<'a> {
    pub h: &'a dyn ScalarFunction,
}

impl ScalarFunction for SqrtComposed<'_> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        self.h.eval(lambda.sqrt())
    }

    fn sector(&self) -> f64 {
        (2.0 * self.h.sector()).min(PI)
    }
}

/// `g(λ)(σ+λ)^{-k}`.
struct Regularized<'a> {
    g: &'a dyn ScalarFunction,
    sigma: f64,
    k: i32,
}

impl ScalarFunction for Regularized<'_> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        Ok(self.g.eval(lambda)? / (lambda + self.sigma).powi(self.k))
    }

    fn sector(&self) -> f64 {
        self.g.sector()
    }
}

/// `f(λ) - (f₀ - f∞)/(1+λ) - f∞`, the decaying part of a function with limits `f₀`, `f∞`.
struct Split<'a> {
    f: &'a dyn ScalarFunction,
    c: C64,
    d: C64,
}

impl ScalarFunction for Split<'_> {
    fn eval(&self, lambda: C64) -> Result<C64> {
        Ok(self.f.eval(lambda)? - self.c / (lambda + 1.0) - self.d)
    }

    fn sector(&self) -> f64 {
        self.f.sector()
    }
}

/// `f = g + c(1+λ)⁻¹ + d` with `g` decaying at `0` and `∞`.
pub struct ExtendedFunction<'a> {
    pub g: Option<&'a dyn ScalarFunction>,
    pub c: C64,
    pub d: C64,
}

impl<'a> ExtendedFunction<'a> {
    pub fn elementary(g: &'a dyn ScalarFunction) -> Self {
        ExtendedFunction { g: Some(g), c: C64::new(0.0, 0.0), d: C64::new(0.0, 0.0) }
    }

    pub fn linear(c: C64, d: C64) -> Self {
        ExtendedFunction { g: None, c, d }
    }
}

/// Contour geometry and quadrature schedule. Unset fields are chosen from the operator and
/// the function being applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Half-angle of the contour rays; defaults to the middle of the admissible range.
    pub phi: Option<f64>,
    /// Range of `t` in `λ = e^t e^{±iφ}`; found by scanning the integrand when unset.
    pub log_range: Option<(f64, f64)>,
    /// Nodes per ray; only used together with `log_range`.
    pub nodes: Option<usize>,
    /// Halve the step until successive results agree to `tol`.
    pub adaptive: bool,
    pub tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { phi: None, log_range: None, nodes: None, adaptive: false, tol: 1e-13 }
    }
}

impl ContourSpec {
    /// Fully specified contour.
    pub fn fixed(phi: f64, log_range: (f64, f64), nodes: usize) -> Self {
        ContourSpec { phi: Some(phi), log_range: Some(log_range), nodes: Some(nodes), ..Self::default() }
    }

    pub fn adaptive(mut self, tol: f64) -> Self {
        self.adaptive = true;
        self.tol = tol;
        self
    }

    fn validate(&self, omega: f64, upper: f64) -> Result<f64> {
        let phi = self.phi.unwrap_or(0.5 * (omega + upper));
        if !(phi > omega && phi < upper) {
            return Err(Error::ContourAngle { phi, lower: omega, upper });
        }
        if let Some((a, b)) = self.log_range {
            if !(b > a) {
                return Err(Error::Precondition(alloc::format!("log range [{a}, {b}] is empty")));
            }
            if self.nodes.unwrap_or(0) < 8 {
                return Err(Error::Precondition(alloc::string::String::from("a fixed contour needs at least 8 nodes per ray")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(alloc::string::String::from("tolerance must be positive")));
        }
        Ok(phi)
    }
}

/// What the quadrature actually did.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContourStats {
    pub phi: f64,
    pub h: f64,
    pub log_range: (f64, f64),
    pub nodes_per_ray: usize,
    pub refinements: u32,
}

/// Give up scanning for decay after this many steps in either direction.
const SCAN_LIMIT: usize = 6000;
/// Truncate where the integrand weight falls below this fraction of its peak.
const CUT: f64 = 1e-17;

/// Term `g(λ₋)λ₋R(λ₋)x - g(λ₊)λ₊R(λ₊)x` at `t`.
fn node_term(g: &dyn ScalarFunction, a: &OperatorHandle, x: &[C64], phi: f64, t: f64) -> Result<Vec<C64>> {
    let r = t.exp();
    let lp = C64::from_polar(r, phi);
    let lm = lp.conj();
    let fp = g.eval(lp)? * lp;
    let fm = g.eval(lm)? * lm;
    if !(fp.re.is_finite() && fp.im.is_finite() && fm.re.is_finite() && fm.im.is_finite()) {
        return Err(Error::Decay(alloc::format!("function not finite at |lambda| = {r:e}")));
    }
    let mut out = a.resolvent_minus(lm, x)?;
    for v in out.iter_mut() {
        *v *= fm;
    }
    let up = a.resolvent_minus(lp, x)?;
    vector::axpy(&mut out, -fp, &up);
    Ok(out)
}

/// Size proxy of the integrand at `t`: `|g(λ)| min(1, |λ|/ρ_lo)`.
fn weight(g: &dyn ScalarFunction, phi: f64, t: f64, rho_lo: f64) -> Result<f64> {
    let r = t.exp();
    let lp = C64::from_polar(r, phi);
    let v = g.eval(lp)?.norm().max(g.eval(lp.conj())?.norm());
    if !v.is_finite() {
        return Err(Error::Decay(alloc::format!("function not finite at |lambda| = {r:e}")));
    }
    Ok(v * (r / rho_lo).min(1.0))
}

/// Integer lattice range `[k_lo, k_hi]` of `t = k h` outside which the integrand is negligible.
fn scan_range(g: &dyn ScalarFunction, phi: f64, h: f64, bracket: (f64, f64)) -> Result<(i64, i64)> {
    let (lo, hi) = bracket;
    let k0 = (lo.ln() / h).floor() as i64;
    let k1 = (hi.ln() / h).ceil() as i64;
    let mut peak = 0.0_f64;
    for k in k0..=k1 {
        peak = peak.max(weight(g, phi, k as f64 * h, lo)?);
    }
    let mut ends = [k0, k1];
    for (side, dir) in [(0usize, -1i64), (1, 1)] {
        let mut k = ends[side];
        let mut quiet = 0;
        let mut steps = 0;
        loop {
            k += dir;
            steps += 1;
            if steps > SCAN_LIMIT {
                return Err(Error::Decay(alloc::format!(
                    "no decay within |t| <= {:.0} of the spectrum",
                    SCAN_LIMIT as f64 * h
                )));
            }
            let w = weight(g, phi, k as f64 * h, lo)?;
            peak = peak.max(w);
            if w <= CUT * peak {
                quiet += 1;
                if quiet == 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        ends[side] = k;
    }
    if peak == 0.0 {
        return Ok((k0, k0 - 1));
    }
    Ok((ends[0], ends[1]))
}

/// `g(A)x` for decaying `g` on the contour.
fn contour_apply(g: &dyn ScalarFunction, a: &OperatorHandle, x: &[C64], spec: &ContourSpec) -> Result<(Vec<C64>, ContourStats)> {
    let n = a.dim();
    let omega = a.omega();
    let upper = g.sector();
    let phi = spec.validate(omega, upper)?;
    let (mut h, t0, count) = match (spec.log_range, spec.nodes) {
        (Some((lo, hi)), Some(m)) => ((hi - lo) / (m - 1) as f64, lo, m),
        _ => {
            let d = 0.5 * (phi - omega).min(upper - phi);
            let raw = 2.0 * PI * d / ((1.0 / spec.tol).ln() + 4.0);
            // snap to a power of two so nodes line up between calls
            let h = 2f64.powi(raw.log2().floor() as i32);
            let (k0, k1) = scan_range(g, phi, h, a.spectral_bracket())?;
            if k1 < k0 {
                return Ok((alloc::vec![C64::new(0.0, 0.0); n], ContourStats { phi, h, ..Default::default() }));
            }
            (h, k0 as f64 * h, (k1 - k0 + 1) as usize)
        }
    };
    let scale = C64::new(0.0, -1.0 / (2.0 * PI));
    let mut terms = Vec::with_capacity(count);
    for j in 0..count {
        terms.push(node_term(g, a, x, phi, t0 + j as f64 * h)?);
    }
    let mut sum = pairwise_sum(terms, n);
    let mut est = vector::scale(scale * h, &sum);
    let mut stats = ContourStats {
        phi,
        h,
        log_range: (t0, t0 + (count - 1) as f64 * h),
        nodes_per_ray: count,
        refinements: 0,
    };
    if !spec.adaptive {
        return Ok((est, stats));
    }
    let mut intervals = count - 1;
    for round in 1..=6u32 {
        let mut mids = Vec::with_capacity(intervals);
        for j in 0..intervals {
            mids.push(node_term(g, a, x, phi, t0 + (j as f64 + 0.5) * h)?);
        }
        sum = vector::add(&sum, &pairwise_sum(mids, n));
        h *= 0.5;
        intervals *= 2;
        let next = vector::scale(scale * h, &sum);
        let change = vector::dist(&next, &est);
        est = next;
        stats.h = h;
        stats.nodes_per_ray = intervals + 1;
        stats.refinements = round;
        if change <= spec.tol * vector::norm(&est) {
            return Ok((est, stats));
        }
    }
    Err(Error::NonConvergence { what: "contour node doubling", change: f64::NAN })
}

/// `f(A)x = g(A)x + c(1+A)⁻¹x + dx`, with statistics of the quadrature.
pub fn apply_extended_stats(
    f: &ExtendedFunction<'_>,
    a: &OperatorHandle,
    x: &[C64],
    contour: &ContourSpec,
) -> Result<(Vec<C64>, ContourStats)> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: x.len() });
    }
    let (mut y, stats) = match f.g {
        Some(g) => contour_apply(g, a, x, contour)?,
        None => (alloc::vec![C64::new(0.0, 0.0); x.len()], ContourStats::default()),
    };
    if f.c != C64::new(0.0, 0.0) {
        let r = a.solve_shifted(C64::new(1.0, 0.0), x)?;
        vector::axpy(&mut y, f.c, &r);
    }
    if f.d != C64::new(0.0, 0.0) {
        vector::axpy(&mut y, f.d, x);
    }
    Ok((y, stats))
}

pub fn apply_extended(f: &ExtendedFunction<'_>, a: &OperatorHandle, x: &[C64], contour: &ContourSpec) -> Result<Vec<C64>> {
    apply_extended_stats(f, a, x, contour).map(|r| r.0)
}

/// `f(A)x` for `f` with finite limits `f₀` at `0` and `f∞` at `∞`, split into its decaying
/// part plus `(f₀ - f∞)(1+λ)⁻¹ + f∞`.
pub fn apply_with_limits(
    f: &dyn ScalarFunction,
    at_zero: C64,
    at_infinity: C64,
    a: &OperatorHandle,
    x: &[C64],
    contour: &ContourSpec,
) -> Result<Vec<C64>> {
    let split = Split { f, c: at_zero - at_infinity, d: at_infinity };
    let ext = ExtendedFunction { g: Some(&split), c: split.c, d: split.d };
    apply_extended(&ext, a, x, contour)
}

/// `(σ+A)^k [g(λ)(σ+λ)^{-k}](A)x` for `g` growing at most like `λ^{k-ε}` at infinity.
pub fn apply_regularized(
    g: &dyn ScalarFunction,
    sigma: f64,
    k: u32,
    a: &OperatorHandle,
    x: &[C64],
    contour: &ContourSpec,
) -> Result<Vec<C64>> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(alloc::format!("regularizer shift {sigma} must be positive")));
    }
    let reg = Regularized { g, sigma, k: k as i32 };
    let mut y = apply_extended(&ExtendedFunction::elementary(&reg), a, x, contour)?;
    for _ in 0..k {
        y = a.apply_shifted(C64::new(sigma, 0.0), &y)?;
    }
    Ok(y)
}

/// Regularizer shift used by [`frac_power`]: the upper end of the spectral bracket.
pub fn regularizer_shift(a: &OperatorHandle) -> f64 {
    a.spectral_bracket().1
}

/// `A^α x` through the regularized calculus with `k = 2`.
pub fn frac_power(a: &OperatorHandle, alpha: FracOrder, x: &[C64], contour: &ContourSpec) -> Result<Vec<C64>> {
    let al = alpha.value();
    let g = scalar_fn(move |l: C64| Ok(l.powc(al)));
    apply_regularized(&g, regularizer_shift(a), 2, a, x, contour)
}

/// `[λ ↦ h(√λ)](A)x` without forming `√A`. `h` must vanish at infinity; its value at `0` is
/// taken from `h.eval(0)`.
pub fn sqrt_calculus_apply(a: &OperatorHandle, h: &dyn ScalarFunction, x: &[C64], contour: &ContourSpec) -> Result<Vec<C64>> {
    let at_zero = h.eval(C64::new(0.0, 0.0))?;
    if !(at_zero.re.is_finite() && at_zero.im.is_finite()) {
        return Err(Error::Decay(alloc::string::String::from("function has no finite limit at 0")));
    }
    let f = SqrtComposed { h };
    apply_with_limits(&f, at_zero, C64::new(0.0, 0.0), a, x, contour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn linear_part_uses_no_nodes() {
        let a = OperatorHandle::diagonal(vec![c(1.0), c(3.0)], 0.0).unwrap();
        let x = vec![c(2.0), c(4.0)];
        let (y, stats) = apply_extended_stats(&ExtendedFunction::linear(c(1.0), c(0.0)), &a, &x, &ContourSpec::default()).unwrap();
        assert_eq!(stats.nodes_per_ray, 0);
        assert!(vector::dist(&y, &[c(1.0), c(1.0)]) < 1e-15);
        let y = apply_extended(&ExtendedFunction::linear(c(0.0), c(1.0)), &a, &x, &ContourSpec::default()).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn rational_function_on_diagonal() {
        let a = OperatorHandle::diagonal(vec![c(1.0), c(4.0)], 0.0).unwrap();
        let x = vec![c(1.0), c(1.0)];
        let g = scalar_fn(|l: C64| Ok(l / ((1.0 + l) * (1.0 + l))));
        let y = apply_extended(&ExtendedFunction::elementary(&g), &a, &x, &ContourSpec::default()).unwrap();
        assert!(vector::dist(&y, &[c(0.25), c(4.0 / 25.0)]) < 1e-12);
    }

    #[test]
    fn angle_outside_range_is_rejected() {
        let a = OperatorHandle::diagonal(vec![c(1.0)], 0.5).unwrap();
        let g = scalar_fn(|l: C64| Ok(l / ((1.0 + l) * (1.0 + l))));
        let spec = ContourSpec { phi: Some(0.4), ..Default::default() };
        let r = apply_extended(&ExtendedFunction::elementary(&g), &a, &[c(1.0)], &spec);
        assert!(matches!(r, Err(Error::ContourAngle { .. })));
    }

    #[test]
    fn square_root_of_diagonal() {
        let a = OperatorHandle::diagonal(vec![c(1.0), c(4.0)], 0.0).unwrap();
        let y = frac_power(&a, FracOrder::real(0.5).unwrap(), &[c(1.0), c(1.0)], &ContourSpec::default()).unwrap();
        assert!(vector::dist(&y, &[c(1.0), c(2.0)]) < 1e-12, "{y:?}");
    }

    #[test]
    fn composition_through_square_root() {
        let a = OperatorHandle::diagonal(vec![c(4.0)], 0.0).unwrap();
        let h = scalar_fn(|m: C64| Ok((-m).exp())).with_sector(PI / 2.0);
        let y = sqrt_calculus_apply(&a, &h, &[c(1.0)], &ContourSpec::default()).unwrap();
        assert!((y[0] - c((-2f64).exp())).norm() < 1e-12, "{y:?}");
    }

    #[test]
    fn non_decaying_function_is_rejected() {
        let a = OperatorHandle::diagonal(vec![c(1.0)], 0.0).unwrap();
        let g = scalar_fn(|l: C64| Ok(l.sqrt()));
        let r = apply_extended(&ExtendedFunction::elementary(&g), &a, &[c(1.0)], &ContourSpec::default());
        assert!(matches!(r, Err(Error::Decay(_))));
    }
}
