//! The harmonic extension `U(t)x`, solving `u'' + ((1-2α)/t) u' = Au` with `u(0) = x` and
//! decay at infinity, by independent routes:
//!
//! - `bessel`: `U(z) = u_z(√A)` through the contour calculus,
//! - `integral`: `z^{2α}/(2Γ(2α)) ∫₀^∞ s^{α-1/2} e^{-z√(A+s)} (A+s)^{-1/2} x ds` with dense
//!   matrix functions at every node,
//! - `subordination`: `(1/Γ(α)) (t/2)^{2α} ∫₀^∞ r^{-α} e^{-t²/4r} e^{-rA}x dr/r`,
//! - `series`: the two-parameter solution with `y = -c_α A^α x` (bounded operators, small t).
//!
//! Bounded operators also get the general two-parameter solution `v_t(√A)x + w_t(√A)y` and
//! the variation-of-constants formula for the inhomogeneous equation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::calculus::{frac_power, scalar_fn, sqrt_calculus_apply, ContourSpec};
use crate::dtn::dtn_apply;
use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::kernels::{c_alpha, gamma_fn, u_product, FracOrder};
use crate::linalg::{self, Lu};
use crate::operators::OperatorHandle;
use crate::quadrature::{tanh_sinh, trapezoid_scan, ScanOptions};
use crate::vector;
use crate::C64;

/// Route used to evaluate `U(t)x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bessel,
    Integral,
    Subordination,
    Series,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Bessel => "bessel",
            Method::Integral => "integral",
            Method::Subordination => "subordination",
            Method::Series => "series",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        match tag {
            "bessel" => Some(Method::Bessel),
            "integral" => Some(Method::Integral),
            "subordination" => Some(Method::Subordination),
            "series" => Some(Method::Series),
            _ => None,
        }
    }
}

fn check_len(a: &OperatorHandle, x: &[C64]) -> Result<()> {
    if x.len() == a.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a.dim(), found: x.len() })
    }
}

fn check_z(a: &OperatorHandle, z: C64) -> Result<()> {
    let limit = FRAC_PI_2 - a.omega() / 2.0;
    if z.norm() == 0.0 || !(z.arg().abs() < limit) {
        return Err(Error::Domain(format!("z = {z} outside the sector |arg z| < {limit}")));
    }
    Ok(())
}

/// `U(z)x = [λ ↦ u_z(√λ)](A)x`.
pub fn extend_bessel(a: &OperatorHandle, alpha: FracOrder, x: &[C64], z: C64, contour: &ContourSpec) -> Result<Vec<C64>> {
    check_len(a, x)?;
    check_z(a, z)?;
    let b = alpha.value();
    let h = scalar_fn(move |mu: C64| u_product(b, z * mu)).with_sector(FRAC_PI_2 - z.arg().abs());
    sqrt_calculus_apply(a, &h, x, contour)
}

/// `U(z)x` from the Bochner integral over `s`, substituted `s = σ²`, `σ = e^y`, with the
/// square root and exponential of `A + σ²` computed densely at every node.
pub fn extend_integral(a: &OperatorHandle, alpha: FracOrder, x: &[C64], z: C64) -> Result<Vec<C64>> {
    check_len(a, x)?;
    check_z(a, z)?;
    let m = a.dense().ok_or(Error::Capability("dense matrix representation"))?;
    if let Some(s) = a.spectral() {
        if let Some(l) = s.eigenvalues().iter().find(|l| l.im == 0.0 && l.re <= 0.0) {
            return Err(Error::BranchCut(*l));
        }
    }
    let al = alpha.value();
    let n = a.dim();
    let integrand = |y: f64| -> Result<Vec<C64>> {
        let sigma = y.exp();
        let shifted = m.shift(C64::new(sigma * sigma, 0.0));
        let root = linalg::sqrtm_denman_beavers(&shifted, 1e-13)?;
        let lu = Lu::factor(&root).ok_or(Error::BranchCut(C64::new(0.0, 0.0)))?;
        let w = lu.solve(x);
        let e = linalg::expm(&root.scale(-z));
        let weight = 2.0 * C64::new(sigma, 0.0).powc(2.0 * al + 1.0);
        Ok(e.mul_vec(&w).into_iter().map(|v| v * weight).collect())
    };
    let center = ((2.0 * al.re + 1.0) / z.re).ln();
    let opts = ScanOptions { cut: 1e-14, ..ScanOptions::default() };
    let r = trapezoid_scan(integrand, center, n, opts)?;
    let norm = z.powc(2.0 * al) / (2.0 * gamma_fn(2.0 * al)?);
    Ok(vector::scale(norm, &r.value))
}

/// `U(t)x` by subordination to the semigroup `e^{-rA}`, in the variable `r = e^y`.
pub fn extend_subordination(a: &OperatorHandle, alpha: FracOrder, x: &[C64], t: f64) -> Result<Vec<C64>> {
    check_len(a, x)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let dense = a.dense();
    if dense.is_none() && a.spectral().is_none() {
        return Err(Error::Capability("semigroup evaluation (dense matrix or spectral data)"));
    }
    let al = alpha.value();
    let n = a.dim();
    let integrand = |y: f64| -> Result<Vec<C64>> {
        let r = y.exp();
        let weight = (-al * y - t * t / (4.0 * r)).exp();
        let e = match &dense {
            Some(m) => linalg::expm(&m.scale(C64::new(-r, 0.0))).mul_vec(x),
            None => a.spectral_apply(|l| Ok((-r * l).exp()), x)?,
        };
        Ok(e.into_iter().map(|v| v * weight).collect())
    };
    let center = (t * t / (4.0 * al.re)).ln();
    let r = trapezoid_scan(integrand, center, n, ScanOptions::default())?;
    let norm = C64::new(t / 2.0, 0.0).powc(2.0 * al) / gamma_fn(al)?;
    Ok(vector::scale(norm, &r.value))
}

/// Largest admissible `t² ‖A‖ / 4` for the power series.
pub const SERIES_LIMIT: f64 = 50.0;
const SERIES_TERMS: usize = 200;

/// Power series `Σ_k c_k (t²A/4)^k x` with `c_k / c_{k-1} = 1/(k(k + shift))`, together with
/// its weighted sum `Σ_k (2k + 2·flux_shift) c_k (…)^k x` used for `t^{1-2α}u'`.
fn entire_series(a: &OperatorHandle, t: f64, shift: C64, flux_shift: C64, x: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let q = C64::new(t * t / 4.0, 0.0);
    let mut term = x.to_vec();
    let mut sum = term.clone();
    let mut flux = vector::scale(2.0 * flux_shift, &term);
    if vector::norm(x) == 0.0 {
        return Ok((sum, flux));
    }
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        let at = a.apply(&term)?;
        let f = q / (kf * (kf + shift));
        term = at.into_iter().map(|v| v * f).collect();
        vector::axpy(&mut sum, C64::new(1.0, 0.0), &term);
        vector::axpy(&mut flux, 2.0 * kf + 2.0 * flux_shift, &term);
        let tn = vector::norm(&term);
        if tn <= 1e-16 * vector::norm(&sum) && tn * 2.0 * kf <= 1e-16 * vector::norm(&flux).max(vector::norm(&sum)) {
            return Ok((sum, flux));
        }
    }
    Err(Error::TruncationOverflow { terms: SERIES_TERMS })
}

fn check_series(a: &OperatorHandle, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be non-negative")));
    }
    let scale = t * t * a.spectral_bracket().1 / 4.0;
    if scale > SERIES_LIMIT {
        return Err(Error::Precondition(format!("t^2 |A| / 4 = {scale:.3e} exceeds {SERIES_LIMIT}")));
    }
    Ok(())
}

/// `v_t(√A)x` and `t^{1-2α} d/dt v_t(√A)x`.
fn series_v(a: &OperatorHandle, alpha: FracOrder, t: f64, x: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let al = alpha.value();
    let (v, dv) = entire_series(a, t, -al, C64::new(0.0, 0.0), x)?;
    if t == 0.0 {
        return Ok((v, vec![C64::new(0.0, 0.0); x.len()]));
    }
    let scale = C64::new(t, 0.0).powc(-2.0 * al);
    Ok((v, vector::scale(scale, &dv)))
}

/// `w_t(√A)y` and `t^{1-2α} d/dt w_t(√A)y`.
fn series_w(a: &OperatorHandle, alpha: FracOrder, t: f64, y: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let al = alpha.value();
    if t == 0.0 {
        return Ok((vec![C64::new(0.0, 0.0); y.len()], y.to_vec()));
    }
    let (w, dw) = entire_series(a, t, al, al, y)?;
    let pref = C64::new(t, 0.0).powc(2.0 * al) / (2.0 * al);
    let flux_pref = 1.0 / (2.0 * al);
    Ok((vector::scale(pref, &w), vector::scale(flux_pref, &dw)))
}

/// `u(t) = v_t(√A)x + w_t(√A)y`, the solution with `u(0) = x` and `t^{1-2α}u'(t) → y`.
pub fn two_param_solution(a: &OperatorHandle, alpha: FracOrder, x: &[C64], y: &[C64], t: f64) -> Result<Vec<C64>> {
    two_param_state(a, alpha, x, y, t).map(|s| s.0)
}

/// `(u(t), t^{1-2α}u'(t))` for the two-parameter solution.
pub fn two_param_state(a: &OperatorHandle, alpha: FracOrder, x: &[C64], y: &[C64], t: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    check_len(a, x)?;
    check_len(a, y)?;
    check_series(a, t)?;
    let (v, dv) = series_v(a, alpha, t, x)?;
    let (w, dw) = series_w(a, alpha, t, y)?;
    Ok((vector::add(&v, &w), vector::add(&dv, &dw)))
}

/// Solution of `u'' + ((1-2α)/t)u' - Au = f` with `u(0) = x`, `t^{1-2α}u' → y`:
///
/// ```text
/// u(t) = v_t x + w_t y + ∫₀^t (w_t v_s - v_t w_s) s^{1-2α} f(s) ds.
/// ```
///
/// The weight is absorbed by `s = t σ^p`, `p = 1/(2 - 2 Re α)`, and the σ-integral is done
/// by tanh-sinh quadrature.
pub fn inhomogeneous_solution<F>(a: &OperatorHandle, alpha: FracOrder, x: &[C64], y: &[C64], f: F, t: f64) -> Result<Vec<C64>>
where
    F: Fn(f64) -> Result<Vec<C64>>,
{
    let mut u = two_param_solution(a, alpha, x, y, t)?;
    if t == 0.0 {
        return Ok(u);
    }
    let al = alpha.value();
    let p = 1.0 / (2.0 - 2.0 * al.re);
    let n = a.dim();
    let integrand = |sig: f64, _: f64| -> Result<Vec<C64>> {
        let s = t * sig.powf(p);
        let g = f(s)?;
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        let (vs, _) = series_v(a, alpha, s, &g)?;
        let (ws, _) = series_w(a, alpha, s, &g)?;
        let (left, _) = series_w(a, alpha, t, &vs)?;
        let (right, _) = series_v(a, alpha, t, &ws)?;
        let weight = C64::new(sig, 0.0).powc(p * (2.0 - 2.0 * al) - 1.0);
        Ok(vector::sub(&left, &right).into_iter().map(|v| v * weight).collect())
    };
    let integral = tanh_sinh(integrand, n, 1e-13)?;
    let pref = C64::new(t, 0.0).powc(2.0 - 2.0 * al) * p;
    vector::axpy(&mut u, pref, &integral);
    Ok(u)
}

/// Sampled trajectory `t ↦ U(t)x` with flux and ODE residual columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionProfile {
    pub alpha: FracOrder,
    pub method: Method,
    pub x: Vec<C64>,
    pub t_values: Vec<f64>,
    pub u_values: Vec<Vec<C64>>,
    /// `u'(t)`.
    pub du_values: Vec<Vec<C64>>,
    /// `t^{1-2α} u'(t)`.
    pub flux_values: Vec<Vec<C64>>,
    /// `‖d/dt(t^{1-2α}u') - t^{1-2α}Au‖` with the derivative by three-point differences.
    pub residuals: Vec<f64>,
    /// `max ‖u(t)‖ / ‖x‖` over the samples.
    pub sup_ratio: f64,
}

/// One line of the tabular form of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub norm_u: f64,
    pub dist_x: f64,
    pub norm_flux: f64,
    pub residual: f64,
}

impl ExtensionProfile {
    pub fn rows(&self) -> Vec<ProfileRow> {
        (0..self.t_values.len())
            .map(|i| ProfileRow {
                t: self.t_values[i],
                norm_u: vector::norm(&self.u_values[i]),
                dist_x: vector::dist(&self.u_values[i], &self.x),
                norm_flux: vector::norm(&self.flux_values[i]),
                residual: self.residuals[i],
            })
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(f64::NAN, |m, &r| if m.is_nan() { r } else { m.max(r) })
    }
}

/// `points_per_decade` geometric points from `t_min` to `t_max` inclusive.
pub fn geometric_schedule(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && points_per_decade > 0) {
        return Err(Error::Precondition(format!("bad schedule [{t_min}, {t_max}] with {points_per_decade} points per decade")));
    }
    let decades = (t_max / t_min).log10();
    let steps = (decades * points_per_decade as f64).round() as usize;
    if steps == 0 {
        return Ok(vec![t_min]);
    }
    Ok((0..=steps).map(|i| t_min * (t_max / t_min).powf(i as f64 / steps as f64)).collect())
}

/// Points per decade of the default schedule.
pub const DEFAULT_POINTS_PER_DECADE: usize = 25;

/// Three-point derivative on a non-uniform grid, one-sided at the ends.
pub fn three_point_derivative(t: &[f64], f: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let m = t.len();
    let nan = |len: usize| vec![C64::new(f64::NAN, f64::NAN); len];
    if m < 3 {
        return f.iter().map(|v| nan(v.len())).collect();
    }
    let comb = |c: [f64; 3], i: [usize; 3]| -> Vec<C64> {
        (0..f[0].len()).map(|k| f[i[0]][k] * c[0] + f[i[1]][k] * c[1] + f[i[2]][k] * c[2]).collect()
    };
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let (j, coeffs) = if i == 0 {
            let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
            (1, [-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))])
        } else if i == m - 1 {
            let (h1, h2) = (t[m - 2] - t[m - 3], t[m - 1] - t[m - 2]);
            (m - 2, [h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (h1 + 2.0 * h2) / (h2 * (h1 + h2))])
        } else {
            let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            (i, [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))])
        };
        out.push(comb(coeffs, [j - 1, j, j + 1]));
    }
    out
}

/// `U(t)x` by the selected route. `series_y` is `-c_α A^α x`, needed by the series route.
fn evaluate(
    a: &OperatorHandle,
    alpha: FracOrder,
    x: &[C64],
    t: f64,
    method: Method,
    contour: &ContourSpec,
    series_y: Option<&[C64]>,
) -> Result<Vec<C64>> {
    let z = C64::new(t, 0.0);
    match method {
        Method::Bessel => extend_bessel(a, alpha, x, z, contour),
        Method::Integral => extend_integral(a, alpha, x, z),
        Method::Subordination => extend_subordination(a, alpha, x, t),
        Method::Series => two_param_solution(a, alpha, x, series_y.unwrap_or(&[]), t),
    }
}

/// Profile along an increasing schedule of positive times.
pub fn profile(a: &OperatorHandle, alpha: FracOrder, x: &[C64], schedule: &[f64], method: Method, contour: &ContourSpec) -> Result<ExtensionProfile> {
    profile_with(&Sequential, a, alpha, x, schedule, method, contour)
}

/// [`profile`] with the schedule points distributed by `exec`; the result does not depend on
/// the executor.
pub fn profile_with<E: Executor>(
    exec: &E,
    a: &OperatorHandle,
    alpha: FracOrder,
    x: &[C64],
    schedule: &[f64],
    method: Method,
    contour: &ContourSpec,
) -> Result<ExtensionProfile> {
    check_len(a, x)?;
    if schedule.is_empty() {
        return Err(Error::Precondition(String::from("schedule is empty")));
    }
    if schedule.iter().any(|&t| !(t > 0.0 && t.is_finite())) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(String::from("schedule must be positive and strictly increasing")));
    }
    if method == Method::Integral && a.dense().is_none() {
        return Err(Error::Capability("dense matrix representation"));
    }
    let series_y = if method == Method::Series {
        check_series(a, *schedule.last().unwrap_or(&0.0))?;
        let p = frac_power(a, alpha, x, contour)?;
        Some(vector::scale(-c_alpha(alpha), &p))
    } else {
        None
    };
    let al = alpha.value();
    let points = exec.map_indexed(schedule.len(), |i| -> Result<(Vec<C64>, Vec<C64>)> {
        let t = schedule[i];
        let u = evaluate(a, alpha, x, t, method, contour, series_y.as_deref())?;
        let neumann = dtn_apply(a, alpha, x, t, contour)?;
        Ok((u, neumann.into_iter().map(|v| -v).collect()))
    });
    let mut u_values = Vec::with_capacity(schedule.len());
    let mut flux_values = Vec::with_capacity(schedule.len());
    for p in points {
        let (u, flux) = p?;
        u_values.push(u);
        flux_values.push(flux);
    }
    let du_values = schedule
        .iter()
        .zip(&flux_values)
        .map(|(&t, fl)| vector::scale(C64::new(t, 0.0).powc(2.0 * al - 1.0), fl))
        .collect();
    let dflux = three_point_derivative(schedule, &flux_values);
    let mut residuals = Vec::with_capacity(schedule.len());
    for i in 0..schedule.len() {
        let w = C64::new(schedule[i], 0.0).powc(1.0 - 2.0 * al);
        let au = a.apply(&u_values[i])?;
        let rhs = vector::scale(w, &au);
        residuals.push(vector::dist(&dflux[i], &rhs));
    }
    let nx = vector::norm(x);
    let sup_ratio = u_values.iter().map(|u| vector::norm(u)).fold(0.0, f64::max) / if nx > 0.0 { nx } else { 1.0 };
    Ok(ExtensionProfile {
        alpha,
        method,
        x: x.to_vec(),
        t_values: schedule.to_vec(),
        u_values,
        du_values,
        flux_values,
        residuals,
        sup_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [Method::Bessel, Method::Integral, Method::Subordination, Method::Series] {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
    }

    #[test]
    fn geometric_schedule_endpoints() {
        let s = geometric_schedule(1e-3, 1.0, 25).unwrap();
        assert_eq!(s.len(), 76);
        assert_eq!(s[0], 1e-3);
        assert!((s[75] - 1.0).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(geometric_schedule(0.5, 0.5, 10).unwrap(), vec![0.5]);
        assert!(geometric_schedule(0.0, 1.0, 10).is_err());
    }

    #[test]
    fn three_point_derivative_exact_on_quadratics() {
        let t = [0.1, 0.13, 0.2, 0.31, 0.5];
        let f: Vec<Vec<C64>> = t.iter().map(|&s| vec![c(3.0 * s * s - s + 2.0)]).collect();
        let d = three_point_derivative(&t, &f);
        for (s, v) in t.iter().zip(&d) {
            assert!((v[0] - c(6.0 * s - 1.0)).norm() < 1e-12);
        }
        let short = three_point_derivative(&t[..2], &f[..2]);
        assert!(short[0][0].re.is_nan());
    }

    #[test]
    fn series_at_zero_is_initial_data() {
        let a = OperatorHandle::diagonal(vec![c(2.0), c(3.0)], 0.0).unwrap();
        let al = FracOrder::real(0.4).unwrap();
        let (u, flux) = two_param_state(&a, al, &[c(1.0), c(2.0)], &[c(-1.0), c(0.5)], 0.0).unwrap();
        assert_eq!(u, vec![c(1.0), c(2.0)]);
        assert_eq!(flux, vec![c(-1.0), c(0.5)]);
    }
}
