//! Quadrature rules shared by the integral-based routes: the trapezoidal rule in a
//! logarithmic variable with automatic truncation, and tanh-sinh on `[0, 1]`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::vector::{self, pairwise_sum};
use crate::C64;

/// Options for [`trapezoid_scan`].
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Initial step.
    pub h: f64,
    /// Truncate a side once the integrand norm stays below `cut` times the peak.
    pub cut: f64,
    /// Stop halving once successive estimates differ by at most `tol` relative.
    pub tol: f64,
    pub max_halvings: u32,
    pub max_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { h: 0.25, cut: 1e-16, tol: 1e-12, max_halvings: 7, max_steps: 20_000 }
    }
}

/// Result of a trapezoidal scan, with the bookkeeping needed by reports.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub value: Vec<C64>,
    pub h: f64,
    pub range: (f64, f64),
    pub evaluations: usize,
}

/// `∫_ℝ f(y) dy` for a vector-valued integrand that decays at both ends.
///
/// Nodes are placed at `center + k h`. The range is fixed on the first pass by walking
/// outward until three consecutive values fall below `cut` times the largest norm seen; the
/// step is then halved, reusing all previous nodes, until the estimate settles.
pub fn trapezoid_scan<F>(mut f: F, center: f64, len: usize, opts: ScanOptions) -> Result<ScanResult>
where
    F: FnMut(f64) -> Result<Vec<C64>>,
{
    let mut h = opts.h;
    let mut terms = Vec::new();
    let first = f(center)?;
    let mut peak = vector::norm(&first);
    terms.push(first);
    let mut lo = 0i64;
    let mut hi = 0i64;
    for dir in [-1i64, 1] {
        let mut quiet = 0;
        let mut k = 0i64;
        loop {
            k += dir;
            if k.unsigned_abs() as usize > opts.max_steps {
                return Err(Error::NonConvergence { what: "integrand truncation", change: f64::NAN });
            }
            let v = f(center + k as f64 * h)?;
            let m = vector::norm(&v);
            if !m.is_finite() {
                return Err(Error::Domain(alloc::format!("integrand not finite at y = {}", center + k as f64 * h)));
            }
            peak = peak.max(m);
            terms.push(v);
            if m <= opts.cut * peak {
                quiet += 1;
                if quiet == 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if dir < 0 {
            lo = k;
        } else {
            hi = k;
        }
    }
    let mut evaluations = terms.len();
    let mut est = vector::scale(C64::new(h, 0.0), &pairwise_sum(terms, len));
    let (a, b) = (center + lo as f64 * h, center + hi as f64 * h);
    for _ in 0..opts.max_halvings {
        let count = (hi - lo) as usize;
        let mut mids = Vec::with_capacity(count);
        for j in 0..count {
            mids.push(f(a + (j as f64 + 0.5) * h)?);
        }
        evaluations += count;
        let mid_sum = pairwise_sum(mids, len);
        let next: Vec<C64> = est.iter().zip(&mid_sum).map(|(e, m)| e * 0.5 + m * (h * 0.5)).collect();
        let change = vector::dist(&next, &est);
        let scale = vector::norm(&next);
        est = next;
        h *= 0.5;
        if change <= opts.tol * scale || scale == 0.0 {
            return Ok(ScanResult { value: est, h, range: (a, b), evaluations });
        }
    }
    Err(Error::NonConvergence { what: "trapezoidal refinement", change: f64::NAN })
}

/// Tanh-sinh node on `[0, 1]` at parameter `u`: returns `(x, 1 - x, weight)`.
fn tanh_sinh_node(u: f64) -> (f64, f64, f64) {
    let s = FRAC_PI_2 * u.sinh();
    let e = (-2.0 * s.abs()).exp();
    let small = e / (1.0 + e);
    let (x, xc) = if s >= 0.0 { (1.0 - small, small) } else { (small, 1.0 - small) };
    let ch = s.cosh();
    let w = 0.5 * FRAC_PI_2 * u.cosh() / (ch * ch);
    (x, xc, w)
}

/// Adaptive tanh-sinh quadrature of a vector-valued integrand over `[0, 1]`.
///
/// The integrand receives both `x` and `1 - x` so that endpoint behaviour can be evaluated
/// without cancellation. Levels halve the step and reuse earlier nodes.
pub fn tanh_sinh<F>(mut f: F, len: usize, tol: f64) -> Result<Vec<C64>>
where
    F: FnMut(f64, f64) -> Result<Vec<C64>>,
{
    const U_MAX: f64 = 5.0;
    let mut h = 0.5;
    let mut terms = Vec::new();
    let mut k = -((U_MAX / h) as i64);
    while k as f64 * h <= U_MAX {
        let (x, xc, w) = tanh_sinh_node(k as f64 * h);
        if x > 0.0 && xc > 0.0 {
            terms.push(vector::scale(C64::new(w, 0.0), &f(x, xc)?));
        }
        k += 1;
    }
    let mut sum = pairwise_sum(terms, len);
    let mut est = vector::scale(C64::new(h, 0.0), &sum);
    for _ in 0..8 {
        h *= 0.5;
        let mut terms = Vec::new();
        let mut k = -((U_MAX / h) as i64) | 1;
        while k as f64 * h <= U_MAX {
            let (x, xc, w) = tanh_sinh_node(k as f64 * h);
            if x > 0.0 && xc > 0.0 {
                terms.push(vector::scale(C64::new(w, 0.0), &f(x, xc)?));
            }
            k += 2;
        }
        sum = vector::add(&sum, &pairwise_sum(terms, len));
        let next = vector::scale(C64::new(h, 0.0), &sum);
        let change = vector::dist(&next, &est);
        est = next;
        if change <= tol * vector::norm(&est).max(f64::MIN_POSITIVE) {
            return Ok(est);
        }
    }
    Err(Error::NonConvergence { what: "tanh-sinh quadrature", change: f64::NAN })
}
