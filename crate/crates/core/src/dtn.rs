//! The generalized Dirichlet-to-Neumann map `T_α x = lim_{t→0+} -t^{1-2α}u'(t)` and its
//! comparison with `c_α A^α x`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::calculus::{apply_regularized, frac_power, regularizer_shift, scalar_fn, ContourSpec};
use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::kernels::{c_alpha, u_product, FracOrder};
use crate::operators::OperatorHandle;
use crate::richardson::{loglog_fit, richardson_limit};
use crate::vector;
use crate::C64;

/// `-t^{1-2α} U'(t)x = c_α [λ ↦ λ^α u_{t,α-1}(√λ)](A)x`.
///
/// Regularized by `(σ+λ)⁻¹` with `σ` at the top of the spectrum: at small `t` the bare
/// integrand grows like `λ^α` up to `λ ~ t⁻²` before the kernel cuts it off, and the
/// regularizer keeps the quadrature terms at the size of the result.
pub fn dtn_apply(a: &OperatorHandle, alpha: FracOrder, x: &[C64], t: f64, contour: &ContourSpec) -> Result<Vec<C64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let al = alpha.value();
    let b = 1.0 - al;
    let g = scalar_fn(move |l: C64| Ok(l.powc(al) * u_product(b, l.sqrt() * t)?));
    let y = apply_regularized(&g, regularizer_shift(a), 1, a, x, contour)?;
    Ok(vector::scale(c_alpha(alpha), &y))
}

/// `t = 2^{-k}`, `k = 4..=20`.
pub fn default_schedule() -> Vec<f64> {
    (4..=20).map(|k| 0.5f64.powi(k)).collect()
}

/// Minimum number of schedule points accepted by [`dtn_limit`].
pub const MIN_SCHEDULE: usize = 6;
/// Largest acceptable rms residual of the log-log order fit.
pub const FIT_RESIDUAL_MAX: f64 = 0.5;

/// Neumann samples, their extrapolated limit and the comparison with `c_α A^α x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtNResult {
    pub alpha: FracOrder,
    pub t_schedule: Vec<f64>,
    pub neumann_samples: Vec<Vec<C64>>,
    pub extrapolated_limit: Vec<C64>,
    pub reference: Vec<C64>,
    pub rel_error: f64,
    /// Slope of `log ‖N(t) - L‖` against `log t` over the two smallest decades.
    pub observed_order: f64,
    pub fit_residual: f64,
    /// Leading order eliminated by the three-point extrapolation, alongside `t²`.
    pub extrapolation_order: f64,
}

impl DtNResult {
    pub fn expected_order(&self) -> f64 {
        2.0 - 2.0 * self.alpha.re()
    }
}

pub fn dtn_limit(a: &OperatorHandle, alpha: FracOrder, x: &[C64], schedule: &[f64], contour: &ContourSpec) -> Result<DtNResult> {
    dtn_limit_with(&Sequential, a, alpha, x, schedule, contour)
}

/// Samples `-t^{1-2α}u'(t)` along a decreasing schedule, extrapolates `t → 0` and compares
/// with `c_α A^α x` from the contour calculus.
pub fn dtn_limit_with<E: Executor>(
    exec: &E,
    a: &OperatorHandle,
    alpha: FracOrder,
    x: &[C64],
    schedule: &[f64],
    contour: &ContourSpec,
) -> Result<DtNResult> {
    if schedule.len() < MIN_SCHEDULE {
        return Err(Error::Precondition(format!("schedule too short: {} points, need {MIN_SCHEDULE}", schedule.len())));
    }
    if schedule.iter().any(|&t| !(t > 0.0 && t.is_finite())) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition(String::from("schedule must be positive and strictly decreasing")));
    }
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: x.len() });
    }
    let samples: Result<Vec<Vec<C64>>> = exec
        .map_indexed(schedule.len(), |i| dtn_apply(a, alpha, x, schedule[i], contour))
        .into_iter()
        .collect();
    let samples = samples?;
    // the Neumann kernel expands in t^{2-2α} and t²
    let exponents = [2.0 - 2.0 * alpha.value(), C64::new(2.0, 0.0)];
    let limit = richardson_limit(schedule, &samples, exponents)?;
    let reference = vector::scale(c_alpha(alpha), &frac_power(a, alpha, x, contour)?);
    let rel_error = vector::rel_dist(&limit, &reference);

    let t_min = *schedule.last().unwrap_or(&0.0);
    let scale = vector::norm(&limit);
    let (mut ts, mut ds) = (Vec::new(), Vec::new());
    for (t, s) in schedule.iter().zip(&samples) {
        let d = vector::dist(s, &limit);
        // samples at the rounding floor carry no order information
        if *t <= 100.0 * t_min * (1.0 + 1e-12) && d > 1e-13 * scale {
            ts.push(*t);
            ds.push(d);
        }
    }
    let (observed_order, fit_residual) = if ts.len() >= 3 {
        let (slope, _, res) = loglog_fit(&ts, &ds)?;
        if res > FIT_RESIDUAL_MAX {
            return Err(Error::ExtrapolationUnstable { residual: res });
        }
        (slope, res)
    } else if samples.iter().all(|s| vector::dist(s, &limit) == 0.0) {
        (f64::NAN, 0.0)
    } else {
        return Err(Error::ExtrapolationUnstable { residual: f64::INFINITY });
    };
    Ok(DtNResult {
        alpha,
        t_schedule: schedule.to_vec(),
        neumann_samples: samples,
        extrapolated_limit: limit,
        reference,
        rel_error,
        observed_order,
        fit_residual,
        extrapolation_order: exponents[0].re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_is_dyadic() {
        let s = default_schedule();
        assert_eq!(s.len(), 17);
        assert_eq!(s[0], 1.0 / 16.0);
        assert_eq!(*s.last().unwrap(), 2f64.powi(-20));
        assert!(s.len() >= MIN_SCHEDULE);
    }

    #[test]
    fn zero_data_gives_zero_limit() {
        let a = OperatorHandle::diagonal(alloc::vec![C64::new(1.0, 0.0), C64::new(5.0, 0.0)], 0.0).unwrap();
        let al = FracOrder::real(0.4).unwrap();
        let zero = [C64::new(0.0, 0.0); 2];
        let r = dtn_limit(&a, al, &zero, &default_schedule(), &ContourSpec::default()).unwrap();
        assert_eq!(vector::norm(&r.extrapolated_limit), 0.0);
        assert!(r.observed_order.is_nan());
    }
}
