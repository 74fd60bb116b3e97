//! Modified Bessel functions `I_ν` and `K_ν` of complex order and argument in the open right
//! half-plane.

use alloc::format;
use core::f64::consts::{FRAC_PI_2, PI};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::dd::{pochhammer_series, series_loss};
use super::gamma::{rgamma, sin_pi};
use crate::error::{Error, Result};
use crate::C64;

/// Modulus above which both functions switch to their large-argument expansions.
pub const Z_SWITCH: f64 = 25.0;
/// Modulus up to which `K_ν` uses the connection formula.
pub const K_CONNECTION_MAX: f64 = 2.0;
/// Minimum distance of the order from the negative integers.
pub const ORDER_GUARD: f64 = 1e-6;

fn check_argument(z: C64) -> Result<()> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("argument {z} must be finite and non-zero")));
    }
    if z.arg().abs() >= FRAC_PI_2 {
        return Err(Error::Domain(format!("|arg z| must be below pi/2, got z = {z}")));
    }
    Ok(())
}

fn check_order(nu: C64) -> Result<()> {
    if !(nu.re > -2.0 && nu.re < 2.0) {
        return Err(Error::Domain(format!("order {nu} outside -2 < Re < 2")));
    }
    let k = nu.re.round();
    if k < 0.0 && C64::new(nu.re - k, nu.im).norm() < ORDER_GUARD {
        return Err(Error::Domain(format!("order {nu} too close to a negative integer")));
    }
    Ok(())
}

/// Cancellation (in units of e-folds) above which series switch to double-double.
pub(crate) const DD_LOSS: f64 = 2.0;

/// Power series `(z/2)^ν Σ (z²/4)^k / (k! Γ(ν+k+1))`.
pub(crate) fn i_series(nu: C64, z: C64) -> C64 {
    if series_loss(z) > DD_LOSS {
        return (z / 2.0).powc(nu) * rgamma(nu + 1.0) * pochhammer_series(nu, z);
    }
    let q = z * z / 4.0;
    let mut term = rgamma(nu + 1.0);
    let mut sum = term;
    let peak = q.norm().sqrt();
    for k in 1..2000 {
        let kf = k as f64;
        term = term * q / (kf * (nu + kf));
        sum += term;
        if kf > peak && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    (z / 2.0).powc(nu) * sum
}

/// Sums of the Hankel coefficients `a_k(ν)/z^k`, with and without alternating signs.
fn hankel_sums(nu: C64, z: C64) -> (C64, C64) {
    let mu = 4.0 * nu * nu;
    let mut term = C64::new(1.0, 0.0);
    let mut plus = term;
    let mut minus = term;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term = term * (mu - odd * odd) / (kf * 8.0 * z);
        let m = term.norm();
        if m > last {
            break;
        }
        plus += term;
        minus += if k % 2 == 1 { -term } else { term };
        if m <= 1e-17 * plus.norm().min(minus.norm()) {
            break;
        }
        last = m;
    }
    (plus, minus)
}

fn i_asymptotic(nu: C64, z: C64) -> C64 {
    let (plus, minus) = hankel_sums(nu, z);
    let pref = 1.0 / (2.0 * PI * z).sqrt();
    let i = C64::new(0.0, 1.0);
    let recessive = if z.im > 0.0 {
        i * (i * PI * nu).exp()
    } else if z.im < 0.0 {
        -i * (-i * PI * nu).exp()
    } else {
        -sin_pi(nu)
    };
    pref * (z.exp() * minus + recessive * (-z).exp() * plus)
}

fn k_asymptotic(nu: C64, z: C64) -> C64 {
    let (plus, _) = hankel_sums(nu, z);
    (PI / (2.0 * z)).sqrt() * (-z).exp() * plus
}

/// `K_ν(z) = ∫₀^∞ exp(-z cosh t) cosh(νt) dt` by the trapezoidal rule. The step is set from
/// a strip of half the admissible width, paying for the growth of the integrand inside it.
pub(crate) fn k_integral(nu: C64, z: C64) -> Result<C64> {
    let theta = z.arg().abs();
    let s = 0.5 * (FRAC_PI_2 - theta);
    let growth = z.norm() * (theta.cos() - (theta + s).cos()) + s * nu.im.abs();
    let h = (2.0 * PI * s / (40.0 + growth)).min(0.25);
    let f = |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh();
    let mut sum = f(0.0) * 0.5;
    let turn = nu.re.abs() / z.re;
    for k in 1..400_000 {
        let t = k as f64 * h;
        let term = f(t);
        sum += term;
        if t.sinh() > turn && term.norm() <= 1e-18 * sum.norm() {
            return Ok(sum * h);
        }
    }
    Err(Error::Cancellation { digits: f64::INFINITY })
}

/// Modified Bessel function of the first kind, `-2 < Re ν < 2`, `|arg z| < π/2`.
pub fn bessel_i(nu: C64, z: C64) -> Result<C64> {
    check_order(nu)?;
    check_argument(z)?;
    if z.norm() <= Z_SWITCH {
        Ok(i_series(nu, z))
    } else {
        Ok(i_asymptotic(nu, z))
    }
}

/// Modified Bessel function of the second kind for `|Re ν| < 1`, `|arg z| < π/2`.
///
/// Small arguments use `π/(2 sin νπ) (I_{-ν} - I_ν)`; from `K_CONNECTION_MAX` up to
/// `Z_SWITCH` the integral representation is summed directly, and beyond that the Hankel
/// expansion of `K` itself is used. Neither of the latter two subtracts growing terms.
pub fn bessel_k(nu: C64, z: C64) -> Result<C64> {
    if !(nu.re.abs() < 1.0) {
        return Err(Error::Domain(format!("order {nu} outside |Re| < 1")));
    }
    check_argument(z)?;
    let nu = if nu.re < 0.0 { -nu } else { nu };
    let r = z.norm();
    if r > Z_SWITCH {
        return Ok(k_asymptotic(nu, z));
    }
    if r <= K_CONNECTION_MAX {
        let s = sin_pi(nu);
        if s.norm() > 1e-12 {
            let im = i_series(-nu, z);
            let ip = i_series(nu, z);
            let diff = im - ip;
            let digits = (im.norm().max(ip.norm()) / diff.norm()).log10();
            if digits.is_finite() && digits <= 6.0 {
                return Ok(PI / (2.0 * s) * diff);
            }
        }
    }
    k_integral(nu, z)
}
