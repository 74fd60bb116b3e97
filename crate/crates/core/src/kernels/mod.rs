//! Scalar special functions and the Bessel kernels `u_z`, `v_z`, `w_z` that generate the
//! harmonic extension.
//!
//! All kernels are written in terms of the product `x = λz`. For an order `b` with
//! `0 < Re b < 1`,
//!
//! ```text
//! u_z(λ) = x^b K_b(x) / (2^(b-1) Γ(b)),
//! v_z(λ) = Γ(1-α) 2^(-α) x^α I_{-α}(x),
//! w_z(λ) = Γ(α) 2^(α-1) (z/λ)^α I_α(x).
//! ```
//!
//! Every function here is pure and may be called concurrently.

mod bessel;
mod dd;
mod gamma;

pub use bessel::{bessel_i, bessel_k, K_CONNECTION_MAX, ORDER_GUARD, Z_SWITCH};
pub use gamma::{gamma_fn, rgamma, POLE_GUARD};

use alloc::format;
use core::f64::consts::{FRAC_PI_2, PI};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

/// Fractional order `α` with `0 < Re α < 1`, kept a guard band away from the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(C64);

impl FracOrder {
    /// Default distance of `Re α` from 0 and 1.
    pub const GUARD: f64 = 1e-3;

    pub fn new(alpha: C64) -> Result<Self> {
        Self::with_guard(alpha, Self::GUARD)
    }

    pub fn with_guard(alpha: C64, guard: f64) -> Result<Self> {
        if alpha.im.is_finite() && alpha.re >= guard && alpha.re <= 1.0 - guard {
            Ok(FracOrder(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0))
    }

    pub fn value(self) -> C64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    /// The order `α - 1` used by the Neumann kernel.
    pub fn shifted(self) -> KernelOrder {
        KernelOrder(self.0 - 1.0)
    }
}

/// Order of the kernel `u_z`; either a [`FracOrder`] or its shift by `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOrder(C64);

impl KernelOrder {
    pub fn value(self) -> C64 {
        self.0
    }

    /// The order `b` with `Re b > 0` entering `x^b K_b(x)`; `u_{z,a}` only depends on `|a|`.
    pub fn reflected(self) -> C64 {
        if self.0.re > 0.0 {
            self.0
        } else {
            -self.0
        }
    }
}

impl From<FracOrder> for KernelOrder {
    fn from(a: FracOrder) -> Self {
        KernelOrder(a.0)
    }
}

/// Evaluation point of the kernels: extension variable `z`, spectral variable `λ`, operator
/// sector half-angle `ω` and sector margin `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    z: C64,
    lambda: C64,
    omega: f64,
    delta: f64,
}

impl SectorPoint {
    pub fn new(z: C64, lambda: C64, omega: f64, delta: f64) -> Result<Self> {
        if !(0.0..PI).contains(&omega) {
            return Err(Error::Domain(format!("sector angle {omega} outside [0, pi)")));
        }
        if z.norm() == 0.0 || z.arg().abs() >= FRAC_PI_2 - omega / 2.0 {
            return Err(Error::Domain(format!("z = {z} outside the sector of half-angle pi/2 - omega/2")));
        }
        if !(delta > 0.0 && delta < FRAC_PI_2 - omega / 2.0 - z.arg().abs()) {
            return Err(Error::Domain(format!("sector margin {delta} out of range for z = {z}")));
        }
        if lambda.norm() != 0.0 && lambda.arg().abs() >= omega / 2.0 + delta {
            return Err(Error::Domain(format!("lambda = {lambda} outside the sector")));
        }
        Ok(SectorPoint { z, lambda, omega, delta })
    }

    /// Point on the positive axes with `ω = 0` and a margin halfway to the admissible bound.
    pub fn real(z: f64, lambda: f64) -> Result<Self> {
        Self::new(C64::new(z, 0.0), C64::new(lambda, 0.0), 0.0, FRAC_PI_4_HALF)
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

const FRAC_PI_4_HALF: f64 = core::f64::consts::FRAC_PI_4;

/// `c_α = Γ(1-α) / (2^(2α-1) Γ(α))`.
pub fn c_alpha(alpha: FracOrder) -> C64 {
    let a = alpha.0;
    gamma_fn(1.0 - a).unwrap_or(C64::new(f64::NAN, 0.0))
        * rgamma(a)
        / C64::new(2.0, 0.0).powc(2.0 * a - 1.0)
}

/// `x^b K_b(x) / (2^(b-1) Γ(b))` for `Re b ∈ (0, 1)`, continuous at `x = 0` with value 1.
pub fn u_product(b: C64, x: C64) -> Result<C64> {
    if x.norm() == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if x.norm() <= K_CONNECTION_MAX {
        return Ok(u_series(b, x));
    }
    let k = bessel_k(b, x)?;
    Ok(x.powc(b) * k * rgamma(b) / C64::new(2.0, 0.0).powc(b - 1.0))
}

/// `Γ(1-b) [Σ q^k/(k! Γ(k+1-b)) - 4^(-b) x^(2b) Σ q^k/(k! Γ(k+1+b))]`, `q = x²/4`.
fn u_series(b: C64, x: C64) -> C64 {
    let q = x * x / 4.0;
    let mut t1 = rgamma(1.0 - b);
    let mut t2 = rgamma(1.0 + b);
    let mut s1 = t1;
    let mut s2 = t2;
    for k in 1..200 {
        let kf = k as f64;
        t1 = t1 * q / (kf * (kf - b));
        t2 = t2 * q / (kf * (kf + b));
        s1 += t1;
        s2 += t2;
        if t1.norm() <= 1e-17 * s1.norm() && t2.norm() <= 1e-17 * s2.norm() {
            break;
        }
    }
    let g = gamma_fn(1.0 - b).unwrap_or(C64::new(f64::NAN, 0.0));
    g * (s1 - C64::new(4.0, 0.0).powc(-b) * x.powc(2.0 * b) * s2)
}

/// The extension kernel `u_z(λ)` of order `α` (or `α - 1`).
pub fn kernel_u(order: impl Into<KernelOrder>, p: &SectorPoint) -> Result<C64> {
    let b = order.into().reflected();
    u_product(b, p.lambda * p.z)
}

/// `c_α λ^(2α) u_{z,α-1}(λ)`, which equals `-z^(1-2α) ∂_z u_z(λ)`.
pub fn kernel_u_neumann(alpha: FracOrder, p: &SectorPoint) -> Result<C64> {
    neumann_product(alpha, p.z, p.lambda)
}

pub(crate) fn neumann_product(alpha: FracOrder, z: C64, lambda: C64) -> Result<C64> {
    if lambda.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let a = alpha.value();
    let u_shift = u_product(1.0 - a, lambda * z)?;
    Ok(c_alpha(alpha) * lambda.powc(2.0 * a) * u_shift)
}

/// `v_z(λ) = Γ(1-α) Σ (λz/2)^(2k) / (k! Γ(k+1-α))`.
pub fn kernel_v(alpha: FracOrder, p: &SectorPoint) -> Result<C64> {
    v_product(alpha, p.z * p.lambda)
}

/// `w_z(λ) = Γ(α)/2 · z^(2α) Σ (λz/2)^(2k) / (k! Γ(α+k+1))`.
pub fn kernel_w(alpha: FracOrder, p: &SectorPoint) -> Result<C64> {
    w_value(alpha, p.z, p.lambda)
}

pub(crate) fn v_product(alpha: FracOrder, x: C64) -> Result<C64> {
    let a = alpha.value();
    let g = gamma_fn(1.0 - a)?;
    if x.norm() > Z_SWITCH {
        let i = bessel_i(-a, x)?;
        return Ok(g / C64::new(2.0, 0.0).powc(a) * x.powc(a) * i);
    }
    Ok(g * even_series(-a, x))
}

pub(crate) fn w_value(alpha: FracOrder, z: C64, lambda: C64) -> Result<C64> {
    let a = alpha.value();
    let g = gamma_fn(a)?;
    let x = z * lambda;
    if x.norm() > Z_SWITCH {
        let i = bessel_i(a, x)?;
        return Ok(g / C64::new(2.0, 0.0).powc(1.0 - a) * (z / lambda).powc(a) * i);
    }
    Ok(g / 2.0 * z.powc(2.0 * a) * even_series(a, x))
}

/// `Σ (x²/4)^k / (k! Γ(k+1+ν))`.
fn even_series(nu: C64, x: C64) -> C64 {
    if dd::series_loss(x) > bessel::DD_LOSS {
        return rgamma(1.0 + nu) * dd::pochhammer_series(nu, x);
    }
    let q = x * x / 4.0;
    let mut t = rgamma(1.0 + nu);
    let mut s = t;
    let peak = q.norm().sqrt();
    for k in 1..2000 {
        let kf = k as f64;
        t = t * q / (kf * (kf + nu));
        s += t;
        if kf > peak && t.norm() <= 1e-17 * s.norm() {
            break;
        }
    }
    s
}

/// `|I_{-α}(z) I_{α-1}(z) - I_{1-α}(z) I_α(z) - 2 sin(απ)/(πz)|`.
pub fn wronskian_residual(alpha: FracOrder, z: C64) -> Result<f64> {
    Ok(wronskian_parts(alpha, z)?.0)
}

/// Wronskian residual divided by `1 + |I_{-α}(z) I_{α-1}(z)|`.
pub fn wronskian_relative(alpha: FracOrder, z: C64) -> Result<f64> {
    let (res, scale) = wronskian_parts(alpha, z)?;
    Ok(res / (1.0 + scale))
}

fn wronskian_parts(alpha: FracOrder, z: C64) -> Result<(f64, f64)> {
    let a = alpha.value();
    let p1 = bessel_i(-a, z)? * bessel_i(a - 1.0, z)?;
    let p2 = bessel_i(1.0 - a, z)? * bessel_i(a, z)?;
    let target = 2.0 * gamma::sin_pi(a) / (z * PI);
    Ok(((p1 - p2 - target).norm(), p1.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn order_guard_band() {
        assert!(FracOrder::real(0.0005).is_err());
        assert!(FracOrder::real(0.9995).is_err());
        assert!(FracOrder::real(0.001).is_ok());
        assert!(FracOrder::new(C64::new(0.4, 3.0)).is_ok());
        assert!(FracOrder::new(C64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn sector_point_validation() {
        assert!(SectorPoint::new(C64::new(1.0, 0.0), c(1.0), 0.0, 0.5).is_ok());
        // z outside pi/2 - omega/2
        assert!(SectorPoint::new(C64::from_polar(1.0, 1.2), c(1.0), 1.0, 0.01).is_err());
        // lambda outside omega/2 + delta
        assert!(SectorPoint::new(c(1.0), C64::from_polar(1.0, 0.8), 0.5, 0.2).is_err());
        assert!(SectorPoint::new(c(1.0), c(0.0), 0.5, 0.2).is_ok());
    }

    #[test]
    fn c_alpha_values() {
        let half = FracOrder::real(0.5).unwrap();
        assert!((c_alpha(half) - c(1.0)).norm() < 1e-15);
        // 30-digit reference
        let q = FracOrder::real(0.25).unwrap();
        assert!(rel(c_alpha(q), c(0.477_988_797_486_125)) < 1e-14);
        for a in [0.5 - 1e-6, 0.5 + 1e-6] {
            assert!((c_alpha(FracOrder::real(a).unwrap()) - c(1.0)).norm() <= 1e-5);
        }
    }

    #[test]
    fn half_order_kernels_collapse_to_exponentials() {
        let a = FracOrder::real(0.5).unwrap();
        let p = SectorPoint::real(1.0, 1.0).unwrap();
        assert!(rel(kernel_u(a, &p).unwrap(), c((-1f64).exp())) < 1e-15);
        assert!(rel(kernel_u_neumann(a, &p).unwrap(), c((-1f64).exp())) < 1e-14);
        for (z, l) in [(0.3, 2.0), (1.0, 7.5), (2.0, 20.0)] {
            let p = SectorPoint::real(z, l).unwrap();
            let x = z * l;
            assert!(rel(kernel_u(a, &p).unwrap(), c((-x).exp())) < 1e-12);
            assert!(rel(kernel_v(a, &p).unwrap(), c(x.cosh())) < 1e-12);
            assert!(rel(kernel_w(a, &p).unwrap(), c(x.sinh() / l)) < 1e-12);
        }
    }

    #[test]
    fn limits_at_lambda_zero() {
        let a = FracOrder::real(0.3).unwrap();
        let p = SectorPoint::real(1.7, 0.0).unwrap();
        assert_eq!(kernel_u(a, &p).unwrap(), c(1.0));
        assert_eq!(kernel_v(a, &p).unwrap(), c(1.0));
        let want = 1.7f64.powf(0.6) / 0.6;
        assert!(rel(kernel_w(a, &p).unwrap(), c(want)) < 1e-14);
    }

    #[test]
    fn neumann_kernel_small_z_limit() {
        let a = FracOrder::real(0.3).unwrap();
        let p = SectorPoint::real(1e-4, 1.0).unwrap();
        let got = kernel_u_neumann(a, &p).unwrap();
        let tol = 10f64.powf((2.0 - 0.6) * -4.0 + 1.0);
        assert!((got - c_alpha(a)).norm() <= tol);
    }

    #[test]
    fn wronskian_examples() {
        let half = FracOrder::real(0.5).unwrap();
        assert!(wronskian_residual(half, c(1.0)).unwrap() < 1e-15);
        let q = FracOrder::real(0.25).unwrap();
        assert!(wronskian_relative(q, c(3.0)).unwrap() <= 1e-11);
        let t = FracOrder::real(0.75).unwrap();
        assert!(wronskian_relative(t, C64::new(0.5, 0.2)).unwrap() <= 1e-11);
    }

    #[test]
    fn kernel_routes_meet_at_the_series_boundary() {
        for b in [0.1, 0.3, 0.7, 0.95] {
            for arg in [0.0, 0.5, 1.1] {
                let lo = u_product(c(b), C64::from_polar(K_CONNECTION_MAX, arg)).unwrap();
                let hi = u_product(c(b), C64::from_polar(K_CONNECTION_MAX * (1.0 + 1e-12), arg)).unwrap();
                assert!(rel(lo, hi) < 1e-11, "b = {b}, arg = {arg}");
            }
        }
    }
}
