//! Kernel identity suite: Wronskian, half-order closed forms and small-argument expansion
//! coefficients, swept over the fractional order.

use std::f64::consts::FRAC_PI_2;

use sectorial_core::kernels::{gamma_fn, kernel_u, kernel_v, kernel_w, wronskian_relative, FracOrder, SectorPoint};
use sectorial_core::{Result, C64};

pub const IDENTITIES: [&str; 3] = ["wronskian", "closed_forms", "expansion"];

pub const WRONSKIAN_TOL: f64 = 1e-11;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const EXPANSION_TOL: f64 = 1e-4;

/// Size of an injected fault, far above every tolerance.
const FAULT: f64 = 1e-3;

/// One identity at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub identity: &'static str,
    pub alpha: f64,
    pub max_error: f64,
    pub tolerance: f64,
    pub assertions: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

pub fn default_alphas() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn wronskian(alpha: FracOrder) -> Result<(f64, usize)> {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for r in [0.05, 0.5, 2.0, 8.0, 20.0, 40.0] {
        for arg in [-1.4, -0.7, 0.0, 0.7, 1.4] {
            worst = worst.max(wronskian_relative(alpha, C64::from_polar(r, arg))?);
            count += 1;
        }
    }
    Ok((worst, count))
}

fn closed_forms() -> Result<(f64, usize)> {
    let h = FracOrder::real(0.5)?;
    let mut worst = 0.0_f64;
    let mut count = 0;
    for l in [0.1, 1.0, 5.0] {
        for r in [0.01, 0.5, 3.0, 8.0] {
            for arg in [-1.2, 0.0, 1.2] {
                let z = C64::from_polar(r, arg);
                let p = SectorPoint::new(z, c(l), 0.0, 0.5 * (FRAC_PI_2 - arg.abs()))?;
                let x = z * l;
                worst = worst
                    .max(rel(kernel_u(h, &p)?, (-x).exp()))
                    .max(rel(kernel_v(h, &p)?, x.cosh()))
                    .max(rel(kernel_w(h, &p)?, x.sinh() / l));
                count += 3;
            }
        }
    }
    Ok((worst, count))
}

/// Weighted least-squares fit of `1 - u(x) = C x^{2α} + D x²` on `x ∈ [10⁻⁴, 10⁻²]`,
/// compared with `C = Γ(1-α) / (4^α Γ(1+α))`.
fn expansion(alpha: FracOrder) -> Result<(f64, usize)> {
    let al = alpha.re();
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..21 {
        let x = 10f64.powf(-4.0 + 0.1 * i as f64);
        let y = 1.0 - kernel_u(alpha, &SectorPoint::real(1.0, x)?)?.re;
        let (f1, f2) = (x.powf(2.0 * al), x * x);
        let w = 1.0 / (f1 * f1);
        s11 += w * f1 * f1;
        s12 += w * f1 * f2;
        s22 += w * f2 * f2;
        b1 += w * f1 * y;
        b2 += w * f2 * y;
    }
    let fitted = (b1 * s22 - b2 * s12) / (s11 * s22 - s12 * s12);
    let want = (gamma_fn(c(1.0 - al))? / (4f64.powf(al) * gamma_fn(c(1.0 + al))?)).re;
    Ok(((fitted / want - 1.0).abs(), 1))
}

/// Runs every identity; `fault` names an identity whose errors are inflated past tolerance.
pub fn run(alphas: &[f64], fault: Option<&str>) -> Result<Vec<Check>> {
    let bump = |name: &str, e: f64| if fault == Some(name) { e + FAULT } else { e };
    let mut out = Vec::new();
    for &a in alphas {
        let alpha = FracOrder::real(a)?;
        let (e, n) = wronskian(alpha)?;
        out.push(Check { identity: "wronskian", alpha: a, max_error: bump("wronskian", e), tolerance: WRONSKIAN_TOL, assertions: n });
        let (e, n) = expansion(alpha)?;
        out.push(Check { identity: "expansion", alpha: a, max_error: bump("expansion", e), tolerance: EXPANSION_TOL, assertions: n });
    }
    let (e, n) = closed_forms()?;
    out.push(Check { identity: "closed_forms", alpha: 0.5, max_error: bump("closed_forms", e), tolerance: CLOSED_FORM_TOL, assertions: n });
    Ok(out)
}

/// Per-check table, per-order summary and assertion count.
pub fn render(checks: &[Check], alphas: &[f64]) -> String {
    let mut s = String::from("identity,alpha,max_error,tolerance,assertions,status\n");
    for ch in checks {
        s.push_str(&format!(
            "{},{},{:e},{:e},{},{}\n",
            ch.identity,
            ch.alpha,
            ch.max_error,
            ch.tolerance,
            ch.assertions,
            if ch.passed() { "pass" } else { "FAIL" }
        ));
    }
    s.push_str("\nalpha,status\n");
    for &a in alphas {
        let ok = checks.iter().filter(|c| c.alpha == a).all(Check::passed);
        s.push_str(&format!("{a},{}\n", if ok { "pass" } else { "FAIL" }));
    }
    let total: usize = checks.iter().map(|c| c.assertions).sum();
    let failed = checks.iter().filter(|c| !c.passed()).count();
    s.push_str(&format!("\nassertions: {total}\nfailed checks: {failed}\n"));
    s
}
