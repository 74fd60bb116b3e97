//! Limits and convergence orders from sampled sequences `y(t) ≈ L + C t^p`.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::vector;
use crate::C64;

/// Order estimated from three samples at decreasing `t`, using the norms of successive
/// differences. Exact for `y = L + C t^p` on a geometric schedule.
pub fn three_point_order(t: [f64; 3], y: [&[C64]; 3]) -> f64 {
    let d1 = vector::dist(y[1], y[0]);
    let d2 = vector::dist(y[2], y[1]);
    // d1/d2 = (t0^p - t1^p)/(t1^p - t2^p); solve by bisection in p.
    let target = d1 / d2;
    let g = |p: f64| (t[0].powf(p) - t[1].powf(p)) / (t[1].powf(p) - t[2].powf(p));
    let (mut a, mut b) = (1e-3, 8.0);
    if !target.is_finite() || target <= g(a) || target >= g(b) {
        return f64::NAN;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Limit `L` eliminating a single term `C t^p` from the last two samples.
pub fn eliminate(t: [f64; 2], y: [&[C64]; 2], p: f64) -> Vec<C64> {
    let (a, b) = (t[0].powf(p), t[1].powf(p));
    y[0].iter()
        .zip(y[1])
        .map(|(y0, y1)| (y1 * a - y0 * b) / (a - b))
        .collect()
}

/// Limit from the last three samples, eliminating `C₁ t^{p₁} + C₂ t^{p₂}` for known exponents.
pub fn richardson_limit(t: &[f64], y: &[Vec<C64>], p: [C64; 2]) -> Result<Vec<C64>> {
    let n = t.len();
    if n < 3 || y.len() != n {
        return Err(Error::Precondition(alloc::string::String::from("need at least three samples")));
    }
    let ts = [t[n - 3], t[n - 2], t[n - 1]];
    let a: Vec<C64> = ts.iter().map(|&s| C64::new(s, 0.0).powc(p[0])).collect();
    let b: Vec<C64> = ts.iter().map(|&s| C64::new(s, 0.0).powc(p[1])).collect();
    // first row of the inverse of [1, a_i, b_i] by cofactors
    let w = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let det = w[0] + w[1] + w[2];
    if !(det.norm() > 0.0) || (p[0] - p[1]).norm() == 0.0 {
        return Err(Error::ExtrapolationUnstable { residual: f64::INFINITY });
    }
    let w = w.map(|v| v / det);
    Ok((0..y[n - 1].len()).map(|k| y[n - 3][k] * w[0] + y[n - 2][k] * w[1] + y[n - 1][k] * w[2]).collect())
}

/// Least-squares line through `(ln x, ln y)`: returns `(slope, intercept, rms residual)`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::ExtrapolationUnstable { residual: f64::INFINITY });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::ExtrapolationUnstable { residual: f64::INFINITY });
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    Ok((slope, icpt, (rss / m).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn recovers_order_and_limit() {
        let t: Vec<f64> = (4..12).map(|k| 0.5f64.powi(k)).collect();
        let y: Vec<Vec<C64>> = t
            .iter()
            .map(|&s| vec![C64::new(2.0 + 3.0 * s.powf(1.5), -1.0 + s.powf(1.5))])
            .collect();
        let n = y.len();
        assert!((three_point_order([t[n - 3], t[n - 2], t[n - 1]], [&y[n - 3], &y[n - 2], &y[n - 1]]) - 1.5).abs() < 1e-8);
        let l = eliminate([t[n - 2], t[n - 1]], [&y[n - 2], &y[n - 1]], 1.5);
        assert!((l[0] - C64::new(2.0, -1.0)).norm() < 1e-12);
        let e: Vec<f64> = y.iter().map(|v| vector::dist(v, &l)).collect();
        let (slope, _, res) = loglog_fit(&t, &e).unwrap();
        assert!((slope - 1.5).abs() < 1e-8 && res < 1e-8);
    }

    #[test]
    fn two_known_exponents_removed() {
        let t: Vec<f64> = (4..10).map(|k| 0.5f64.powi(k)).collect();
        let p = [C64::new(1.8, 0.0), C64::new(2.0, 0.0)];
        let y: Vec<Vec<C64>> = t.iter().map(|&s| vec![C64::new(1.0 + 5.0 * s.powf(1.8) - 40.0 * s * s + s.powi(4), 0.0)]).collect();
        let l = richardson_limit(&t, &y, p).unwrap();
        let tn = t[t.len() - 3];
        assert!((l[0] - C64::new(1.0, 0.0)).norm() < 10.0 * tn.powi(4));
    }
}
