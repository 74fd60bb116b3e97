//! Small helpers for complex vectors stored as `Vec<C64>`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::C64;

pub fn norm(x: &[C64]) -> f64 {
    if x.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
        return f64::NAN;
    }
    // scaled to avoid overflow for large entries
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

pub fn scale(s: C64, x: &[C64]) -> Vec<C64> {
    x.iter().map(|v| s * v).collect()
}

pub fn axpy(y: &mut [C64], s: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    norm(&sub(a, b))
}

/// Relative distance `|a - b| / |b|`, falling back to the absolute distance when `b = 0`.
pub fn rel_dist(a: &[C64], b: &[C64]) -> f64 {
    let d = dist(a, b);
    let nb = norm(b);
    if nb > 0.0 {
        d / nb
    } else {
        d
    }
}

pub fn from_real(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// Sums equally sized vectors by a balanced binary tree so the rounding pattern depends only on
/// the number of terms, not on how they were produced.
pub fn pairwise_sum(mut terms: Vec<Vec<C64>>, len: usize) -> Vec<C64> {
    if terms.is_empty() {
        return vec![C64::new(0.0, 0.0); len];
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(add(&a, &b)),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap_or_else(|| vec![C64::new(0.0, 0.0); len])
}
