use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Minimum admissible distance from a pole of `Γ`.
pub const POLE_GUARD: f64 = 1e-8;

fn lanczos(w: C64) -> C64 {
    // Γ(w) for Re w >= 0.5
    let z = w - 1.0;
    let mut acc = C64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log_part = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * log_part.exp() * acc
}

/// `sin(π w)` with the integer part removed first, accurate close to the integers.
pub(crate) fn sin_pi(w: C64) -> C64 {
    let k = w.re.round();
    let r = C64::new(w.re - k, w.im);
    let s = (r * PI).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn pole_distance(w: C64) -> f64 {
    let k = w.re.round();
    if k <= 0.0 {
        C64::new(w.re - k, w.im).norm()
    } else {
        f64::INFINITY
    }
}

/// Complex Gamma function; the reflection formula covers `Re w < 1/2`.
pub fn gamma_fn(w: C64) -> Result<C64> {
    let distance = pole_distance(w);
    if distance < POLE_GUARD {
        return Err(Error::PoleProximity { at: w, distance });
    }
    if w.re < 0.5 {
        Ok(PI / (sin_pi(w) * lanczos(1.0 - w)))
    } else {
        Ok(lanczos(w))
    }
}

/// Reciprocal Gamma function, entire; exactly zero at the non-positive integers.
pub fn rgamma(w: C64) -> C64 {
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
        return C64::new(0.0, 0.0);
    }
    if w.re < 0.5 {
        sin_pi(w) * lanczos(1.0 - w) / PI
    } else {
        1.0 / lanczos(w)
    }
}
