//! Double-double arithmetic for power series that cancel off the real axis.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::C64;

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::new(q3))
    }
}

#[derive(Clone, Copy, Debug)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn new(z: C64) -> Self {
        Cdd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div(self, o: Cdd) -> Cdd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(Cdd { re: o.re, im: o.im.neg() });
        Cdd { re: num.re.div(den), im: num.im.div(den) }
    }

    fn to_c64(self) -> C64 {
        C64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }

    fn approx_norm(self) -> f64 {
        C64::new(self.re.hi, self.im.hi).norm()
    }
}

/// `Σ_k q^k / (k! (ν+1)_k)` with `q = x²/4`, accumulated in double-double.
pub(crate) fn pochhammer_series(nu: C64, x: C64) -> C64 {
    let xx = Cdd::new(x);
    let quarter = Cdd { re: Dd::new(0.25), im: Dd::ZERO };
    let q = xx.mul(xx).mul(quarter);
    let nu = Cdd::new(nu);
    let one = Cdd { re: Dd::new(1.0), im: Dd::ZERO };
    let mut term = one;
    let mut sum = one;
    let peak = q.approx_norm().sqrt();
    for k in 1..2000 {
        let kf = Cdd { re: Dd::new(k as f64), im: Dd::ZERO };
        term = term.mul(q).div(kf.mul(kf.add(nu)));
        sum = sum.add(term);
        if k as f64 > peak && term.approx_norm() <= 1e-33 * sum.approx_norm() {
            break;
        }
    }
    sum.to_c64()
}

/// Orders of magnitude lost to cancellation when summing the series at `x` in plain doubles.
pub(crate) fn series_loss(x: C64) -> f64 {
    x.norm() - x.re.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_division_round_trips() {
        let a = Dd::new(1.0).div(Dd::new(3.0));
        let b = a.mul(Dd::new(3.0)).sub(Dd::new(1.0));
        assert!(b.hi.abs() < 1e-30);
    }

    #[test]
    fn series_matches_cosh_on_the_imaginary_axis() {
        // ν = -1/2: Σ q^k/(k!(1/2)_k) = cosh(x)
        let x = C64::new(0.0, 20.0);
        let got = pochhammer_series(C64::new(-0.5, 0.0), x);
        assert!((got - x.cosh()).norm() < 1e-14);
    }
}
