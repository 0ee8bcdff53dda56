//! Second-order Taylor jets over intervals: `(f, f', f'')` propagated by
//! the chain rule, so one evaluation on a panel encloses `f''` there.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::interval::{Dyadic, Interval};

#[derive(Clone, Debug)]
pub struct Jet {
    pub v: Interval,
    pub d: Interval,
    pub dd: Interval,
}

impl Jet {
    pub fn constant(c: Interval) -> Jet {
        let z = Interval::zero(c.precision_bits());
        Jet { v: c, d: z.clone(), dd: z }
    }

    /// The independent variable ranging over `x`.
    pub fn var(x: Interval) -> Jet {
        let p = x.precision_bits();
        Jet { v: x, d: Interval::one(p), dd: Interval::zero(p) }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet { v: &self.v + &o.v, d: &self.d + &o.d, dd: &self.dd + &o.dd }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet { v: &self.v - &o.v, d: &self.d - &o.d, dd: &self.dd - &o.dd }
    }

    pub fn neg(&self) -> Jet {
        Jet { v: -&self.v, d: -&self.d, dd: -&self.dd }
    }

    pub fn add_const(&self, c: &Interval) -> Jet {
        Jet { v: &self.v + c, ..self.clone() }
    }

    pub fn scale(&self, c: &Interval) -> Jet {
        Jet { v: &self.v * c, d: &self.d * c, dd: &self.dd * c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let cross = (&self.d * &o.d).mul_2exp(1);
        Jet {
            v: &self.v * &o.v,
            d: &(&self.d * &o.v) + &(&self.v * &o.d),
            dd: &(&(&self.dd * &o.v) + &cross) + &(&self.v * &o.dd),
        }
    }

    pub fn sqr(&self) -> Jet {
        Jet {
            v: self.v.sqr(),
            d: (&self.v * &self.d).mul_2exp(1),
            dd: (&self.d.sqr() + &(&self.v * &self.dd)).mul_2exp(1),
        }
    }

    pub fn recip(&self) -> Result<Jet> {
        let r = self.v.recip()?;
        let r2 = r.sqr();
        let d = -&(&self.d * &r2);
        let dd = &(&self.d.sqr() * &(&r2 * &r)).mul_2exp(1) - &(&self.dd * &r2);
        Ok(Jet { v: r, d, dd })
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn cos(&self) -> Jet {
        let c = self.v.cos();
        let s = self.v.sin();
        Jet {
            d: -&(&s * &self.d),
            dd: -&(&(&c * &self.d.sqr()) + &(&s * &self.dd)),
            v: c,
        }
    }

    pub fn sin(&self) -> Jet {
        let c = self.v.cos();
        let s = self.v.sin();
        Jet {
            d: &c * &self.d,
            dd: &(&c * &self.dd) - &(&s * &self.d.sqr()),
            v: s,
        }
    }

    /// `self^(p/q)` for a strictly positive value enclosure.
    pub fn pow_ratio(&self, p: i64, q: u32) -> Result<Jet> {
        let prec = self.v.precision_bits();
        let r = Interval::from_rational(&BigRational::new(BigInt::from(p), BigInt::from(q)), prec);
        let rm1 = &r - &Interval::one(prec);
        let vr = self.v.pow_ratio(p, q)?;
        let inv = self.v.recip()?;
        let vr1 = &vr * &inv; // v^(r-1)
        let vr2 = &vr1 * &inv; // v^(r-2)
        let d = &(&r * &vr1) * &self.d;
        let dd = &(&(&(&r * &rm1) * &vr2) * &self.d.sqr()) + &(&(&r * &vr1) * &self.dd);
        Ok(Jet { v: vr, d, dd })
    }

    /// Widen value, first and second derivative by the given radii.
    pub fn widen(&self, e0: &Dyadic, e1: &Dyadic, e2: &Dyadic) -> Jet {
        Jet { v: self.v.widen(e0), d: self.d.widen(e1), dd: self.dd.widen(e2) }
    }
}

/// Power series `sum c_j t^j` composed with the jet `t`, plus a uniform
/// bound `tail` on the truncation error and its first two `t`-derivatives.
pub fn series(coeffs: &[BigRational], t: &Jet, tail: &Dyadic) -> Jet {
    let prec = t.v.precision_bits();
    let mut acc = Jet::constant(Interval::zero(prec));
    for c in coeffs.iter().rev() {
        acc = acc.mul(t).add_const(&Interval::from_rational(c, prec));
    }
    // chain rule for the remainder R(t(u)): R' t', R'' t'^2 + R' t''
    let td = t.d.abs().hi().clone();
    let tdd = t.dd.abs().hi().clone();
    let e1 = tail.mul(&td);
    let e2 = tail.mul(&td.mul(&td)).add(&tail.mul(&tdd));
    acc.widen(tail, &e1, &e2)
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, i| a * i)
}

/// Truncated coefficients of `sin(t)/t` and `(1 - cos t)/t` with 25 terms each.
/// For `|t| <= 2` the omitted tails and their first two derivatives stay
/// below `2^-150` (consecutive terms shrink by more than a factor 100).
pub fn sinc_coeffs() -> (Vec<BigRational>, Vec<BigRational>, Dyadic) {
    const K: u32 = 25;
    let mut s = vec![BigRational::from_integer(0.into()); 2 * K as usize];
    let mut c = vec![BigRational::from_integer(0.into()); 2 * K as usize + 1];
    for k in 0..K {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        s[2 * k as usize] = BigRational::new(BigInt::from(sign), factorial(2 * k + 1));
        c[2 * k as usize + 1] = BigRational::new(BigInt::from(sign), factorial(2 * k + 2));
    }
    (s, c, Dyadic::new(BigInt::one(), -150))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(x: f64) -> Interval {
        Interval::from_rational(&BigRational::from_float(x).unwrap(), 128)
    }

    #[test]
    fn derivatives_of_cos_squared() {
        // f = cos(x)^2, f' = -sin(2x), f'' = -2cos(2x)
        let x = 0.7;
        let j = Jet::var(iv(x)).cos().sqr();
        assert!((j.v.to_f64() - x.cos().powi(2)).abs() < 1e-14);
        assert!((j.d.to_f64() + (2.0 * x).sin()).abs() < 1e-14);
        assert!((j.dd.to_f64() + 2.0 * (2.0 * x).cos()).abs() < 1e-14);
    }

    #[test]
    fn derivatives_of_fractional_power_and_reciprocal() {
        // f = (1 + x)^(2/3) / x
        let x = 1.3f64;
        let u = Jet::var(iv(x));
        let f = u.add_const(&Interval::one(128)).pow_ratio(2, 3).unwrap().div(&u).unwrap();
        let g = |x: f64| (1.0 + x).powf(2.0 / 3.0) / x;
        let h = 1e-4;
        let d = (g(x + h) - g(x - h)) / (2.0 * h);
        let dd = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
        assert!((f.d.to_f64() - d).abs() < 1e-6);
        assert!((f.dd.to_f64() - dd).abs() < 1e-5);
    }

    #[test]
    fn sinc_series_matches_sin() {
        let (s, c, tail) = sinc_coeffs();
        for &t in &[0.0, 0.4, 1.05, 1.9] {
            let tj = Jet::var(iv(t));
            let sv = series(&s, &tj, &tail);
            let cv = series(&c, &tj, &tail);
            let (es, ec) = if t == 0.0 { (1.0, 0.0) } else { (t.sin() / t, (1.0 - t.cos()) / t) };
            assert!((sv.v.to_f64() - es).abs() < 1e-14, "t = {t}");
            assert!((cv.v.to_f64() - ec).abs() < 1e-14, "t = {t}");
        }
    }
}
