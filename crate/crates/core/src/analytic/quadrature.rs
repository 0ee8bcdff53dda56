//! Verified quadrature: adaptive midpoint rule whose remainder
//! `h^3/24 * f''(xi)` is enclosed by a jet evaluation over each panel.
//!
//! The integrand `|(2cos x + 1)/(2cos x - 1)|^(2/3)` has an `|x - pi/3|^(-2/3)`
//! singularity. Either side of it is integrated in `u` with `x = pi/3 -+ u^3`,
//! where `2cos x - 1 = +-u^3 g(u^3)` and `g` is a combination of `sin(t)/t`
//! and `(1 - cos t)/t`, so the transformed integrand is smooth.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::jet::{series, sinc_coeffs, Jet};
use crate::error::{Error, Result};
use crate::interval::{pi, Dyadic, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrand {
    /// `(2cos x - 1)^2`
    ShiftedCosSquare,
    /// `cos x`
    Cos,
    /// `1/(2cos x + 1)`
    ReciprocalCosPlus,
    /// `|(2cos x + 1)/(2cos x - 1)|^(2/3)`
    SingularRatio,
}

impl FromStr for Integrand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted_cos_square" => Ok(Integrand::ShiftedCosSquare),
            "cos" => Ok(Integrand::Cos),
            "reciprocal_cos_plus" => Ok(Integrand::ReciprocalCosPlus),
            "singular_ratio" => Ok(Integrand::SingularRatio),
            _ => Err(Error::Usage(format!("unknown integrand {s}"))),
        }
    }
}

impl Integrand {
    /// Jet of the integrand in `x`.
    pub fn eval(self, x: &Jet) -> Result<Jet> {
        let prec = x.v.precision_bits();
        let one = Interval::one(prec);
        let two_cos = x.cos().scale(&Interval::from_int(2, prec));
        match self {
            Integrand::ShiftedCosSquare => Ok(two_cos.add_const(&-&one).sqr()),
            Integrand::Cos => Ok(x.cos()),
            Integrand::ReciprocalCosPlus => two_cos.add_const(&one).recip(),
            Integrand::SingularRatio => {
                let r = two_cos.add_const(&one).div(&two_cos.add_const(&-&one))?;
                let r = if r.v.is_negative() { r.neg() } else { r };
                r.pow_ratio(2, 3)
            }
        }
    }
}

const MAX_DEPTH: u32 = 40;

/// Enclosure of `int_a^b g(u) du` for a jet-valued `g`, with total width
/// aimed at `tol`.
pub fn integrate_jet<G>(g: &G, a: &Interval, b: &Interval, tol: f64, prec: u32) -> Result<Interval>
where
    G: Fn(&Jet) -> Result<Jet> + Sync,
{
    let lo = a.hi().clone();
    let hi = b.lo().clone();
    if hi < lo {
        return Err(Error::Undecided { what: "integration bounds overlap".into(), bits: prec });
    }
    let len = hi.sub(&lo).to_f64();
    let density = tol / len.max(f64::MIN_POSITIVE);
    let pieces = 16i64;
    let step = hi.sub(&lo);
    let cuts: Vec<Dyadic> = (0..=pieces)
        .map(|i| lo.add(&step.mul(&Dyadic::from_int(i)).mul_2exp(-4)))
        .collect();
    let parts: Vec<Result<Interval>> = {
        use rayon::prelude::*;
        (0..pieces as usize)
            .into_par_iter()
            .map(|i| panel(g, &cuts[i], &cuts[i + 1], density, prec, 0))
            .collect()
    };
    let mut total = Interval::zero(prec);
    for p in parts {
        total = total + p?;
    }
    // slivers between the enclosed endpoints and the dyadic cut points
    for end in [a, b] {
        let w = end.width();
        if !w.is_zero() {
            let m = g(&Jet::var(end.clone()))?.v.abs().hi().clone();
            total = total.widen(&m.mul(&w));
        }
    }
    Ok(total)
}

fn panel<G>(g: &G, lo: &Dyadic, hi: &Dyadic, density: f64, prec: u32, depth: u32) -> Result<Interval>
where
    G: Fn(&Jet) -> Result<Jet> + Sync,
{
    let h = hi.sub(lo);
    let mid = lo.add(hi).mul_2exp(-1);
    let hv = Interval::point(h.clone(), prec);
    let attempt = (|| -> Result<Interval> {
        let at_mid = g(&Jet::var(Interval::point(mid.clone(), prec)))?.v;
        let over = g(&Jet::var(Interval::new(lo.clone(), hi.clone(), prec)))?.dd;
        let cube = &hv * &hv.sqr();
        Ok(&(&hv * &at_mid) + &(&cube * &over).div_int(24))
    })();
    let good = match &attempt {
        Ok(v) => v.width_f64() <= density * h.to_f64(),
        Err(_) => false,
    };
    if good || depth >= MAX_DEPTH {
        return attempt;
    }
    let (l, r) = rayon::join(
        || panel(g, lo, &mid, density, prec, depth + 1),
        || panel(g, &mid, hi, density, prec, depth + 1),
    );
    Ok(l? + r?)
}

/// Which side of `pi/3` a substituted piece covers.
#[derive(Clone, Copy)]
enum Side {
    Below,
    Above,
}

/// `3 (2cos x + 1)^(2/3) g(u^3)^(-2/3)` with `x = pi/3 -+ u^3`.
fn substituted(side: Side, u: &Jet, prec: u32) -> Result<Jet> {
    let (s, c, tail) = sinc_coeffs();
    let t = u.sqr().mul(u);
    let sinc = series(&s, &t, &tail);
    let cosc = series(&c, &t, &tail);
    let sqrt3 = Interval::from_int(3, prec).sqrt()?;
    let third_pi = pi(prec).div_int(3);
    let (g, x) = match side {
        Side::Below => (sinc.scale(&sqrt3).sub(&cosc), t.neg().add_const(&third_pi)),
        Side::Above => (sinc.scale(&sqrt3).add(&cosc), t.add_const(&third_pi)),
    };
    let plus = x.cos().scale(&Interval::from_int(2, prec)).add_const(&Interval::one(prec));
    let v = plus.pow_ratio(2, 3)?.mul(&g.pow_ratio(-2, 3)?);
    Ok(v.scale(&Interval::from_int(3, prec)))
}

/// Rigorous enclosure of `int_a^b f(x) dx` aiming at total width `tol`.
/// `a <= b` must lie in `[0, pi/2]`.
pub fn quadrature(f: Integrand, a: &Interval, b: &Interval, tol: f64, prec: u32) -> Result<Interval> {
    let third_pi = pi(prec).div_int(3);
    let straddles = f == Integrand::SingularRatio && a.lt(&third_pi) && third_pi.lt(b);
    if f == Integrand::SingularRatio && !straddles && (a.overlaps(&third_pi) || b.overlaps(&third_pi)) {
        return Err(Error::Undecided {
            what: "integration endpoint at the singularity".into(),
            bits: prec,
        });
    }
    let result = if straddles {
        let zero = Interval::zero(prec);
        let below_end = (&third_pi - a).root(3)?;
        let above_end = (b - &third_pi).root(3)?;
        let below = integrate_jet(&|u: &Jet| substituted(Side::Below, u, prec), &zero, &below_end, tol / 2.0, prec)?;
        let above = integrate_jet(&|u: &Jet| substituted(Side::Above, u, prec), &zero, &above_end, tol / 2.0, prec)?;
        below + above
    } else {
        integrate_jet(&|x: &Jet| f.eval(x), a, b, tol, prec)?
    };
    if result.width_f64() > tol {
        return Err(Error::Undecided {
            what: format!("quadrature width {:.3e} above the requested {tol:.1e}", result.width_f64()),
            bits: prec,
        });
    }
    Ok(result)
}

/// `int_0^(pi/2) f(x) dx`.
pub fn quarter_period(f: Integrand, tol: f64, prec: u32) -> Result<Interval> {
    quadrature(f, &Interval::zero(prec), &pi(prec).mul_2exp(-1), tol, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn closed_forms_are_enclosed() {
        let prec = 96;
        let c = quarter_period(Integrand::Cos, 1e-8, prec).unwrap();
        assert!(c.contains_rational(&BigRational::one()), "{c}");
        let s = quarter_period(Integrand::ShiftedCosSquare, 1e-8, prec).unwrap();
        // -4 + 3 pi / 2
        let exact = &pi(prec).mul_int(3).mul_2exp(-1) - &Interval::from_int(4, prec);
        assert!(s.overlaps(&exact), "{s} vs {exact}");
        assert!((s.to_f64() - 0.712_388_980_4).abs() < 1e-8);
    }

    #[test]
    fn reciprocal_integral_matches_reference() {
        let r = quarter_period(Integrand::ReciprocalCosPlus, 1e-8, 96).unwrap();
        // 2/sqrt(3) * artanh(tan(pi/4)/sqrt(3)) = ln(2 + sqrt 3)/sqrt 3
        let exact = (2.0f64 + 3f64.sqrt()).ln() / 3f64.sqrt();
        assert!((r.to_f64() - exact).abs() < 1e-9, "{r}");
    }

    #[test]
    fn singular_integral_is_about_6_467() {
        let r = quarter_period(Integrand::SingularRatio, 1e-6, 96).unwrap();
        assert!(r.width_f64() <= 1e-6);
        assert!((r.to_f64() - 6.466_978_4).abs() < 2e-6, "{r}");
    }

    #[test]
    fn integrand_names_parse() {
        assert_eq!("cos".parse::<Integrand>().unwrap(), Integrand::Cos);
        assert!("tan".parse::<Integrand>().is_err());
    }
}
