//! Real embeddings of the tower, the orthogonal cosine basis of
//! `Z[X_(n-1)]`, and the nearest-lattice-point operator used by the
//! continued fraction.
//!
//! An element `a + b X_n` (with `a, b` in `B_(n-1)`) is sent to the vector
//! `(tau_k(a) + tau_k(b) sqrt(2 + tau_k(X_(n-1))))_k`, `k = 1..2^(n-1)`, where
//! `tau_k(X_(n-1)) = 2cos((2k-1) pi / 2^n)`. Lattice points `lambda` in
//! `Z[X_(n-1)]` go to `(tau_k(lambda))_k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{fold_dickson, level, sigma_multiplier, FieldElem, TowerPair};
use crate::interval::{cos_pi, Dyadic, Interval};
use crate::matrix::IntegerMatrix;

/// Starting precision and ceiling for adaptive evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start_bits: 64, max_bits: 8192 }
    }
}

/// `2cos(m pi / 2^(n+1))` for `m = 0..=2^(n+1)`, cached per level and precision.
pub fn cos_table(n: u32, prec: u32) -> Arc<Vec<Interval>> {
    static TABLE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Vec<Interval>>>>> = OnceLock::new();
    let map = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = map.lock().unwrap().get(&(n, prec)) {
        return t.clone();
    }
    let big_m = 1i64 << (n + 1);
    let t: Vec<Interval> = (0..=big_m)
        .into_par_iter()
        .map(|m| cos_pi(&BigRational::new(m.into(), big_m.into()), prec).mul_2exp(1))
        .collect();
    let t = Arc::new(t);
    map.lock().unwrap().insert((n, prec), t.clone());
    t
}

fn table_lookup(t: &[Interval], m: i64, n: u32) -> &Interval {
    let big_m = 1i64 << (n + 1);
    let mut r = m.rem_euclid(2 * big_m);
    if r > big_m {
        r = 2 * big_m - r;
    }
    &t[r as usize]
}

/// Conjugate values `tau_k(x)`, `k = 1..2^n`, with
/// `tau_k(X_n) = 2cos((2k-1) pi / 2^(n+1))`. Entry `k-1` holds `tau_k(x)`.
pub fn conjugates(x: &FieldElem, prec: u32) -> Vec<Interval> {
    let n = x.n();
    let d = x.degree();
    let wp = prec + 16;
    let t = cos_table(n, wp);
    let coords = x.cosine_coords();
    let den = Interval::from_int(x.denominator().clone(), wp);
    let cs: Vec<Interval> = coords.iter().map(|c| Interval::from_int(c.clone(), wp)).collect();
    (1..=d as i64)
        .into_par_iter()
        .map(|k| {
            let odd = 2 * k - 1;
            let mut acc = cs[0].clone();
            for (i, c) in cs.iter().enumerate().skip(1) {
                if coords[i].is_zero() {
                    continue;
                }
                acc = acc + c * table_lookup(&t, i as i64 * odd, n);
            }
            acc.div(&den).expect("positive denominator").with_precision(prec)
        })
        .collect()
}

/// Index `k` (1-based) with `tau_k = sigma^j` restricted to the identity
/// embedding, i.e. `sigma^j(x)` evaluated at `X_n = 2cos(pi/2^(n+1))`
/// equals `tau_k(x)`.
pub fn conjugate_index_of_sigma(n: u32, j: i64) -> usize {
    let r = sigma_multiplier(n, j);
    let big_m = 1i64 << (n + 1);
    let mut r = r.rem_euclid(2 * big_m);
    if r > big_m {
        r = 2 * big_m - r;
    }
    ((r + 1) / 2) as usize
}

/// `sqrt(2 + tau_k(X_(n-1)))`, `k = 1..2^(n-1)`, each radicand checked positive.
pub fn radicals(n: u32, prec: u32) -> Result<Vec<Interval>> {
    if n == 0 {
        return Err(Error::Usage("the embedding needs level n >= 1".into()));
    }
    let xs = conjugates(&level(n - 1).generator(), prec + 8);
    xs.iter()
        .map(|x| {
            let rad = x + &Interval::from_int(2, prec + 8);
            if !rad.is_positive() {
                return Err(Error::Invariant("radicand 2 + tau(X) not positive".into()));
            }
            Ok(rad.sqrt()?.with_precision(prec))
        })
        .collect()
}

/// The embedding of `a + b X_n` into `R^(2^(n-1))`.
pub fn phi_eval(x: &TowerPair, prec: u32) -> Result<Vec<Interval>> {
    let n = x.n();
    let wp = prec + 16;
    let ta = conjugates(&x.a, wp);
    let tb = conjugates(&x.b, wp);
    let s = radicals(n, wp)?;
    Ok((0..ta.len())
        .map(|k| (&ta[k] + &(&tb[k] * &s[k])).with_precision(prec))
        .collect())
}

/// Lattice point `lambda` in `Z[X_(n-1)]` embedded as `(tau_k(lambda))_k`.
pub fn phi_lattice(lambda: &FieldElem, prec: u32) -> Vec<Interval> {
    conjugates(lambda, prec)
}

/// Orthogonal integral basis `1, D_1(X_(n-1)), ..., D_(2^(n-1)-1)(X_(n-1))`
/// of `Z[X_(n-1)]` together with its trace-form Gram diagonal.
#[derive(Clone, Debug)]
pub struct CosineBasis {
    /// Level `n` of the field being expanded; the basis lives one level down.
    pub n: u32,
    pub elements: Vec<FieldElem>,
    /// Column `j` holds the cosine coordinates of `X_(n-1)^j`.
    pub change_matrix: IntegerMatrix,
    pub gram_diagonal: Vec<BigRational>,
}

pub fn cosine_basis(n: u32) -> Result<CosineBasis> {
    if n == 0 {
        return Err(Error::Usage("the cosine basis needs level n >= 1".into()));
    }
    let lvl = level(n - 1);
    let d = lvl.degree();
    let elements: Vec<FieldElem> = (0..d)
        .map(|i| if i == 0 { FieldElem::one(&lvl) } else { lvl.dickson(i as i64) })
        .collect();
    let cols: Vec<Vec<BigInt>> = (0..d)
        .map(|j| {
            let mut e = vec![BigInt::zero(); d];
            e[j] = BigInt::one();
            FieldElem::from_parts(&lvl, e, BigInt::one()).cosine_coords()
        })
        .collect();
    let change_matrix = IntegerMatrix::from_columns(d, &cols);
    let gram_diagonal = (0..d).map(|i| gram(n, i)).collect();
    Ok(CosineBasis { n, elements, change_matrix, gram_diagonal })
}

/// `Tr(b_i^2)` over `B_(n-1)`: `2^(n-1)` for `i = 0`, `2^n` otherwise.
fn gram(n: u32, i: usize) -> BigRational {
    let half = BigInt::one() << (n - 1);
    BigRational::from_integer(if i == 0 { half } else { half * 2u32 })
}

/// `w_j = 1 / sin(j pi / 2^(n+1)) = 2 / D_(2^n - j)(X_n)` for odd `j`, exactly.
fn inv_sin(n: u32, j: i64) -> Result<FieldElem> {
    let lvl = level(n);
    let d = lvl.degree() as i64;
    let (coef, idx) = fold_dickson(d - j, n);
    let mut v = vec![BigInt::zero(); lvl.degree()];
    v[idx] = BigInt::from(coef);
    let s = FieldElem::from_cosine(&lvl, &v, &BigInt::one());
    Ok(s.inv()?.scale(&BigRational::from_integer(2.into())))
}

/// Exact value, as an element of `B_n`, of the cosine coordinate
/// `<phi(x), phi(b_i)> / Tr(b_i^2)` of the point `x = a + b X_n`.
pub fn exact_coordinate(x: &TowerPair, i: usize) -> Result<FieldElem> {
    let n = x.n();
    let lvl = level(n);
    let a_coords = x.a.cosine_coords();
    let mut value =
        FieldElem::from_rational(&lvl, &BigRational::new(a_coords[i].clone(), x.a.denominator().clone()));
    if x.b.is_zero() {
        return Ok(value);
    }
    let basis = cosine_basis(n)?;
    let y = &x.b * &basis.elements[i];
    let dm = y.cosine_coords();
    // sum_k tau_k(y) sqrt(2 + tau_k(X_(n-1))) folded into the w_j
    let mut s = FieldElem::zero(&lvl);
    for (m, c) in dm.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = BigRational::from_integer(c.clone());
        let term = if m == 0 {
            inv_sin(n, 1)?
        } else {
            let m = m as i64;
            let sign_hi = if m % 2 == 0 { 1 } else { -1 };
            let hi = inv_sin(n, 2 * m + 1)?.scale(&BigRational::from_integer(sign_hi.into()));
            let lo = inv_sin(n, 2 * m - 1)?.scale(&BigRational::from_integer((-sign_hi).into()));
            &hi + &lo
        };
        s = &s + &term.scale(&c);
    }
    let s = s.scale(&BigRational::new(BigInt::one(), y.denominator().clone()));
    value = &value + &s.scale(&gram(n, i).recip());
    Ok(value)
}

fn round_half_up(q: &BigRational) -> BigInt {
    (q + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

/// Interval enclosures of the cosine coordinates of `x` at `prec` bits.
pub fn coordinate_enclosures(x: &TowerPair, prec: u32) -> Result<Vec<Interval>> {
    let n = x.n();
    let d = 1usize << (n - 1);
    let wp = prec + 16;
    let a_coords = x.a.cosine_coords();
    let a_den = x.a.denominator();
    let exact: Vec<BigRational> =
        a_coords.iter().map(|c| BigRational::new(c.clone(), a_den.clone())).collect();
    if x.b.is_zero() {
        return Ok(exact.iter().map(|q| Interval::from_rational(q, prec)).collect());
    }
    let tb = conjugates(&x.b, wp);
    let s = radicals(n, wp)?;
    let w: Vec<Interval> = tb.iter().zip(&s).map(|(t, r)| t * r).collect();
    let t = cos_table(n - 1, wp);
    Ok((0..d)
        .into_par_iter()
        .map(|i| {
            let mut acc = Interval::zero(wp);
            for (k, wk) in w.iter().enumerate() {
                let odd = 2 * k as i64 + 1;
                if i == 0 {
                    acc = acc + wk;
                } else {
                    acc = acc + wk * table_lookup(&t, i as i64 * odd, n - 1);
                }
            }
            let g = gram(n, i);
            let sv = acc.div(&Interval::from_rational(&g, wp)).expect("positive gram entry");
            (Interval::from_rational(&exact[i], wp) + sv).with_precision(prec)
        })
        .collect())
}

/// Certified `round(v)` from an enclosure of `v`, if the enclosure decides it.
fn certified_round(v: &Interval) -> Option<BigInt> {
    let half = Dyadic::new(BigInt::one(), -1);
    let lo = v.lo().add(&half);
    let hi = v.hi().add(&half);
    let k = lo.floor();
    let lo_is_integer = Dyadic::from_int(k.clone()) == lo;
    (k == hi.floor() && !lo_is_integer).then_some(k)
}

/// Nearest point of `Z[X_(n-1)]` to `x = a + b X_n` under the embedding.
///
/// Each cosine coordinate is rounded independently (the basis is orthogonal).
/// Precision doubles from `policy.start_bits`; a coordinate that no enclosure
/// decides is settled from its exact value in `B_n`, which either is a
/// half-integer (a genuine tie, reported as [`Error::AmbiguousRounding`]) or
/// decides the rounding. [`Error::Undecided`] is returned when the ceiling is
/// reached for an irrational coordinate.
pub fn floor_nearest(x: &TowerPair, policy: &PrecisionPolicy) -> Result<FieldElem> {
    let n = x.n();
    let lvl = level(n - 1);
    let d = lvl.degree();
    let mut out: Vec<Option<BigInt>> = vec![None; d];
    let mut prec = policy.start_bits.min(policy.max_bits);
    let mut exact_checked = vec![false; d];
    loop {
        let enc = coordinate_enclosures(x, prec)?;
        for i in 0..d {
            if out[i].is_some() {
                continue;
            }
            if let Some(k) = certified_round(&enc[i]) {
                out[i] = Some(k);
                continue;
            }
            if !exact_checked[i] {
                exact_checked[i] = true;
                let v = exact_coordinate(x, i)?;
                if let Some(q) = v.as_rational() {
                    if q.denom() == &BigInt::from(2) {
                        return Err(Error::AmbiguousRounding { coordinate: i, value: v.to_string() });
                    }
                    out[i] = Some(round_half_up(&q));
                }
            }
        }
        if out.iter().all(|c| c.is_some()) {
            break;
        }
        if prec >= policy.max_bits {
            return Err(Error::Undecided {
                what: "nearest lattice point coordinate".into(),
                bits: prec,
            });
        }
        prec = (prec * 2).min(policy.max_bits);
    }
    let coords: Vec<BigInt> = out.into_iter().map(|c| c.unwrap()).collect();
    Ok(FieldElem::from_cosine(&lvl, &coords, &BigInt::one()))
}

/// `|phi(x) - phi(lambda)|^2` as an enclosure.
pub fn distance_sq(x: &TowerPair, lambda: &FieldElem, prec: u32) -> Result<Interval> {
    let shifted = TowerPair::new(&x.a - lambda, x.b.clone())?;
    let v = phi_eval(&shifted, prec)?;
    Ok(v.iter().map(|c| c.sqr()).sum())
}

/// Exact `Tr(x y)` for lattice elements, the trace form the embedding realizes.
pub fn trace_form(x: &FieldElem, y: &FieldElem) -> BigRational {
    (x * y).trace()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(n: u32, c: &[i64]) -> FieldElem {
        FieldElem::from_int_coeffs(&level(n), c)
    }

    fn pair(n: u32, a: &[i64], b: &[i64]) -> TowerPair {
        TowerPair::new(el(n - 1, a), el(n - 1, b)).unwrap()
    }

    #[test]
    fn conjugates_of_x2() {
        let c = conjugates(&level(2).generator(), 128);
        let pi = std::f64::consts::PI;
        for (k, v) in c.iter().enumerate() {
            let expect = 2.0 * ((2 * k + 1) as f64 * pi / 8.0).cos();
            assert!((v.to_f64() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_index_matches_numeric_conjugate() {
        let x = el(3, &[1, 2, 0, -1, 0, 0, 3, 1]);
        let c = conjugates(&x, 128);
        for j in 0..8 {
            let k = conjugate_index_of_sigma(3, j);
            let s = conjugates(&x.sigma_pow(j), 128);
            assert!(s[0].overlaps(&c[k - 1]), "j = {j}");
        }
    }

    #[test]
    fn phi_eval_examples() {
        let v = phi_eval(&pair(2, &[0, 0], &[1, 0]), 128).unwrap();
        assert!((v[0].to_f64() - 1.847759065).abs() < 1e-8);
        assert!((v[1].to_f64() - 0.765366865).abs() < 1e-8);
        let v = phi_eval(&pair(3, &[7, 0, 0, 0], &[0, 0, 0, 0]), 64).unwrap();
        assert!(v.iter().all(|c| c.contains_rational(&BigRational::from_integer(7.into()))));
        let x = TowerPair::from_elem(&el(4, &[-1, 1])).unwrap();
        let v = phi_eval(&x, 128).unwrap();
        let expect = 2.0 * (std::f64::consts::PI / 32.0).cos() - 1.0;
        assert!((v[0].to_f64() - expect).abs() < 1e-14);
    }

    #[test]
    fn cosine_basis_examples() {
        let b1 = cosine_basis(1).unwrap();
        assert_eq!(b1.elements.len(), 1);
        let b2 = cosine_basis(2).unwrap();
        assert_eq!(b2.elements[1], level(1).generator());
        assert_eq!(trace_form(&b2.elements[1], &b2.elements[1]), BigRational::from_integer(4.into()));
        let b3 = cosine_basis(3).unwrap();
        assert_eq!(b3.elements[2], el(2, &[-2, 0, 1]));
        assert_eq!(b3.elements[3], el(2, &[0, -3, 0, 1]));
        assert!(b3.change_matrix.is_unimodular());
    }

    #[test]
    fn nearest_point_examples() {
        let p = PrecisionPolicy::default();
        let one = floor_nearest(&pair(2, &[0, 0], &[1, 0]), &p).unwrap();
        assert!(one.is_one());
        let lam = el(2, &[3, -1, 0, 2]);
        let x = TowerPair::new(lam.clone(), FieldElem::zero(&level(2))).unwrap();
        assert_eq!(floor_nearest(&x, &p).unwrap(), lam);
    }

    #[test]
    fn half_sqrt_two_is_a_tie() {
        let a = FieldElem::from_coeffs(
            &level(1),
            &[BigRational::zero(), BigRational::new(1.into(), 2.into())],
        );
        let x = TowerPair::new(a, FieldElem::zero(&level(1))).unwrap();
        match floor_nearest(&x, &PrecisionPolicy::default()) {
            Err(Error::AmbiguousRounding { coordinate, .. }) => assert_eq!(coordinate, 1),
            other => panic!("expected a tie, got {other:?}"),
        }
    }

    #[test]
    fn exact_coordinate_is_inside_enclosure() {
        let x = pair(3, &[1, -2, 0, 1], &[2, 1, -1, 0]);
        let enc = coordinate_enclosures(&x, 128).unwrap();
        for (i, e) in enc.iter().enumerate() {
            let v = exact_coordinate(&x, i).unwrap();
            let c = conjugates(&v, 128);
            assert!(e.overlaps(&c[0]), "coordinate {i}: {e} vs {}", c[0]);
        }
    }
}
