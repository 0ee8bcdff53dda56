//! Exact arithmetic in the real 2-power cyclotomic tower
//! `Q = B_0 ⊂ B_1 ⊂ B_2 ⊂ ...`, where `B_n = Q(X_n)` and
//! `X_n = 2cos(pi / 2^(n+1))`, so `X_1 = sqrt 2`, `X_2 = sqrt(2 + sqrt 2)`, ...
//!
//! Elements are stored over the power basis `1, X_n, ..., X_n^(d-1)` with
//! `d = 2^n` and a common positive denominator. The Galois generator `sigma`
//! is fixed as `zeta -> zeta^5`, which sends `X_n` to the Dickson value
//! `D_5(X_n)`.
//!
//! Internally the cosine basis `1, D_1(X_n), ..., D_(d-1)(X_n)` is used for
//! the Galois action and for trace cross-checks: `sigma^j` permutes it up to
//! sign, and the trace of an element is `d` times its constant cosine
//! coordinate.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::QPoly;

/// Highest level a [`Tower`] hands out unless configured otherwise.
pub const DEFAULT_MAX_LEVEL: u32 = 10;

/// Per-level data: minimal polynomial, power sums of its roots, the image of
/// `X_n` under `sigma`, and a cache of reduced Dickson values.
pub struct Level {
    n: u32,
    degree: usize,
    min_poly: Vec<BigInt>,
    /// (index, coefficient) of the nonzero coefficients of `mu_n` below the leading one.
    reducer: Vec<(usize, BigInt)>,
    power_sums: Vec<BigInt>,
    sigma_image: Vec<BigInt>,
    dickson: Mutex<HashMap<u64, Vec<BigInt>>>,
    parent: Option<Arc<Level>>,
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Level").field("n", &self.n).field("degree", &self.degree).finish()
    }
}

fn levels() -> &'static Mutex<Vec<Arc<Level>>> {
    static LEVELS: OnceLock<Mutex<Vec<Arc<Level>>>> = OnceLock::new();
    LEVELS.get_or_init(|| Mutex::new(Vec::new()))
}

/// Level `n` without a ceiling check. Levels are built once and shared.
pub(crate) fn level(n: u32) -> Arc<Level> {
    let mut cache = levels().lock().unwrap();
    while cache.len() <= n as usize {
        let next = Level::build(cache.last().cloned());
        cache.push(Arc::new(next));
    }
    cache[n as usize].clone()
}

/// Hands out levels up to a configured ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tower {
    ceiling: u32,
}

impl Default for Tower {
    fn default() -> Self {
        Tower { ceiling: DEFAULT_MAX_LEVEL }
    }
}

impl Tower {
    pub fn new(ceiling: u32) -> Self {
        Tower { ceiling }
    }

    pub fn ceiling(&self) -> u32 {
        self.ceiling
    }

    pub fn level(&self, n: u32) -> Result<Arc<Level>> {
        if n > self.ceiling {
            return Err(Error::LevelLimit { requested: n, ceiling: self.ceiling });
        }
        Ok(level(n))
    }
}

/// Level `n` with the default ceiling.
pub fn make_level(n: u32) -> Result<Arc<Level>> {
    Tower::default().level(n)
}

/// Where `D_m(X_n)` lands in the cosine basis: `coef * b_index`
/// (`b_0 = 1`, `b_i = D_i(X_n)`).
pub(crate) fn fold_dickson(m: i64, n: u32) -> (i64, usize) {
    let big_m = 1i64 << (n + 1);
    let d = big_m / 2;
    let mut r = m.rem_euclid(2 * big_m);
    if r > big_m {
        r = 2 * big_m - r;
    }
    if r == 0 {
        (2, 0)
    } else if r == big_m {
        (-2, 0)
    } else if r == d {
        (0, 0)
    } else if r > d {
        (-1, (big_m - r) as usize)
    } else {
        (1, r as usize)
    }
}

/// `5^j mod 2^(n+2)`: `sigma^j` sends `X_n` to `D_r(X_n)` for this `r`.
pub fn sigma_multiplier(n: u32, j: i64) -> i64 {
    let modulus = 1i64 << (n + 2);
    let order = 1i64 << n;
    let mut e = j.rem_euclid(order);
    let mut base = 5i64 % modulus;
    let mut r = 1i64 % modulus;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % modulus;
        }
        base = base * base % modulus;
        e >>= 1;
    }
    r
}

/// Multiply a cosine-coordinate vector by `X_n`.
fn cos_mul_x(v: &[BigInt]) -> Vec<BigInt> {
    let d = v.len();
    let mut out = vec![BigInt::zero(); d];
    if d == 1 {
        return out;
    }
    out[1] += &v[0];
    for m in 1..d {
        if v[m].is_zero() {
            continue;
        }
        if m + 1 < d {
            out[m + 1] += &v[m];
        }
        if m == 1 {
            out[0] += &v[1] * 2u32;
        } else {
            out[m - 1] += &v[m];
        }
    }
    out
}

/// Power-basis coefficients to cosine coordinates (Horner in `X_n`).
pub(crate) fn power_to_cos(c: &[BigInt]) -> Vec<BigInt> {
    let d = c.len();
    let mut v = vec![BigInt::zero(); d];
    for i in (0..d).rev() {
        v = cos_mul_x(&v);
        v[0] += &c[i];
    }
    v
}

/// Cosine coordinates to power-basis coefficients (Clenshaw recurrence for
/// `D_(k+1) = x D_k - D_(k-1)`).
pub(crate) fn cos_to_power(v: &[BigInt]) -> Vec<BigInt> {
    let d = v.len();
    let mut out = vec![BigInt::zero(); d];
    out[0] = v[0].clone();
    if d == 1 {
        return out;
    }
    // b_k = c_k + x b_(k+1) - b_(k+2); sum_(k>=1) c_k D_k = x b_1 - 2 b_2
    let mut b1 = vec![BigInt::zero(); d];
    let mut b2 = vec![BigInt::zero(); d];
    for k in (1..d).rev() {
        let mut bk = vec![BigInt::zero(); d];
        for i in 0..d - 1 {
            if !b1[i].is_zero() {
                bk[i + 1] = b1[i].clone();
            }
        }
        for i in 0..d {
            if !b2[i].is_zero() {
                bk[i] -= &b2[i];
            }
        }
        bk[0] += &v[k];
        b2 = std::mem::replace(&mut b1, bk);
    }
    for i in 0..d - 1 {
        out[i + 1] += &b1[i];
    }
    for i in 0..d {
        out[i] -= &b2[i] * 2u32;
    }
    out
}

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                r[i + j] += x * y;
            }
        }
    }
    r
}

impl Level {
    fn build(parent: Option<Arc<Level>>) -> Level {
        let (n, min_poly) = match &parent {
            None => (0, vec![BigInt::zero(), BigInt::one()]),
            Some(p) => {
                // mu_n(x) = mu_(n-1)(x^2 - 2), by Horner
                let sub = [BigInt::from(-2), BigInt::zero(), BigInt::one()];
                let mut acc: Vec<BigInt> = vec![];
                for c in p.min_poly.iter().rev() {
                    acc = poly_mul_int(&acc, &sub);
                    if acc.is_empty() {
                        acc.push(BigInt::zero());
                    }
                    acc[0] += c;
                }
                (p.n + 1, acc)
            }
        };
        let degree = 1usize << n;
        debug_assert_eq!(min_poly.len(), degree + 1);
        let reducer = (0..degree)
            .filter(|&j| !min_poly[j].is_zero())
            .map(|j| (j, min_poly[j].clone()))
            .collect();

        // Newton identities; e_k is the coefficient of x^(d-k)
        let e = |k: usize| min_poly[degree - k].clone();
        let mut power_sums = vec![BigInt::from(degree as u64)];
        for k in 1..degree {
            let mut s = e(k) * BigInt::from(k as u64);
            for i in 1..k {
                s += e(i) * &power_sums[k - i];
            }
            power_sums.push(-s);
        }

        let mut lvl = Level {
            n,
            degree,
            min_poly,
            reducer,
            power_sums,
            sigma_image: vec![],
            dickson: Mutex::new(HashMap::new()),
            parent,
        };
        for a in [1u64, 3, 5] {
            let v = lvl.compute_dickson(a);
            lvl.dickson.lock().unwrap().insert(a, v);
        }
        lvl.sigma_image = lvl.compute_dickson(sigma_multiplier(n, 1) as u64);
        lvl
    }

    fn compute_dickson(&self, a: u64) -> Vec<BigInt> {
        let (coef, idx) = fold_dickson(a as i64, self.n);
        let mut v = vec![BigInt::zero(); self.degree];
        v[idx] = BigInt::from(coef);
        cos_to_power(&v)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `2^n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Integer coefficients of `mu_n`, constant term first.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// Power sums `p_k` of the roots of `mu_n` for `k < 2^n`.
    pub fn power_sums(&self) -> &[BigInt] {
        &self.power_sums
    }

    pub fn parent(&self) -> Option<&Arc<Level>> {
        self.parent.as_ref()
    }

    /// `sigma(X_n)` reduced modulo `mu_n`.
    pub fn sigma_image(self: &Arc<Self>) -> FieldElem {
        FieldElem::from_parts(self, self.sigma_image.clone(), BigInt::one())
    }

    /// `D_a(X_n)` reduced modulo `mu_n`, cached.
    pub fn dickson(self: &Arc<Self>, a: i64) -> FieldElem {
        let a = a.unsigned_abs();
        let mut cache = self.dickson.lock().unwrap();
        let v = cache.entry(a).or_insert_with(|| self.compute_dickson(a)).clone();
        drop(cache);
        FieldElem::from_parts(self, v, BigInt::one())
    }

    /// Cached Dickson keys, for inspection.
    pub fn dickson_keys(&self) -> Vec<u64> {
        let mut k: Vec<u64> = self.dickson.lock().unwrap().keys().copied().collect();
        k.sort_unstable();
        k
    }

    pub fn generator(self: &Arc<Self>) -> FieldElem {
        FieldElem::generator(self)
    }

    fn reduce(&self, mut r: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        if r.len() > d {
            for i in (d..r.len()).rev() {
                if r[i].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut r[i]);
                for (j, m) in &self.reducer {
                    r[i - d + j] -= &c * m;
                }
            }
        }
        r.resize(d, BigInt::zero());
        r
    }
}

/// An element of `B_n`: `(sum num[i] X_n^i) / den`.
#[derive(Clone)]
pub struct FieldElem {
    level: Arc<Level>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for FieldElem {
    fn eq(&self, o: &Self) -> bool {
        self.level.n == o.level.n && self.den == o.den && self.num == o.num
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.level.n.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem[n={}]({})", self.level.n, self)
    }
}

/// Binary operations exposed through [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Level-checked `x op y`.
pub fn arith(op: ArithOp, x: &FieldElem, y: &FieldElem) -> Result<FieldElem> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
    }
}

fn normalize(num: &mut [BigInt], den: &mut BigInt) {
    if den.is_negative() {
        for c in num.iter_mut() {
            *c = -&*c;
        }
        *den = -&*den;
    }
    if num.iter().all(|c| c.is_zero()) {
        *den = BigInt::one();
        return;
    }
    let mut g = den.clone();
    for c in num.iter() {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    if !g.is_one() {
        for c in num.iter_mut() {
            *c = &*c / &g;
        }
        *den = &*den / &g;
    }
}

impl FieldElem {
    /// Build from numerators and a common denominator, normalizing. The
    /// numerator vector may be longer than the degree; it is reduced.
    pub fn from_parts(level: &Arc<Level>, num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut num = level.reduce(num);
        let mut den = den;
        normalize(&mut num, &mut den);
        FieldElem { level: level.clone(), num, den }
    }

    pub fn from_rational(level: &Arc<Level>, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); level.degree];
        num[0] = q.numer().clone();
        FieldElem::from_parts(level, num, q.denom().clone())
    }

    pub fn from_int(level: &Arc<Level>, v: impl Into<BigInt>) -> Self {
        FieldElem::from_rational(level, &BigRational::from_integer(v.into()))
    }

    pub fn zero(level: &Arc<Level>) -> Self {
        FieldElem::from_int(level, 0)
    }

    pub fn one(level: &Arc<Level>) -> Self {
        FieldElem::from_int(level, 1)
    }

    /// `X_n` (zero at level 0).
    pub fn generator(level: &Arc<Level>) -> Self {
        let mut num = vec![BigInt::zero(); level.degree + 1];
        num[1] = BigInt::one();
        FieldElem::from_parts(level, num, BigInt::one())
    }

    /// Rational power-basis coefficients, constant term first.
    pub fn from_coeffs(level: &Arc<Level>, coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        FieldElem::from_parts(level, num, den)
    }

    pub fn from_int_coeffs(level: &Arc<Level>, coeffs: &[i64]) -> Self {
        FieldElem::from_parts(level, coeffs.iter().map(|&c| BigInt::from(c)).collect(), BigInt::one())
    }

    pub fn level(&self) -> &Arc<Level> {
        &self.level
    }

    pub fn n(&self) -> u32 {
        self.level.n
    }

    pub fn degree(&self) -> usize {
        self.level.degree
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// In `Z[X_n]`, which is the full ring of integers of `B_n`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    fn check_level(&self, o: &FieldElem) -> Result<()> {
        if self.level.n != o.level.n {
            Err(Error::LevelMismatch { left: self.level.n, right: o.level.n })
        } else {
            Ok(())
        }
    }

    fn add_signed(&self, o: &FieldElem, neg: bool) -> FieldElem {
        let den = &self.den * &o.den;
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| {
                let (x, y) = (a * &o.den, b * &self.den);
                if neg {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        FieldElem::from_parts(&self.level, num, den)
    }

    pub fn try_add(&self, o: &FieldElem) -> Result<FieldElem> {
        self.check_level(o)?;
        Ok(self.add_signed(o, false))
    }

    pub fn try_sub(&self, o: &FieldElem) -> Result<FieldElem> {
        self.check_level(o)?;
        Ok(self.add_signed(o, true))
    }

    pub fn try_mul(&self, o: &FieldElem) -> Result<FieldElem> {
        self.check_level(o)?;
        let prod = poly_mul_int(&self.num, &o.num);
        Ok(FieldElem::from_parts(&self.level, prod, &self.den * &o.den))
    }

    pub fn scale(&self, q: &BigRational) -> FieldElem {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        FieldElem::from_parts(&self.level, num, &self.den * q.denom())
    }

    pub fn add_rational(&self, q: &BigRational) -> FieldElem {
        self + &FieldElem::from_rational(&self.level, q)
    }

    /// Multiplicative inverse through the tower: `1/(a + b X) = (a - b X) / N`
    /// with `N = a^2 - b^2 (2 + X_(n-1))` inverted one level down.
    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.level.n == 0 {
            let q = self.coeff(0);
            return Ok(FieldElem::from_rational(&self.level, &q.recip()));
        }
        let (a, b) = self.split()?;
        let norm = &(&a * &a) - &(&(&b * &b) * &two_plus_x(&a.level));
        let ninv = norm.inv()?;
        let conj = FieldElem::from_split(&a, &-&b);
        Ok(&conj * &ninv.lift())
    }

    /// Inverse by the extended Euclidean algorithm against `mu_n`.
    pub fn inv_by_gcd(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = QPoly::from_ints(&self.level.min_poly);
        let mut p = QPoly(self.coeffs());
        p.trim();
        let inv = p
            .inverse_mod(&m)
            .ok_or_else(|| Error::Invariant("minimal polynomial shares a factor with an element".into()))?;
        Ok(FieldElem::from_coeffs(&self.level, &inv.0))
    }

    pub fn try_div(&self, o: &FieldElem) -> Result<FieldElem> {
        self.check_level(o)?;
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = FieldElem::one(&self.level);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Image in `B_(n+1)` under `X_n -> X_(n+1)^2 - 2`.
    pub fn lift(&self) -> FieldElem {
        let up = level(self.level.n + 1);
        let sub = [BigInt::from(-2), BigInt::zero(), BigInt::one()];
        let mut acc: Vec<BigInt> = vec![BigInt::zero()];
        for c in self.num.iter().rev() {
            acc = poly_mul_int(&acc, &sub);
            acc[0] += c;
        }
        FieldElem::from_parts(&up, acc, self.den.clone())
    }

    /// Lift repeatedly until level `m >= n`.
    pub fn lift_to(&self, m: u32) -> FieldElem {
        let mut x = self.clone();
        while x.level.n < m {
            x = x.lift();
        }
        x
    }

    /// The unique `(a, b)` over `B_(n-1)` with `self = a + b X_n`.
    pub fn split(&self) -> Result<(FieldElem, FieldElem)> {
        let parent = self
            .level
            .parent
            .clone()
            .ok_or_else(|| Error::Usage("split needs level n >= 1".into()))?;
        // even part: sum c_(2i) (2 + Y)^i; odd part likewise with c_(2i+1)
        let half = self.level.degree / 2;
        let horner = |offset: usize| {
            let mut acc = vec![BigInt::zero(); half];
            for i in (0..half).rev() {
                let mut next = vec![BigInt::zero(); half];
                for k in 0..half {
                    if acc[k].is_zero() {
                        continue;
                    }
                    next[k] += &acc[k] * 2u32;
                    if k + 1 < half {
                        next[k + 1] += &acc[k];
                    }
                }
                next[0] += &self.num[2 * i + offset];
                acc = next;
            }
            FieldElem::from_parts(&parent, acc, self.den.clone())
        };
        Ok((horner(0), horner(1)))
    }

    /// `lift(a) + lift(b) X_n`.
    pub fn from_split(a: &FieldElem, b: &FieldElem) -> FieldElem {
        assert_eq!(a.level.n, b.level.n, "split parts at different levels");
        let la = a.lift();
        let lb = b.lift();
        &la + &(&lb * &FieldElem::generator(&la.level))
    }

    /// `N_(n/n-1)(x) = x sigma^(2^(n-1))(x) = a^2 - b^2 (2 + X_(n-1))`.
    pub fn rel_norm(&self) -> Result<FieldElem> {
        let (a, b) = self.split()?;
        Ok(&(&a * &a) - &(&(&b * &b) * &two_plus_x(&a.level)))
    }

    /// Relative norm computed as `x * sigma^(2^(n-1))(x)` and pushed down.
    pub fn rel_norm_by_conjugation(&self) -> Result<FieldElem> {
        if self.level.n == 0 {
            return Err(Error::Usage("relative norm needs level n >= 1".into()));
        }
        let half = (self.level.degree / 2) as i64;
        let prod = self * &self.sigma_pow(half);
        let (a, b) = prod.split()?;
        if !b.is_zero() {
            return Err(Error::Invariant("norm does not lie in the subfield".into()));
        }
        Ok(a)
    }

    /// Coordinates over `1, D_1(X_n), ..., D_(d-1)(X_n)`, sharing this
    /// element's denominator.
    pub fn cosine_coords(&self) -> Vec<BigInt> {
        power_to_cos(&self.num)
    }

    pub fn from_cosine(level: &Arc<Level>, coords: &[BigInt], den: &BigInt) -> FieldElem {
        assert_eq!(coords.len(), level.degree);
        FieldElem::from_parts(level, cos_to_power(coords), den.clone())
    }

    /// `sigma^j`, as a signed permutation of cosine coordinates.
    pub fn sigma_pow(&self, j: i64) -> FieldElem {
        let n = self.level.n;
        let r = sigma_multiplier(n, j);
        if r == 1 {
            return self.clone();
        }
        let v = self.cosine_coords();
        let mut w = vec![BigInt::zero(); v.len()];
        w[0] = v[0].clone();
        for (i, c) in v.iter().enumerate().skip(1) {
            let (coef, idx) = fold_dickson(i as i64 * r, n);
            debug_assert!(idx != 0 && coef.abs() == 1);
            if coef > 0 {
                w[idx] += c;
            } else {
                w[idx] -= c;
            }
        }
        FieldElem::from_cosine(&self.level, &w, &self.den)
    }

    /// Evaluate this element's polynomial at another element of the same level.
    pub fn substitute(&self, at: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero(&self.level);
        for i in (0..self.num.len()).rev() {
            acc = &acc * at;
            if !self.num[i].is_zero() {
                acc = &acc + &FieldElem::from_int(&self.level, self.num[i].clone());
            }
        }
        let inv_den = BigRational::new(BigInt::one(), self.den.clone());
        acc.scale(&inv_den)
    }

    /// `sigma^j` by substituting the image of `X_n` under `sigma^j`, the
    /// image being built from `sigma(X_n)` by repeated squaring.
    pub fn sigma_pow_by_substitution(&self, j: i64) -> FieldElem {
        let order = self.level.degree as i64;
        let mut e = j.rem_euclid(order);
        let mut image = FieldElem::generator(&self.level);
        let mut base = self.level.sigma_image();
        if self.level.n == 0 {
            return self.clone();
        }
        while e > 0 {
            if e & 1 == 1 {
                image = image.substitute(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.substitute(&base);
            }
        }
        self.substitute(&image)
    }

    /// `Tr_(B_n/Q)`, from the power sums of the roots of `mu_n`.
    pub fn trace(&self) -> BigRational {
        let s: BigInt = self
            .num
            .iter()
            .zip(&self.level.power_sums)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, p)| c * p)
            .sum();
        BigRational::new(s, self.den.clone())
    }

    /// Trace as `2^n` times the constant cosine coordinate.
    pub fn trace_by_cosine(&self) -> BigRational {
        let v = self.cosine_coords();
        BigRational::new(&v[0] * BigInt::from(self.level.degree as u64), self.den.clone())
    }

    /// The same element expressed at the lowest level containing it.
    pub fn lowest(&self) -> FieldElem {
        let mut x = self.clone();
        while x.level.n > 0 && x.num.iter().skip(1).step_by(2).all(|c| c.is_zero()) {
            x = x.split().expect("level >= 1").0;
        }
        x
    }
}

fn two_plus_x(level: &Arc<Level>) -> FieldElem {
    let mut num = vec![BigInt::zero(); level.degree + 1];
    num[0] = BigInt::from(2);
    num[1] += BigInt::one();
    FieldElem::from_parts(level, num, BigInt::one())
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldElem {
    /// Canonical polynomial in `X_m` for the lowest level `m` holding the value,
    /// e.g. `2*X1 - 2` or `-X2^3 + 3*X2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.lowest();
        let m = x.level.n;
        let mut out = String::new();
        for i in (0..x.num.len()).rev() {
            if x.num[i].is_zero() {
                continue;
            }
            let c = x.coeff(i);
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if i == 0 {
                out.push_str(&fmt_rational(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&fmt_rational(&a));
                    out.push('*');
                }
                out.push_str(&format!("X{m}"));
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    /// Panics when the operands live at different levels; see [`arith`].
    fn add(self, o: &FieldElem) -> FieldElem {
        self.try_add(o).expect("level mismatch in addition")
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        self.try_sub(o).expect("level mismatch in subtraction")
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        self.try_mul(o).expect("level mismatch in multiplication")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            level: self.level.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

/// `a + b X_n` with `a, b` in `B_(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerPair {
    pub a: FieldElem,
    pub b: FieldElem,
}

impl TowerPair {
    pub fn new(a: FieldElem, b: FieldElem) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::LevelMismatch { left: a.n(), right: b.n() });
        }
        Ok(TowerPair { a, b })
    }

    pub fn from_elem(x: &FieldElem) -> Result<Self> {
        let (a, b) = x.split()?;
        Ok(TowerPair { a, b })
    }

    /// Level of the element the pair describes (one above its parts).
    pub fn n(&self) -> u32 {
        self.a.n() + 1
    }

    pub fn to_elem(&self) -> FieldElem {
        FieldElem::from_split(&self.a, &self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn el(n: u32, c: &[i64]) -> FieldElem {
        FieldElem::from_int_coeffs(&level(n), c)
    }

    #[test]
    fn minimal_polynomials_of_first_levels() {
        assert_eq!(level(0).min_poly(), ints(&[0, 1]).as_slice());
        assert_eq!(level(1).min_poly(), ints(&[-2, 0, 1]).as_slice());
        assert_eq!(level(2).min_poly(), ints(&[2, 0, -4, 0, 1]).as_slice());
    }

    #[test]
    fn minimal_polynomial_is_dickson_of_power_of_two() {
        // D_(k+1) = x D_k - D_(k-1), D_0 = 2, D_1 = x
        let mut prev = ints(&[2]);
        let mut cur = ints(&[0, 1]);
        for k in 1..32u32 {
            let mut next = vec![BigInt::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
            if (k + 1).is_power_of_two() {
                let n = (k + 1).trailing_zeros();
                assert_eq!(level(n).min_poly(), cur.as_slice(), "level {n}");
            }
        }
    }

    #[test]
    fn sigma_image_at_level_two() {
        let l = level(2);
        assert_eq!(l.sigma_image(), el(2, &[0, 3, 0, -1]));
        assert_eq!(l.sigma_image().to_string(), "-X2^3 + 3*X2");
        let keys = l.dickson_keys();
        assert!([1, 3, 5].iter().all(|a| keys.contains(a)));
    }

    #[test]
    fn arithmetic_examples() {
        let x2 = level(2).generator();
        assert_eq!(&x2 * &x2, el(2, &[0, 0, 1]));
        let p = &el(1, &[1, 1]) * &el(1, &[-1, 1]);
        assert!(p.is_one());
        let y = &el(2, &[0, 0, 1]) + &el(2, &[-2]);
        assert_eq!(y, level(1).generator().lift());
        assert!(matches!(
            arith(ArithOp::Add, &el(1, &[1]), &el(2, &[1])),
            Err(Error::LevelMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn inverse_examples() {
        let a = el(1, &[1, 1]).inv().unwrap();
        assert_eq!(a, el(1, &[-1, 1]));
        let a1 = a.scale(&BigRational::from_integer(2.into()));
        assert_eq!(a1.to_string(), "2*X1 - 2");
        let x = el(2, &[-1, 1]);
        let i = x.inv().unwrap();
        assert!((&x * &i).is_one());
        assert_eq!(i, x.inv_by_gcd().unwrap());
        assert_eq!(FieldElem::zero(&level(3)).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn split_and_lift() {
        let x2 = level(2).generator();
        let (a, b) = x2.split().unwrap();
        assert!(a.is_zero() && b.is_one());
        let (a, b) = (&x2 * &x2).split().unwrap();
        assert_eq!(a, el(1, &[2, 1]));
        assert!(b.is_zero());
        assert!(FieldElem::zero(&level(1)).lift().is_zero());
        assert_eq!(level(1).generator().lift(), el(2, &[-2, 0, 1]));
        let eps = (&x2 + &el(2, &[1])).try_div(&(&x2 - &el(2, &[1]))).unwrap();
        let (a, b) = eps.split().unwrap();
        let n = &(&a * &a) - &(&(&b * &b) * &el(1, &[2, 1]));
        assert!(n.is_one());
        assert!(el(0, &[3]).split().is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(level(1).generator().sigma_pow(1), el(1, &[0, -1]));
        assert_eq!(level(2).generator().sigma_pow(2), el(2, &[0, -1]));
        let x = el(3, &[1, -2, 0, 5, 7, 0, 0, 3]);
        assert_eq!(x.sigma_pow(8), x);
        for j in 0..8 {
            assert_eq!(x.sigma_pow(j), x.sigma_pow_by_substitution(j), "j = {j}");
        }
    }

    #[test]
    fn relative_norm_examples() {
        for n in 1..=5 {
            let l = level(n);
            let one_plus_x = &FieldElem::one(&l) + &l.generator();
            let parent = level(n - 1);
            let expect = -&(&FieldElem::one(&parent) + &parent.generator());
            assert_eq!(one_plus_x.rel_norm().unwrap(), expect, "level {n}");
            assert_eq!(one_plus_x.rel_norm_by_conjugation().unwrap(), expect);
        }
        let c = FieldElem::from_rational(&level(3), &BigRational::new(3.into(), 7.into()));
        assert_eq!(
            c.rel_norm().unwrap().as_rational(),
            Some(BigRational::new(9.into(), 49.into()))
        );
    }

    #[test]
    fn trace_examples() {
        for n in 0..=6 {
            let l = level(n);
            assert_eq!(l.generator().trace(), BigRational::zero());
            assert_eq!(FieldElem::one(&l).trace(), BigRational::from_integer((1i64 << n).into()));
        }
        let x = el(3, &[4, -1, 0, 2, 0, 0, 9, 1]);
        assert_eq!(x.trace(), x.trace_by_cosine());
    }

    #[test]
    fn display_uses_lowest_level() {
        let x = level(1).generator().lift_to(3);
        assert_eq!(x.to_string(), "X1");
        assert_eq!(FieldElem::zero(&level(2)).to_string(), "0");
        let h = FieldElem::from_rational(&level(2), &BigRational::new((-1).into(), 2.into()));
        assert_eq!(h.to_string(), "-1/2");
        assert_eq!(el(2, &[0, -1, 0, 1]).to_string(), "X2^3 - X2");
    }

    #[test]
    fn cosine_round_trip() {
        let x = el(4, &[3, 1, -4, 1, 5, -9, 2, 6, 5, 3, -5, 8, 9, 7, 9, 3]);
        let v = x.cosine_coords();
        assert_eq!(FieldElem::from_cosine(x.level(), &v, x.denominator()), x);
    }

    #[test]
    fn ceiling_enforced() {
        assert_eq!(
            Tower::new(4).level(5).unwrap_err(),
            Error::LevelLimit { requested: 5, ceiling: 4 }
        );
        assert!(make_level(10).is_ok());
        assert!(make_level(11).is_err());
    }
}
