//! Rigorous real enclosures with arbitrary-precision dyadic endpoints.
//!
//! Every operation rounds its endpoints outward, so the true real value is
//! always contained in `[lo, hi]`. Precision is counted in significant bits
//! of the endpoint mantissas.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Guard bits added internally by the elementary functions.
const GUARD: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

fn shr_floor(x: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    if x.sign() != Sign::Minus {
        x >> s
    } else {
        let t: BigInt = -x - 1u32;
        -(t >> s) - 1u32
    }
}

fn shr_ceil(x: &BigInt, s: u64) -> BigInt {
    -shr_floor(&-x, s)
}

fn div_dir(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

/// A dyadic rational `mant * 2^exp`, kept with an odd mantissa.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    fn aligned(&self, o: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &o.mant << (o.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(o);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &o.mant, self.exp + o.exp)
    }

    pub fn mul_2exp(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let m = match dir {
            Round::Down => shr_floor(&self.mant, s),
            Round::Up => shr_ceil(&self.mant, s),
        };
        Dyadic::new(m, self.exp + s as i64)
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom();
        let k = prec as i64 + den.bits() as i64 - num.bits() as i64 + 2;
        let (n, d) = if k >= 0 {
            (num << k as u64, den.clone())
        } else {
            (num.clone(), den << (-k) as u64)
        };
        Dyadic::new(div_dir(&n, &d, dir), -k)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Quotient rounded to `prec` bits.
    pub fn div(&self, o: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = prec as i64 + o.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let (n, d) = if k >= 0 {
            (&self.mant << k as u64, o.mant.clone())
        } else {
            (self.mant.clone(), &o.mant << (-k) as u64)
        };
        Dyadic::new(div_dir(&n, &d, dir), self.exp - o.exp - k)
    }

    /// Directed `k`-th root of a non-negative value.
    pub fn root(&self, k: u32, prec: u32, dir: Round) -> Dyadic {
        assert!(self.signum() >= 0, "root of a negative dyadic");
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let want = k as i64 * (prec as i64 + 2);
        let mut s = (want - self.mant.bits() as i64).max(0);
        s += (self.exp - s).rem_euclid(k as i64);
        let big = &self.mant << s as u64;
        let mut r = if k == 2 { big.sqrt() } else { big.nth_root(k) };
        if dir == Round::Up && num_traits::pow(r.clone(), k as usize) != big {
            r += 1u32;
        }
        Dyadic::new(r, (self.exp - s) / k as i64)
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        let lhs = &self.mant * q.denom();
        if self.exp >= 0 {
            (lhs << self.exp as u64).cmp(q.numer())
        } else {
            lhs.cmp(&(q.numer() << (-self.exp) as u64))
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 60).max(0);
        let m = shr_floor(&self.mant, shift as u64).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + shift;
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// Decimal rendering with `digits` places after the point, rounded in `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let q = self.to_rational() * BigRational::from_integer(scale);
        let v = match dir {
            Round::Down => q.floor().to_integer(),
            Round::Up => q.ceil().to_integer(),
        };
        let neg = v.is_negative();
        let mut s = v.abs().to_string();
        if digits > 0 {
            while s.len() <= digits as usize {
                s.insert(0, '0');
            }
            s.insert(s.len() - digits as usize, '.');
        }
        if neg {
            s.insert(0, '-');
        }
        s
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), o.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        let (a, b, _) = self.aligned(o);
        a.cmp(&b)
    }
}

/// Closed real interval `[lo, hi]` with outward-rounded dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        Interval::new(d.clone(), d, prec)
    }

    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Self {
        Interval::point(Dyadic::from_int(v), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Interval::from_int(1, prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(&self, prec: u32) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_2exp(-1)
    }

    /// Half-width; `midpoint ± radius` is exactly `[lo, hi]`.
    pub fn radius(&self) -> Dyadic {
        self.hi.sub(&self.lo).mul_2exp(-1)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    fn out(lo: Dyadic, hi: Dyadic, prec: u32) -> Interval {
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Certified `self < other` (strict separation of the enclosures).
    pub fn lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn gt(&self, other: &Interval) -> bool {
        other.lt(self)
    }

    pub fn lt_rational(&self, q: &BigRational) -> bool {
        self.hi.cmp_rational(q) == Ordering::Less
    }

    pub fn gt_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) == Ordering::Greater
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) != Ordering::Greater && self.hi.cmp_rational(q) != Ordering::Less
    }

    pub fn contains(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Whole enclosure lies in `[lo, hi)`.
    pub fn within_half_open(&self, lo: &BigRational, hi: &BigRational) -> bool {
        self.lo.cmp_rational(lo) != Ordering::Less && self.hi.cmp_rational(hi) == Ordering::Less
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    /// Widen symmetrically by `r >= 0`.
    pub fn widen(&self, r: &Dyadic) -> Interval {
        Interval::out(self.lo.sub(r), self.hi.add(r), self.prec)
    }

    pub fn abs(&self) -> Interval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            -self
        } else {
            let m = self.lo.abs().max(self.hi.clone());
            Interval { lo: Dyadic::zero(), hi: m, prec: self.prec }
        }
    }

    pub fn mul_2exp(&self, k: i64) -> Interval {
        Interval { lo: self.lo.mul_2exp(k), hi: self.hi.mul_2exp(k), prec: self.prec }
    }

    pub fn mul_int(&self, k: i64) -> Interval {
        self * &Interval::from_int(k, self.prec)
    }

    pub fn div_int(&self, k: i64) -> Interval {
        assert!(k != 0);
        let d = Dyadic::from_int(k);
        let (a, b) = (
            self.lo.div(&d, self.prec, Round::Down),
            self.hi.div(&d, self.prec, Round::Up),
        );
        let (a2, b2) = (
            self.lo.div(&d, self.prec, Round::Up),
            self.hi.div(&d, self.prec, Round::Down),
        );
        if k > 0 {
            Interval { lo: a, hi: b, prec: self.prec }
        } else {
            Interval { lo: b2, hi: a2, prec: self.prec }
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if self.contains_zero() {
            Interval::out(Dyadic::zero(), a.max(b), self.prec)
        } else {
            let (l, h) = if a < b { (a, b) } else { (b, a) };
            Interval::out(l, h, self.prec)
        }
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::Undecided {
                what: "reciprocal of an enclosure containing zero".into(),
                bits: self.prec,
            });
        }
        let one = Dyadic::from_int(1);
        Ok(Interval {
            lo: one.div(&self.hi, self.prec, Round::Down),
            hi: one.div(&self.lo, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    pub fn div(&self, o: &Interval) -> Result<Interval> {
        Ok(self * &o.recip()?)
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo.signum() < 0 {
            return Err(Error::Undecided {
                what: "square root of an enclosure reaching below zero".into(),
                bits: self.prec,
            });
        }
        Ok(Interval {
            lo: self.lo.root(2, self.prec, Round::Down),
            hi: self.hi.root(2, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    /// `k`-th root of a non-negative enclosure.
    pub fn root(&self, k: u32) -> Result<Interval> {
        if self.lo.signum() < 0 {
            return Err(Error::Undecided {
                what: "root of an enclosure reaching below zero".into(),
                bits: self.prec,
            });
        }
        Ok(Interval {
            lo: self.lo.root(k, self.prec, Round::Down),
            hi: self.hi.root(k, self.prec, Round::Up),
            prec: self.prec,
        })
    }

    pub fn pow_u(&self, e: u32) -> Interval {
        let mut acc = Interval::one(self.prec);
        let mut base = self.clone();
        let mut e = e;
        if e % 2 == 0 || !self.contains_zero() {
            // even powers of a sign-mixed enclosure need `sqr` to stay tight
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = base.sqr();
                }
            }
            if self.contains_zero() {
                return acc.abs();
            }
            acc
        } else {
            while e > 0 {
                acc = &acc * &base;
                e -= 1;
            }
            acc
        }
    }

    /// `self^(p/q)` for a strictly positive enclosure.
    pub fn pow_ratio(&self, p: i64, q: u32) -> Result<Interval> {
        if !self.is_positive() {
            return Err(Error::Undecided {
                what: "fractional power of a non-positive enclosure".into(),
                bits: self.prec,
            });
        }
        let wp = self.prec + GUARD;
        let x = self.with_precision(wp);
        let powered = x.pow_u(p.unsigned_abs() as u32).root(q)?;
        let r = if p < 0 { powered.recip()? } else { powered };
        Ok(r.with_precision(self.prec))
    }

    pub fn cos(&self) -> Interval {
        trig(self, false)
    }

    pub fn sin(&self) -> Interval {
        trig(self, true)
    }

    /// Natural logarithm of a strictly positive enclosure.
    pub fn ln(&self) -> Result<Interval> {
        if !self.is_positive() {
            return Err(Error::Undecided {
                what: "logarithm of a non-positive enclosure".into(),
                bits: self.prec,
            });
        }
        let wp = self.prec + GUARD;
        let lo = ln_point(&self.lo, wp);
        let hi = if self.hi == self.lo { lo.clone() } else { ln_point(&self.hi, wp) };
        Ok(Interval::out(lo.lo, hi.hi, self.prec))
    }

    pub fn decimal_bounds(&self, digits: u32) -> (String, String) {
        (self.lo.to_decimal(digits, Round::Down), self.hi.to_decimal(digits, Round::Up))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, h) = self.decimal_bounds(12);
        write!(f, "[{l}, {h}]")
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval::out(self.lo.add(&o.lo), self.hi.add(&o.hi), self.prec.max(o.prec))
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval::out(self.lo.sub(&o.hi), self.hi.sub(&o.lo), self.prec.max(o.prec))
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let prec = self.prec.max(o.prec);
        if self.lo.signum() >= 0 && o.lo.signum() >= 0 {
            return Interval::out(self.lo.mul(&o.lo), self.hi.mul(&o.hi), prec);
        }
        let c = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::out(lo, hi, prec)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, o: Interval) -> Interval {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Interval> for Interval {
            type Output = Interval;
            fn $m(self, o: &Interval) -> Interval {
                (&self).$m(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        let mut acc: Option<Interval> = None;
        for x in iter {
            acc = Some(match acc {
                None => x,
                Some(a) => a + x,
            });
        }
        acc.unwrap_or_else(|| Interval::zero(64))
    }
}

fn cached(
    table: &'static OnceLock<Mutex<HashMap<u32, Interval>>>,
    prec: u32,
    compute: fn(u32) -> Interval,
) -> Interval {
    let map = table.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = compute(prec);
    map.lock().unwrap().insert(prec, v.clone());
    v
}

/// Alternating series `sum (-1)^j / ((2j+1) k^(2j+1))`.
fn atan_inv(k: u32, wp: u32) -> Interval {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 4);
    let mut pow = k.clone();
    let mut sum = Interval::zero(wp);
    let mut j: u64 = 0;
    loop {
        let den = &pow * BigInt::from(2 * j + 1);
        let term = Interval::from_rational(&BigRational::new(BigInt::one(), den), wp);
        if term.hi < eps {
            // alternating with decreasing terms: tail bounded by the first omitted term
            return sum.widen(&term.hi);
        }
        sum = if j % 2 == 0 { sum + term } else { sum - term };
        pow *= &k2;
        j += 1;
    }
}

fn compute_pi(prec: u32) -> Interval {
    let wp = prec + GUARD;
    let a = atan_inv(5, wp).mul_int(16);
    let b = atan_inv(239, wp).mul_int(4);
    (a - b).with_precision(prec)
}

/// Enclosure of pi.
pub fn pi(prec: u32) -> Interval {
    static TABLE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    cached(&TABLE, prec, compute_pi)
}

fn atanh_series(z: &Interval, wp: u32) -> Interval {
    let z2 = z.sqr();
    let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 4);
    let mut pow = z.clone();
    let mut sum = Interval::zero(wp);
    let mut j: i64 = 0;
    loop {
        let term = pow.div_int(2 * j + 1);
        let mag = term.abs().hi;
        if mag < eps {
            // |z| <= 1/3 here, so the geometric tail is below 2 * |term|
            return sum.widen(&mag.mul_2exp(1));
        }
        sum = sum + term;
        pow = &pow * &z2;
        j += 1;
    }
}

fn compute_ln2(prec: u32) -> Interval {
    let wp = prec + GUARD;
    let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), wp);
    atanh_series(&third, wp).mul_2exp(1).with_precision(prec)
}

pub fn ln2(prec: u32) -> Interval {
    static TABLE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    cached(&TABLE, prec, compute_ln2)
}

fn ln_point(d: &Dyadic, wp: u32) -> Interval {
    let mut k = d.mantissa().bits() as i64 - 1 + d.exponent();
    let mut y = d.mul_2exp(-k);
    // y in [1, 2); shift into [3/4, 3/2]
    if y.cmp_rational(&BigRational::new(3.into(), 2.into())) == Ordering::Greater {
        k += 1;
        y = y.mul_2exp(-1);
    }
    let yi = Interval::point(y, wp);
    let one = Interval::one(wp);
    let z = (&yi - &one).div(&(&yi + &one)).expect("y + 1 > 0");
    let atanh = atanh_series(&z, wp).mul_2exp(1);
    ln2(wp).mul_int(k) + atanh
}

/// Taylor evaluation of cos or sin at a dyadic point with |x| <= 4.
fn trig_point(x: &Dyadic, wp: u32, sine: bool) -> Interval {
    let xi = Interval::point(x.clone(), wp);
    let x2 = xi.sqr();
    let eps = Dyadic::new(BigInt::one(), -(wp as i64) - 4);
    let mut term = if sine { xi.clone() } else { Interval::one(wp) };
    let mut sum = Interval::zero(wp);
    let mut k: i64 = 0;
    loop {
        let mag = term.abs().hi;
        // past the hump of x^j/j! the current term bounds the Lagrange remainder
        if mag < eps && k > 4 {
            return sum.widen(&mag);
        }
        sum = if k % 2 == 0 { sum + &term } else { sum - &term };
        k += 1;
        let (a, b) = if sine { (2 * k, 2 * k + 1) } else { (2 * k - 1, 2 * k) };
        term = (&term * &x2).div_int(a * b);
    }
}

fn trig(x: &Interval, sine: bool) -> Interval {
    let prec = x.prec;
    let wp = prec + GUARD;
    let mut y = x.with_precision(wp);
    let m = y.to_f64();
    if !m.is_finite() {
        return Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1), prec);
    }
    if m.abs() > 3.2 {
        let turns = (m / (2.0 * std::f64::consts::PI)).round() as i64;
        let two_pi = pi(wp).mul_2exp(1);
        y = &y - &two_pi.mul_int(turns);
    }
    let r = y.radius();
    if r.cmp_rational(&BigRational::from_integer(1.into())) == Ordering::Greater {
        return Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1), prec);
    }
    let mid = y.midpoint().round(wp, Round::Down);
    // derivative is bounded by 1; the rounded midpoint moves by at most one more ulp
    let slack = r.add(&y.midpoint().sub(&mid).abs());
    let v = trig_point(&mid, wp, sine).widen(&slack);
    let one = Dyadic::from_int(1);
    let lo = v.lo.clone().max(one.neg());
    let hi = v.hi.clone().min(one);
    Interval::out(lo, hi, prec)
}

/// `cos(q * pi)` for an exact rational `q`, reduced exactly before evaluation.
pub fn cos_pi(q: &BigRational, prec: u32) -> Interval {
    let two = BigRational::from_integer(2.into());
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let mut r = q - (q / &two).floor() * &two; // [0, 2)
    if r > one {
        r = &two - r;
    }
    let mut sign = 1;
    if r > half {
        r = &one - r;
        sign = -1;
    }
    let v = if r.is_zero() {
        Interval::one(prec)
    } else if r == half {
        Interval::zero(prec)
    } else if r == BigRational::new(1.into(), 3.into()) {
        Interval::from_rational(&half, prec)
    } else {
        let wp = prec + GUARD;
        (&pi(wp) * &Interval::from_rational(&r, wp)).cos().with_precision(prec)
    };
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// `sin(q * pi)`.
pub fn sin_pi(q: &BigRational, prec: u32) -> Interval {
    cos_pi(&(BigRational::new(1.into(), 2.into()) - q), prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_matches_known_digits() {
        let p = pi(200);
        // 3.14159265358979323846264338327950288...
        let lo = BigRational::new(
            "314159265358979323846264338327950288".parse().unwrap(),
            num_traits::pow(BigInt::from(10), 35),
        );
        let hi = &lo + BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 35));
        assert!(p.within_half_open(&lo, &hi));
        assert!(p.width_f64() < 1e-55);
    }

    #[test]
    fn directed_rounding_brackets_rationals() {
        let third = q(1, 3);
        let iv = Interval::from_rational(&third, 64);
        assert!(iv.contains_rational(&third));
        assert!(iv.width_f64() < 1e-18);
        let neg = Interval::from_rational(&q(-7, 3), 64);
        assert!(neg.contains_rational(&q(-7, 3)));
    }

    #[test]
    fn sqrt_two_encloses() {
        let s = Interval::from_int(2, 128).sqrt().unwrap();
        assert!(s.sqr().contains_rational(&q(2, 1)));
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cos_pi_special_and_generic_angles() {
        assert!(cos_pi(&q(1, 2), 64).contains_rational(&q(0, 1)));
        assert!(cos_pi(&q(5, 3), 64).contains_rational(&q(1, 2)));
        let c = cos_pi(&q(1, 8), 128);
        assert!((c.to_f64() - (std::f64::consts::PI / 8.0).cos()).abs() < 1e-15);
        let c = cos_pi(&q(13, 8), 128);
        assert!((c.to_f64() - (13.0 * std::f64::consts::PI / 8.0).cos()).abs() < 1e-15);
        let s = sin_pi(&q(1, 6), 96);
        assert!((s.to_f64() - 0.5).abs() < 1e-25);
    }

    #[test]
    fn cos_of_wide_argument_contains_pointwise_values() {
        let x = Interval::new(Dyadic::from_int(7), Dyadic::from_int(8), 64);
        let c = x.cos();
        for t in [7.0f64, 7.25, 7.5, 7.75, 8.0] {
            let v = Interval::from_rational(&BigRational::from_float(t.cos()).unwrap(), 64);
            assert!(c.overlaps(&v), "cos({t}) outside {c}");
        }
    }

    #[test]
    fn ln_of_known_values() {
        let l = Interval::from_int(10, 128).ln().unwrap();
        assert!((l.to_f64() - 10f64.ln()).abs() < 1e-15);
        assert!(l.width_f64() < 1e-30);
        let l = Interval::from_rational(&q(1, 7), 128).ln().unwrap();
        assert!((l.to_f64() - (1.0f64 / 7.0).ln()).abs() < 1e-15);
        assert!(Interval::one(64).ln().unwrap().contains_rational(&q(0, 1)));
    }

    #[test]
    fn fractional_powers() {
        let x = Interval::from_int(8, 128);
        assert!(x.pow_ratio(2, 3).unwrap().contains_rational(&q(4, 1)));
        assert!(x.pow_ratio(-1, 3).unwrap().contains_rational(&q(1, 2)));
        let y = Interval::from_rational(&q(3, 2), 128).pow_ratio(7, 10).unwrap();
        assert!((y.to_f64() - 1.5f64.powf(0.7)).abs() < 1e-14);
    }

    #[test]
    fn decimal_rendering_is_directed() {
        let iv = Interval::from_rational(&q(2, 3), 64);
        let (l, h) = iv.decimal_bounds(4);
        assert_eq!(l, "0.6666");
        assert_eq!(h, "0.6667");
        assert_eq!(Dyadic::from_int(-3).mul_2exp(-2).to_decimal(3, Round::Down), "-0.750");
    }

    #[test]
    fn reciprocal_of_straddling_interval_is_rejected() {
        let x = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1), 64);
        assert!(x.recip().is_err());
    }
}
