//! Dense univariate polynomials over Q, used for the extended-gcd inverse
//! and for expanding integer polynomials in tests and checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients in increasing degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_ints(c: &[BigInt]) -> Self {
        let mut p = QPoly(c.iter().map(|x| BigRational::from_integer(x.clone())).collect());
        p.trim();
        p
    }

    pub fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        let mut r = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            r[i] += c;
        }
        for (i, c) in o.0.iter().enumerate() {
            r[i] -= c;
        }
        let mut p = QPoly(r);
        p.trim();
        p
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly(vec![]);
        }
        let mut r = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        let mut p = QPoly(r);
        p.trim();
        p
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (QPoly(vec![]), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = &r[i] / &lead;
            for (j, dj) in d.0.iter().enumerate() {
                r[i - dd + j] -= &c * dj;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        let mut q = QPoly(q);
        let mut r = QPoly(r);
        q.trim();
        r.trim();
        (q, r)
    }

    /// Inverse of `self` modulo `m` by the extended Euclidean algorithm, or
    /// `None` when the two share a factor.
    pub fn inverse_mod(&self, m: &QPoly) -> Option<QPoly> {
        let (mut r0, mut r1) = (m.clone(), self.div_rem(m).1);
        let (mut t0, mut t1) = (QPoly(vec![]), QPoly(vec![BigRational::one()]));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let c = r0.0[0].clone();
        Some(QPoly(t0.0.into_iter().map(|x| x / &c).collect()).div_rem(m).1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn inverse_of_one_plus_x_mod_x2_minus_2() {
        let inv = p(&[1, 1]).inverse_mod(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(inv, p(&[-1, 1]));
    }

    #[test]
    fn shared_factor_has_no_inverse() {
        // x^2 - 1 = (x - 1)(x + 1)
        assert!(p(&[-1, 1]).inverse_mod(&p(&[-1, 0, 1])).is_none());
    }

    #[test]
    fn division_reconstructs() {
        let a = p(&[3, 0, -2, 5, 1]);
        let b = p(&[1, 2, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).sub(&a.sub(&r)), QPoly(vec![]));
    }
}
