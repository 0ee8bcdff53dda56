//! Nearest-point continued fractions over `Z[X_(n-1)]`.
//!
//! For `alpha_0` in `B_n` the expansion is `a_k = nearest(alpha_k)` and
//! `alpha_(k+1) = 1 / (alpha_k - a_k)`, where `nearest` is the closest lattice
//! point of `Z[X_(n-1)]` under the embedding of [`crate::embedding`].
//! Complete quotients are kept exactly, so periodicity is detected by exact
//! equality.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::embedding::{conjugates, floor_nearest, radicals, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::field::{level, FieldElem, TowerPair};
use crate::interval::Interval;
use crate::report::{CheckRecord, Verdict};

#[derive(Clone, Debug)]
pub struct CFExpansion {
    pub n: u32,
    pub alpha0: FieldElem,
    /// `a_0, a_1, ...` in `Z[X_(n-1)]`.
    pub quotients: Vec<FieldElem>,
    /// `alpha_0, alpha_1, ...` as pairs over `B_(n-1)`.
    pub completes: Vec<TowerPair>,
    /// Index of the first repeated complete quotient (meaningful when `period > 0`).
    pub preperiod: usize,
    /// Length of the detected period; 0 when none was found.
    pub period: usize,
    /// The last remainder was zero: `alpha_0` has a finite expansion.
    pub finite: bool,
}

impl CFExpansion {
    /// `a_k`, extending a detected period as needed.
    pub fn quotient(&self, k: usize) -> Option<&FieldElem> {
        if k < self.quotients.len() {
            return Some(&self.quotients[k]);
        }
        if self.period == 0 {
            return None;
        }
        let idx = self.preperiod + (k - self.preperiod) % self.period;
        self.quotients.get(idx)
    }

    /// `[a_0, ..., a_(m-1), alpha_m]` folded exactly into `B_n`.
    pub fn reconstruct(&self, m: usize) -> Result<FieldElem> {
        let mut v = self.completes[m].to_elem();
        for i in (0..m).rev() {
            v = &self.quotients[i].lift() + &v.inv()?;
        }
        Ok(v)
    }
}

/// Expand `alpha` for at most `max_terms` quotients, stopping early once a
/// complete quotient repeats or a remainder vanishes.
pub fn expand(alpha: &TowerPair, max_terms: usize, policy: &PrecisionPolicy) -> Result<CFExpansion> {
    run_expansion(alpha, max_terms, policy, true)
}

/// Compute exactly `terms` quotients by running the algorithm every step,
/// recording the first detected period without stopping at it.
pub fn expand_terms(alpha: &TowerPair, terms: usize, policy: &PrecisionPolicy) -> Result<CFExpansion> {
    run_expansion(alpha, terms, policy, false)
}

fn run_expansion(
    alpha: &TowerPair,
    max_terms: usize,
    policy: &PrecisionPolicy,
    stop_at_period: bool,
) -> Result<CFExpansion> {
    if max_terms == 0 {
        return Err(Error::Usage("max_terms must be at least 1".into()));
    }
    let n = alpha.n();
    let alpha0 = alpha.to_elem();
    let mut exp = CFExpansion {
        n,
        alpha0: alpha0.clone(),
        quotients: vec![],
        completes: vec![],
        preperiod: 0,
        period: 0,
        finite: false,
    };
    let mut seen: HashMap<FieldElem, usize> = HashMap::new();
    let mut current = alpha0;
    loop {
        let k = exp.completes.len();
        if let Some(&first) = seen.get(&current) {
            if exp.period == 0 {
                exp.preperiod = first;
                exp.period = k - first;
            }
            if stop_at_period {
                break;
            }
        } else {
            seen.insert(current.clone(), k);
        }
        let pair = TowerPair::from_elem(&current)?;
        let a = floor_nearest(&pair, policy).map_err(|e| match e {
            Error::AmbiguousRounding { coordinate, value } => Error::AmbiguousRounding {
                coordinate,
                value: format!("{value} at step {k}"),
            },
            e => e,
        })?;
        exp.completes.push(pair);
        let rem = &current - &a.lift();
        exp.quotients.push(a);
        if rem.is_zero() {
            exp.finite = true;
            break;
        }
        if exp.quotients.len() >= max_terms {
            break;
        }
        current = rem.inv()?;
    }
    Ok(exp)
}

/// Closed form of the quotients of `X_n`: `a_0 = 1`, `a_(2k-1) = 2/(1+X_(n-1))`, `a_(2k) = 2`.
pub fn expected_quotient(n: u32, k: usize) -> Result<FieldElem> {
    let lvl = level(n - 1);
    Ok(if k == 0 {
        FieldElem::one(&lvl)
    } else if k % 2 == 1 {
        let one_plus = &FieldElem::one(&lvl) + &lvl.generator();
        one_plus.inv()?.scale(&BigRational::from_integer(2.into()))
    } else {
        FieldElem::from_int(&lvl, 2)
    })
}

/// `X_n` as the pair `(0, 1)`.
pub fn generator_pair(n: u32) -> Result<TowerPair> {
    if n == 0 {
        return Err(Error::Usage("the expansion target needs level n >= 1".into()));
    }
    let lvl = level(n - 1);
    TowerPair::new(FieldElem::zero(&lvl), FieldElem::one(&lvl))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub k: usize,
    pub p: FieldElem,
    pub q: FieldElem,
}

/// `p_k / q_k` for `k = 0..=upto` from `p_k = a_k p_(k-1) + p_(k-2)` (same for `q`).
pub fn convergents_unchecked(exp: &CFExpansion, upto: usize) -> Result<Vec<ConvergentPair>> {
    let lvl = level(exp.n - 1);
    let (mut p2, mut p1) = (FieldElem::zero(&lvl), FieldElem::one(&lvl));
    let (mut q2, mut q1) = (FieldElem::one(&lvl), FieldElem::zero(&lvl));
    // seeds p_(-2) = 0, p_(-1) = 1, q_(-2) = 1, q_(-1) = 0
    let mut out = Vec::with_capacity(upto + 1);
    for k in 0..=upto {
        let a = exp
            .quotient(k)
            .ok_or_else(|| Error::Usage(format!("quotient {k} not available")))?;
        let p = &(a * &p1) + &p2;
        let q = &(a * &q1) + &q2;
        p2 = std::mem::replace(&mut p1, p.clone());
        q2 = std::mem::replace(&mut q1, q.clone());
        out.push(ConvergentPair { k, p, q });
    }
    Ok(out)
}

/// Convergents with the exact check `p_k = [a_0, ..., a_k] q_k` for every `k`.
pub fn convergents(exp: &CFExpansion, upto: usize) -> Result<Vec<ConvergentPair>> {
    let convs = convergents_unchecked(exp, upto)?;
    for c in &convs {
        let mut v = exp.quotient(c.k).unwrap().clone();
        for i in (0..c.k).rev() {
            let inv = v.inv().map_err(|_| {
                Error::Invariant(format!("zero denominator folding quotients at index {}", i + 1))
            })?;
            v = &inv + exp.quotient(i).unwrap();
        }
        if &(&c.p - &(&v * &c.q)) != &FieldElem::zero(&level(exp.n - 1)) {
            return Err(Error::Invariant(format!("convergent {} differs from its folded value", c.k)));
        }
    }
    Ok(convs)
}

/// First index at which `p_k q_(k-1) - p_(k-1) q_k = (-1)^(k-1)` or
/// `p_k q_(k-2) - p_(k-2) q_k = (-1)^k a_k` fails, if any.
pub fn determinant_failure(exp: &CFExpansion, convs: &[ConvergentPair]) -> Option<usize> {
    let lvl = level(exp.n - 1);
    let sign = |e: usize| FieldElem::from_int(&lvl, if e % 2 == 0 { 1 } else { -1 });
    for k in 1..convs.len() {
        let (c, c1) = (&convs[k], &convs[k - 1]);
        let d1 = &(&c.p * &c1.q) - &(&c1.p * &c.q);
        if d1 != sign(k - 1) {
            return Some(k);
        }
        // p_(-1) = 1, q_(-1) = 0 when k = 1
        let (p2, q2) = if k >= 2 {
            (convs[k - 2].p.clone(), convs[k - 2].q.clone())
        } else {
            (FieldElem::one(&lvl), FieldElem::zero(&lvl))
        };
        let d2 = &(&c.p * &q2) - &(&p2 * &c.q);
        if d2 != &sign(k) * exp.quotient(k).unwrap() {
            return Some(k);
        }
    }
    None
}

/// Run the expansion of `X_n` for `periods` full periods and compare every
/// quotient with the closed form.
pub fn verify_period_shape(n: u32, periods: usize, policy: &PrecisionPolicy) -> Result<CheckRecord> {
    let terms = 1 + 2 * periods;
    let exp = expand_terms(&generator_pair(n)?, terms, policy)?;
    let mut mismatches = vec![];
    for k in 0..terms {
        let want = expected_quotient(n, k)?;
        match exp.quotients.get(k) {
            Some(got) if *got == want => {}
            got => mismatches.push(json!({
                "index": k,
                "expected": want.to_string(),
                "got": got.map(|g| g.to_string()),
            })),
        }
    }
    // n = 1 collapses both odd and even quotients to 2
    let expected_period = if n == 1 { 1 } else { 2 };
    let ok = mismatches.is_empty() && exp.preperiod == 1 && exp.period == expected_period;
    Ok(CheckRecord::new(
        format!("expansion-pattern-n{n}"),
        "nearest-point expansion of X_n: a_0 = 1, a_(2k-1) = 2(1+X_(n-1))^(-1), a_(2k) = 2",
        Verdict::from_bool(ok),
        json!({
            "n": n,
            "terms": terms,
            "quotients": exp.quotients.iter().take(3).map(|q| q.to_string()).collect::<Vec<_>>(),
            "preperiod": exp.preperiod,
            "period": exp.period,
            "mismatches": mismatches,
        }),
    ))
}

/// Per-embedding outcome of [`convergence_analysis`].
#[derive(Clone, Debug)]
pub struct EmbeddingConvergence {
    /// 1-based conjugate index of `tau` on `B_(n-1)`.
    pub tau: usize,
    pub a1: Interval,
    pub limit: Interval,
    /// `p_k / q_k - limit`.
    pub errors: Vec<Interval>,
    /// `1 / |q_k q_(k-1)|` for `k >= 1` (entry 0 unused).
    pub bounds: Vec<Interval>,
    pub values: Vec<Interval>,
    pub p: Vec<Interval>,
    pub q: Vec<Interval>,
}

impl EmbeddingConvergence {
    pub fn negative_case(&self) -> bool {
        self.a1.is_negative()
    }

    /// Subsequence behavior required for this embedding's case. Case 1
    /// (`tau(a_1) > 0`): even convergents increase and odd ones decrease,
    /// with evens below the limit and odds above. Case 2: both decrease.
    pub fn monotone_ok(&self) -> bool {
        let v = &self.values;
        let stepping = |from: usize, inc: bool| {
            (from..v.len()).step_by(2).skip(1).all(|k| {
                if inc {
                    v[k - 2].lt(&v[k])
                } else {
                    v[k].lt(&v[k - 2])
                }
            })
        };
        if self.negative_case() {
            stepping(2, false) && stepping(1, false)
        } else {
            let sides = v.iter().enumerate().skip(1).all(|(k, x)| {
                if k % 2 == 0 {
                    x.lt(&self.limit)
                } else {
                    x.gt(&self.limit)
                }
            });
            stepping(2, true) && stepping(1, false) && sides
        }
    }

    /// Sign pattern `+, -, -, +` of `p_k, q_k` by `k mod 4` with strictly
    /// growing magnitudes; only meaningful in case 2.
    pub fn sign_pattern_ok(&self) -> bool {
        let ok_sign = |x: &Interval, k: usize| match k % 4 {
            0 | 3 => x.is_positive(),
            _ => x.is_negative(),
        };
        let grows = |s: &[Interval]| s.windows(2).all(|w| w[0].abs().lt(&w[1].abs()));
        self.p.iter().enumerate().all(|(k, x)| ok_sign(x, k))
            && self.q.iter().enumerate().all(|(k, x)| ok_sign(x, k))
            && grows(&self.p)
            && grows(&self.q)
    }

    /// `|p_k/q_k - limit| < 1/|q_k q_(k-1)|` at every `k >= 1`, and the
    /// error shrinks along each parity class.
    pub fn error_ok(&self) -> bool {
        let e = &self.errors;
        let bounded = (1..e.len()).all(|k| e[k].abs().lt(&self.bounds[k]));
        let shrinking = (2..e.len()).all(|k| e[k].abs().lt(&e[k - 2].abs()));
        bounded && shrinking
    }
}

/// Evaluate the convergents of `X_n` under every `tau` of `B_(n-1)`.
pub fn convergence_analysis(n: u32, k_max: usize, prec: u32, policy: &PrecisionPolicy) -> Result<Vec<EmbeddingConvergence>> {
    let exp = expand(&generator_pair(n)?, 8, policy)?;
    let convs = convergents_unchecked(&exp, k_max)?;
    let a1 = conjugates(exp.quotient(1).unwrap(), prec);
    let limits = radicals(n, prec)?;
    let pc: Vec<Vec<Interval>> = convs.par_iter().map(|c| conjugates(&c.p, prec)).collect();
    let qc: Vec<Vec<Interval>> = convs.par_iter().map(|c| conjugates(&c.q, prec)).collect();
    let d = limits.len();
    (0..d)
        .map(|t| {
            let p: Vec<Interval> = pc.iter().map(|v| v[t].clone()).collect();
            let q: Vec<Interval> = qc.iter().map(|v| v[t].clone()).collect();
            let values = p
                .iter()
                .zip(&q)
                .map(|(a, b)| a.div(b))
                .collect::<Result<Vec<_>>>()?;
            let errors = values.iter().map(|v| v - &limits[t]).collect();
            let mut bounds = vec![Interval::zero(prec)];
            for k in 1..q.len() {
                bounds.push((&q[k] * &q[k - 1]).abs().recip()?);
            }
            Ok(EmbeddingConvergence {
                tau: t + 1,
                a1: a1[t].clone(),
                limit: limits[t].clone(),
                errors,
                bounds,
                values,
                p,
                q,
            })
        })
        .collect()
}

/// Convergence of the expansion of `X_n` in every real embedding.
pub fn verify_convergence(n: u32, k_max: usize, policy: &PrecisionPolicy) -> Result<CheckRecord> {
    let mut prec = policy.start_bits.max(128);
    loop {
        let analysis = convergence_analysis(n, k_max, prec, policy)?;
        let mut per_tau = vec![];
        let mut all = true;
        for e in &analysis {
            let neg = e.negative_case();
            let below_minus_two = !neg || e.a1.lt(&Interval::from_int(-2, prec));
            let k0 = (&e.values[0] - &e.limit).abs().lt(&Interval::one(prec))
                && e.values[0].contains_rational(&BigRational::one());
            let signs = !neg || e.sign_pattern_ok();
            let ok = e.monotone_ok() && e.error_ok() && below_minus_two && k0 && signs;
            all &= ok;
            let last = e.errors.len() - 1;
            per_tau.push(json!({
                "tau": e.tau,
                "case": if neg { 2 } else { 1 },
                "a1": e.a1.to_f64(),
                "limit": e.limit.to_f64(),
                "final_error": e.errors[last].abs().hi().to_f64(),
                "final_bound": e.bounds[last].lo().to_f64(),
                "monotone": e.monotone_ok(),
                "error_bounded": e.error_ok(),
                "sign_pattern": if neg { Some(signs) } else { None },
                "a1_below_minus_two": if neg { Some(below_minus_two) } else { None },
                "ok": ok,
            }));
        }
        if all || prec >= policy.max_bits {
            return Ok(CheckRecord::new(
                format!("convergence-n{n}"),
                "convergents of X_n converge to sqrt(2 + tau(X_(n-1))) in every real embedding",
                Verdict::from_bool(all),
                json!({ "n": n, "k_max": k_max, "precision_bits": prec, "embeddings": per_tau }),
            ));
        }
        prec = (prec * 2).min(policy.max_bits);
    }
}

/// Exact convergent identities for `k <= k_max`, plus the folded-value check.
pub fn verify_convergent_identities(n: u32, k_max: usize, policy: &PrecisionPolicy) -> Result<CheckRecord> {
    let exp = expand(&generator_pair(n)?, 8, policy)?;
    let convs = convergents(&exp, k_max)?;
    let fail = determinant_failure(&exp, &convs);
    let lvl = level(n - 1);
    let a1 = exp.quotient(1).unwrap();
    let p1_ok = convs[1].p == &FieldElem::one(&lvl) + a1 && convs[1].q == *a1;
    Ok(CheckRecord::new(
        format!("convergent-identities-n{n}"),
        "p_k q_(k-1) - p_(k-1) q_k = (-1)^(k-1) and p_k q_(k-2) - p_(k-2) q_k = (-1)^k a_k",
        Verdict::from_bool(fail.is_none() && p1_ok),
        json!({
            "n": n,
            "k_max": k_max,
            "first_failure": fail,
            "p1": convs[1].p.to_string(),
            "q1": convs[1].q.to_string(),
        }),
    ))
}

/// Exact value of `p_k / q_k` for `n = 1`, where everything is rational.
pub fn rational_convergent(c: &ConvergentPair) -> Option<BigRational> {
    let p = c.p.as_rational()?;
    let q = c.q.as_rational()?;
    if q.is_zero() {
        None
    } else {
        Some(p / q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn sqrt_two_expansion() {
        let exp = expand(&generator_pair(1).unwrap(), 10, &policy()).unwrap();
        let q: Vec<String> = (0..6).map(|k| exp.quotient(k).unwrap().to_string()).collect();
        assert_eq!(q, ["1", "2", "2", "2", "2", "2"]);
        assert_eq!((exp.preperiod, exp.period), (1, 1));
    }

    #[test]
    fn level_two_expansion() {
        let exp = expand(&generator_pair(2).unwrap(), 10, &policy()).unwrap();
        let q: Vec<String> = (0..5).map(|k| exp.quotient(k).unwrap().to_string()).collect();
        assert_eq!(q, ["1", "2*X1 - 2", "2", "2*X1 - 2", "2"]);
        assert_eq!((exp.preperiod, exp.period), (1, 2));
        for m in 0..exp.completes.len() {
            assert_eq!(exp.reconstruct(m).unwrap(), exp.alpha0);
        }
    }

    #[test]
    fn lattice_point_has_finite_expansion() {
        let lvl = level(0);
        let x = TowerPair::new(FieldElem::from_int(&lvl, 7), FieldElem::zero(&lvl)).unwrap();
        let exp = expand(&x, 5, &policy()).unwrap();
        assert!(exp.finite);
        assert_eq!(exp.quotients.len(), 1);
        assert_eq!(exp.quotients[0].to_string(), "7");
    }

    #[test]
    fn first_convergent_and_determinants() {
        let exp = expand(&generator_pair(2).unwrap(), 10, &policy()).unwrap();
        let c = convergents(&exp, 5).unwrap();
        assert_eq!(c[1].q.to_string(), "2*X1 - 2");
        assert_eq!(c[1].p.to_string(), "2*X1 - 1");
        let d = &(&c[1].p * &c[0].q) - &(&c[0].p * &c[1].q);
        assert!(d.is_one());
        let lhs = &(&c[3].p * &c[1].q) - &(&c[1].p * &c[3].q);
        assert_eq!(lhs, -exp.quotient(3).unwrap());
        assert_eq!(determinant_failure(&exp, &c), None);
    }

    #[test]
    fn sqrt_two_tenth_convergent() {
        use num_traits::Signed;
        let exp = expand(&generator_pair(1).unwrap(), 10, &policy()).unwrap();
        let c = convergents(&exp, 10).unwrap();
        let v = rational_convergent(&c[10]).unwrap();
        assert_eq!(v, BigRational::new(8119.into(), 5741.into()));
        let err = (v - BigRational::from_float(std::f64::consts::SQRT_2).unwrap()).abs();
        assert!(err < BigRational::new(1.into(), 10_000_000.into()));
    }

    #[test]
    fn convergence_cases_at_level_two() {
        let r = verify_convergence(2, 20, &policy()).unwrap();
        assert!(r.passed(), "{}", r.data);
        let embeddings = r.data["embeddings"].as_array().unwrap();
        assert_eq!(embeddings[1]["case"], 2);
    }

    #[test]
    fn period_shape_small_levels() {
        for n in 1..=3 {
            let r = verify_period_shape(n, 4, &policy()).unwrap();
            assert!(r.passed(), "{}", r.data);
        }
    }
}
