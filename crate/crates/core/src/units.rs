//! Circular units `C_n = <-1, 1 + X_n>` as a Galois module, the relative
//! unit `eps = (X_n + 1)/(X_n - 1)`, and the relative norm on `C_n / {+-1}`
//! as an integer matrix.
//!
//! Elements of `C_n / {+-1}` are exponent vectors over the basis
//! `sigma^i(1 + X_n)`, `i = 1..2^n - 1`; the missing `i = 0` conjugate is
//! `-(product of the others)^(-1)` because all `2^n` conjugates multiply
//! to `-1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::cfrac::{convergents_unchecked, expand, generator_pair};
use crate::embedding::{conjugates, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::field::{level, FieldElem};
use crate::interval::Interval;
pub use crate::matrix::IntegerMatrix;
use crate::report::{CheckRecord, Verdict};

/// `sign * prod sigma^i(1 + X_n)^(exponents[i-1])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    pub n: u32,
    pub exponents: Vec<BigInt>,
    pub sign: i8,
}

fn one_plus_x(n: u32) -> FieldElem {
    let l = level(n);
    &FieldElem::one(&l) + &l.generator()
}

/// `sigma^i(1 + X_n)`.
pub fn basis_unit(n: u32, i: i64) -> FieldElem {
    one_plus_x(n).sigma_pow(i)
}

/// Product of field elements, multiplied pairwise in parallel.
pub fn product(n: u32, items: Vec<FieldElem>) -> FieldElem {
    let one = FieldElem::one(&level(n));
    items.into_par_iter().reduce(|| one.clone(), |a, b| &a * &b)
}

impl ExponentVector {
    pub fn zero(n: u32) -> Self {
        ExponentVector { n, exponents: vec![BigInt::zero(); (1usize << n) - 1], sign: 1 }
    }

    pub fn from_ints(n: u32, exps: &[i64], sign: i8) -> Self {
        assert_eq!(exps.len(), (1usize << n) - 1, "exponent vector length");
        ExponentVector { n, exponents: exps.iter().map(|&e| BigInt::from(e)).collect(), sign }
    }

    /// `sigma^j(1 + X_n)` for any `j`, including `j = 0`.
    pub fn conjugate(n: u32, j: i64) -> Self {
        let d = 1i64 << n;
        let j = j.rem_euclid(d);
        let mut v = ExponentVector::zero(n);
        if j == 0 {
            v.exponents.iter_mut().for_each(|e| *e = -BigInt::one());
            v.sign = -1;
        } else {
            v.exponents[(j - 1) as usize] = BigInt::one();
        }
        v
    }

    pub fn mul(&self, o: &ExponentVector) -> ExponentVector {
        assert_eq!(self.n, o.n);
        ExponentVector {
            n: self.n,
            exponents: self.exponents.iter().zip(&o.exponents).map(|(a, b)| a + b).collect(),
            sign: self.sign * o.sign,
        }
    }

    pub fn pow(&self, k: i64) -> ExponentVector {
        let sign = if k % 2 == 0 { 1 } else { self.sign };
        ExponentVector {
            n: self.n,
            exponents: self.exponents.iter().map(|e| e * k).collect(),
            sign,
        }
    }

    pub fn negate(&self) -> ExponentVector {
        ExponentVector { sign: -self.sign, ..self.clone() }
    }

    /// Galois action: `sigma^j` shifts the conjugate index, folding the
    /// `sigma^0` conjugate back onto the basis.
    pub fn sigma(&self, j: i64) -> ExponentVector {
        let d = 1usize << self.n;
        let mut full = vec![BigInt::zero(); d];
        for (i, e) in self.exponents.iter().enumerate() {
            let t = ((i as i64 + 1 + j).rem_euclid(d as i64)) as usize;
            full[t] = e.clone();
        }
        let f0 = std::mem::take(&mut full[0]);
        let odd = f0.is_odd_int();
        let exponents = full[1..].iter().map(|e| e - &f0).collect();
        let sign = if odd { -self.sign } else { self.sign };
        ExponentVector { n: self.n, exponents, sign }
    }

    /// The unit this vector describes.
    pub fn realize(&self) -> Result<FieldElem> {
        let n = self.n;
        let mut pos = vec![];
        let mut neg = vec![];
        for (i, e) in self.exponents.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let k = e.abs().to_u32().ok_or_else(|| Error::Invariant("exponent too large".into()))?;
            let u = basis_unit(n, i as i64 + 1).pow(k as i64)?;
            if e.is_positive() {
                pos.push(u);
            } else {
                neg.push(u);
            }
        }
        let num = product(n, pos);
        let den = product(n, neg);
        let v = num.try_div(&den)?;
        Ok(if self.sign < 0 { -&v } else { v })
    }

    pub fn is_zero_vector(&self) -> bool {
        self.exponents.iter().all(|e| e.is_zero())
    }

    pub fn exponents_i64(&self) -> Vec<i64> {
        self.exponents.iter().map(|e| e.to_i64().unwrap_or(i64::MAX)).collect()
    }
}

trait OddInt {
    fn is_odd_int(&self) -> bool;
}

impl OddInt for BigInt {
    fn is_odd_int(&self) -> bool {
        (self % 2u32) != BigInt::zero()
    }
}

/// `eps = (X_n + 1)/(X_n - 1)`.
pub fn pell_unit(n: u32) -> Result<FieldElem> {
    if n == 0 {
        return Err(Error::Usage("the relative unit needs level n >= 1".into()));
    }
    let l = level(n);
    let x = l.generator();
    let one = FieldElem::one(&l);
    (&x + &one).try_div(&(&x - &one))
}

/// Exponent vector of `eps`: all `-1` with `-2` at `i = 2^(n-1)`.
pub fn pell_exponents(n: u32) -> ExponentVector {
    let h = 1i64 << (n - 1);
    // eps = -(1 + X)/sigma^h(1 + X) and 1 + X = -(prod_(i>=1) sigma^i(1+X))^(-1)
    ExponentVector::conjugate(n, 0).mul(&ExponentVector::conjugate(n, h).pow(-1)).negate()
}

/// `N(x) = 1` exactly.
pub fn is_relative_unit(x: &FieldElem) -> Result<bool> {
    Ok(x.rel_norm()?.is_one())
}

/// Decompose a unit of `C_n` over the basis, trying `seed` first and
/// falling back to a real-logarithm solve confirmed by exact realization.
pub fn decompose(x: &FieldElem, seed: Option<&ExponentVector>) -> Result<ExponentVector> {
    let n = x.n();
    let matches = |v: &ExponentVector| -> Result<Option<ExponentVector>> {
        let r = v.realize()?;
        if &r == x {
            Ok(Some(v.clone()))
        } else if &-&r == x {
            Ok(Some(v.negate()))
        } else {
            Ok(None)
        }
    };
    if let Some(s) = seed {
        if let Some(v) = matches(s)? {
            return Ok(v);
        }
    }
    let d = 1usize << n;
    if d == 1 {
        return matches(&ExponentVector::zero(0))?
            .ok_or_else(|| Error::Invariant("rational unit other than +-1".into()));
    }
    let prec = 128;
    let target: Vec<f64> = conjugates(x, prec)
        .iter()
        .map(|c| c.abs().ln().map(|l| l.to_f64()))
        .collect::<Result<_>>()?;
    let cols: Vec<Vec<f64>> = (1..d as i64)
        .map(|i| {
            conjugates(&basis_unit(n, i), prec)
                .iter()
                .map(|c| c.abs().ln().map(|l| l.to_f64()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let sol = least_squares(&cols, &target)
        .ok_or_else(|| Error::Invariant("singular logarithm matrix".into()))?;
    let guess = ExponentVector {
        n,
        exponents: sol.iter().map(|s| BigInt::from(s.round() as i64)).collect(),
        sign: 1,
    };
    matches(&guess)?.ok_or_else(|| {
        Error::Invariant(format!("element is not a circular unit at level {n} (or basis assumption wrong)"))
    })
}

/// Solve `min |A x - b|` via the normal equations, `A` given by columns.
fn least_squares(cols: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
        }
        a[i][m] = cols[i].iter().zip(b).map(|(x, y)| x * y).sum();
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

/// Matrix of `N_(n/n-1)` from `C_n / {+-1}` to `C_(n-1) / {+-1}`: column
/// `i` holds the exponents of `N(sigma^i(1 + X_n))`.
pub fn norm_matrix(n: u32) -> Result<IntegerMatrix> {
    if n == 0 {
        return Err(Error::Usage("the norm matrix needs level n >= 1".into()));
    }
    let d = 1i64 << n;
    let h = d / 2;
    let cols = (1..d)
        .into_par_iter()
        .map(|i| {
            let image = basis_unit(n, i).rel_norm()?;
            // N(sigma^i(1 + X_n)) = sigma^i(-1 - X_(n-1))
            let seed = ExponentVector::conjugate(n - 1, i % h).negate();
            let v = decompose(&image, Some(&seed))?;
            Ok(v.exponents)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegerMatrix::from_columns((h - 1) as usize, &cols))
}

/// Integer kernel basis of a norm matrix as exponent vectors.
pub fn kernel_basis(m: &IntegerMatrix) -> Vec<ExponentVector> {
    let n = (m.cols() + 1).trailing_zeros();
    m.kernel_basis()
        .into_iter()
        .map(|exponents| ExponentVector { n, exponents, sign: 1 })
        .collect()
}

/// `(1 + X_n)/(1 - X_n)` as an exponent vector.
fn ratio_vector(n: u32) -> ExponentVector {
    let h = 1i64 << (n - 1);
    ExponentVector::conjugate(n, 0).mul(&ExponentVector::conjugate(n, h).pow(-1))
}

/// `prod_(j < 2^(n-1)) sigma^j(1 + X_n)` as an exponent vector.
fn half_product_vector(n: u32) -> ExponentVector {
    let h = 1i64 << (n - 1);
    (0..h).fold(ExponentVector::zero(n), |acc, j| acc.mul(&ExponentVector::conjugate(n, j)))
}

fn vectors_matrix(n: u32, vs: &[ExponentVector]) -> IntegerMatrix {
    let cols: Vec<Vec<BigInt>> = vs.iter().map(|v| v.exponents.clone()).collect();
    IntegerMatrix::from_columns((1usize << n) - 1, &cols)
}

fn in_lattice(basis: &IntegerMatrix, v: &ExponentVector) -> bool {
    basis.cols() > 0 && basis.solve(&v.exponents).is_some() || v.is_zero_vector()
}

/// `eps` from the closed form, from the first convergent, and its norm.
pub fn verify_pell(n: u32, policy: &PrecisionPolicy) -> Result<CheckRecord> {
    let eps = pell_unit(n)?;
    let exp = expand(&generator_pair(n)?, 2, policy)?;
    let c = convergents_unchecked(&exp, 1)?;
    let from_convergent = FieldElem::from_split(&c[1].p, &c[1].q);
    let same = from_convergent == eps;
    let norm = eps.rel_norm()?;
    let ok = same && norm.is_one();
    Ok(CheckRecord::new(
        format!("pell-unit-n{n}"),
        "p_1 + q_1 X_n = (X_n+1)/(X_n-1) and its relative norm is 1",
        Verdict::from_bool(ok),
        json!({
            "n": n,
            "epsilon_equals_first_convergent": same,
            "relative_norm": norm.to_string(),
            "epsilon": if n <= 3 { Some(eps.to_string()) } else { None },
        }),
    ))
}

/// The exact product identities of the circular units at level `n`.
pub fn product_identities(n: u32) -> Result<CheckRecord> {
    if n == 0 {
        return Err(Error::Usage("product identities need level n >= 1".into()));
    }
    let l = level(n);
    let d = 1i64 << n;
    let h = d / 2;
    let minus_one = FieldElem::from_int(&l, -1);
    let conj = |f: &FieldElem, range: std::ops::Range<i64>| -> Vec<FieldElem> {
        range.into_par_iter().map(|j| f.sigma_pow(j)).collect()
    };
    let opx = one_plus_x(n);
    let x = l.generator();
    let xm1 = &x - &FieldElem::one(&l);
    let mut items = vec![];
    let mut all = true;
    let mut push = |id: &str, ok: Option<bool>, value: String| {
        if let Some(ok) = ok {
            all &= ok;
        }
        items.push(json!({ "identity": id, "holds": ok, "value": value }));
    };

    let lower = level(n - 1);
    let n1 = opx.rel_norm()?;
    let expect = -&(&FieldElem::one(&lower) + &lower.generator());
    push("N(1 + X_n) = -1 - X_(n-1)", Some(n1 == expect), n1.to_string());

    let shifted = product(n, conj(&opx, 1..h + 1)).rel_norm()?;
    push("N(sigma(1+X_n) ... sigma^(2^(n-1))(1+X_n)) = -1", Some(shifted == -&FieldElem::one(&lower)), shifted.to_string());

    let full = product(n, conj(&opx, 0..d));
    push("prod_(j<2^n) sigma^j(1 + X_n) = -1", Some(full == minus_one), full.to_string());

    let plus_half = product(n, conj(&opx, 0..h));
    let minus_half = product(n, conj(&xm1, 0..h));
    let both = &plus_half * &minus_half;
    // at n = 1 the product is (sqrt 2 + 1)(sqrt 2 - 1) = +1; the identity starts at n = 2
    let applies = n >= 2;
    push(
        "prod_(j<2^(n-1)) sigma^j(X_n + 1) sigma^j(X_n - 1) = -1",
        applies.then_some(both == minus_one),
        both.to_string(),
    );

    let eps = pell_unit(n)?;
    let eps_prod = -&product(n, conj(&eps, 0..h));
    let rhs = minus_half.pow(-2)?;
    push(
        "-eps sigma(eps) ... sigma^(2^(n-1)-1)(eps) = (prod_(j<2^(n-1)) sigma^j(X_n - 1))^(-2)",
        applies.then_some(eps_prod == rhs),
        if eps_prod == rhs { "equal".into() } else { "different".into() },
    );

    let nm = minus_half.rel_norm()?;
    push("N(prod_(j<2^(n-1)) sigma^j(X_n - 1)) = -1", Some(nm == -&FieldElem::one(&lower)), nm.to_string());

    Ok(CheckRecord::new(
        format!("product-identities-n{n}"),
        "exact product identities among conjugates of 1 + X_n, X_n - 1 and eps",
        Verdict::from_bool(all),
        json!({ "n": n, "identities": items }),
    ))
}

/// Kernel of the norm on `C_n / {+-1}` and mutual inclusion with the
/// module generated by `-1` and `eps`.
pub fn verify_an_generation(n: u32) -> Result<CheckRecord> {
    let d = 1i64 << n;
    let h = d / 2;
    let m = norm_matrix(n)?;
    let kernel = kernel_basis(&m);
    let kmat = vectors_matrix(n, &kernel);
    let rank = m.rank();
    let mut failures: Vec<String> = vec![];

    if kernel.len() != h as usize {
        failures.push(format!("kernel rank {} instead of {h}", kernel.len()));
    }
    for (i, v) in kernel.iter().enumerate() {
        let u = v.realize()?;
        let nu = u.rel_norm()?;
        let lower_one = FieldElem::one(nu.level());
        if nu != lower_one && nu != -&lower_one {
            failures.push(format!("kernel vector {i} has norm {nu}"));
        }
        if !v.pow(2).realize()?.rel_norm()?.is_one() {
            failures.push(format!("square of kernel vector {i} has norm other than 1"));
        }
    }

    // basis given by the ratio conjugates and the half product
    let ratio = ratio_vector(n);
    let mut stated: Vec<ExponentVector> = (1..h).map(|i| ratio.sigma(i)).collect();
    stated.push(half_product_vector(n));
    let smat = vectors_matrix(n, &stated);
    for (i, v) in stated.iter().enumerate() {
        if !m.mul_vec(&v.exponents).iter().all(|x| x.is_zero()) {
            failures.push(format!("stated kernel element {i} not killed by the norm"));
        }
        if !in_lattice(&kmat, v) {
            failures.push(format!("stated kernel element {i} outside the computed kernel"));
        }
    }
    for (i, v) in kernel.iter().enumerate() {
        if !in_lattice(&smat, v) {
            failures.push(format!("computed kernel vector {i} outside the stated span"));
        }
    }

    // realize agrees with the field for the stated elements
    let opx = one_plus_x(n);
    let ratio_elem = opx.try_div(&opx.sigma_pow(h))?;
    for i in 1..h {
        if stated[(i - 1) as usize].realize()? != ratio_elem.sigma_pow(i) {
            failures.push(format!("realize mismatch for sigma^{i} of the ratio"));
        }
    }

    // inclusion (i): witnesses over <-1, eps>
    let eps = pell_unit(n)?;
    let mut witnesses = vec![];
    for i in 1..h {
        // sigma^i((1+X)/(1-X)) = -sigma^i(eps)
        let ok = ratio_elem.sigma_pow(i) == -&eps.sigma_pow(i);
        if !ok {
            failures.push(format!("witness for sigma^{i} of the ratio fails"));
        }
        witnesses.push(json!({ "element": format!("sigma^{i}((1+X)/(1-X))"), "sign": -1, "eps_exponents": unit_vec(h, i, 1) }));
    }
    let w = product(n, (0..h).map(|j| opx.sigma_pow(j)).collect());
    let w2 = &w * &w;
    let eps_prod = product(n, (0..h).map(|j| eps.sigma_pow(j)).collect());
    let sign = if h % 2 == 0 { -1 } else { 1 };
    let ok = w2 == eps_prod.scale(&num_rational::BigRational::from_integer(sign.into()));
    if !ok {
        failures.push("witness for the squared half product fails".into());
    }
    witnesses.push(json!({
        "element": "(prod_(j<2^(n-1)) sigma^j(1+X))^2",
        "sign": sign,
        "eps_exponents": vec![1; h as usize],
    }));

    // inclusion (ii): eps and its conjugates in the computed kernel lattice
    let eps_vec = pell_exponents(n);
    if eps_vec.realize()? != eps {
        failures.push("exponent vector of eps does not realize to eps".into());
    }
    for j in 0..d {
        if !in_lattice(&kmat, &eps_vec.sigma(j)) {
            failures.push(format!("sigma^{j}(eps) outside the computed kernel"));
        }
    }

    // surjectivity of the norm onto C_(n-1) / {+-1}
    let mut surjective = true;
    for j in 0..(h - 1) as usize {
        let mut e = vec![BigInt::zero(); (h - 1) as usize];
        e[j] = BigInt::one();
        surjective &= m.solve(&e).is_some();
    }
    if !surjective {
        failures.push("norm matrix is not surjective".into());
    }

    Ok(CheckRecord::new(
        format!("relative-circular-units-n{n}"),
        "the module generated by -1 and (X_n+1)/(X_n-1) is the kernel of the norm on C_n",
        Verdict::from_bool(failures.is_empty()),
        json!({
            "n": n,
            "norm_matrix_rank": rank,
            "kernel_rank": kernel.len(),
            "norm_matrix": if n <= 3 { Some(matrix_rows(&m)) } else { None },
            "kernel_basis": if n <= 3 { Some(kernel.iter().map(|v| v.exponents_i64()).collect::<Vec<_>>()) } else { None },
            "eps_exponents": eps_vec.exponents_i64(),
            "witnesses": witnesses,
            "failures": failures,
        }),
    ))
}

fn unit_vec(h: i64, i: i64, v: i64) -> Vec<i64> {
    (0..h).map(|j| if j == i { v } else { 0 }).collect()
}

fn matrix_rows(m: &IntegerMatrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect())
        .collect()
}

/// Determinant of `(ln|tau_k(sigma^i(1 + X_n))|)` for `k, i = 1..2^n - 1`.
pub fn log_embedding_determinant(n: u32, prec: u32) -> Result<Interval> {
    let d = 1usize << n;
    let rows: Vec<Vec<Interval>> = (1..d as i64)
        .map(|i| {
            conjugates(&basis_unit(n, i), prec)[..d - 1]
                .iter()
                .map(|c| c.abs().ln())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    interval_determinant(rows, prec)
}

fn interval_determinant(mut a: Vec<Vec<Interval>>, prec: u32) -> Result<Interval> {
    let m = a.len();
    let mut det = Interval::one(prec);
    for c in 0..m {
        let p = (c..m)
            .max_by(|&i, &j| a[i][c].to_f64().abs().total_cmp(&a[j][c].to_f64().abs()))
            .unwrap();
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        let piv = a[c][c].clone();
        if piv.contains_zero() {
            return Err(Error::Undecided { what: "pivot of the logarithm matrix".into(), bits: prec });
        }
        det = &det * &piv;
        for r in c + 1..m {
            let f = a[r][c].div(&piv)?;
            for k in c..m {
                let v = &a[r][k] - &(&f * &a[c][k]);
                a[r][k] = v;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn pell_unit_examples() {
        let e1 = pell_unit(1).unwrap();
        assert_eq!(e1.to_string(), "2*X1 + 3");
        for n in 1..=4 {
            assert!(is_relative_unit(&pell_unit(n).unwrap()).unwrap());
        }
        let c = conjugates(&pell_unit(2).unwrap(), 128);
        assert!((c[0].to_f64() - 3.3591608542).abs() < 1e-9);
        assert!(!is_relative_unit(&one_plus_x(3)).unwrap());
        assert!(is_relative_unit(&FieldElem::one(&level(2))).unwrap());
    }

    #[test]
    fn pell_exponents_realize_eps() {
        for n in 1..=4 {
            assert_eq!(pell_exponents(n).realize().unwrap(), pell_unit(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn sigma_action_on_vectors_matches_field() {
        let v = ExponentVector::from_ints(2, &[1, -2, 3], -1);
        let x = v.realize().unwrap();
        for j in 0..4 {
            assert_eq!(v.sigma(j).realize().unwrap(), x.sigma_pow(j), "j = {j}");
        }
    }

    #[test]
    fn norm_matrix_level_two() {
        let m = norm_matrix(2).unwrap();
        assert_eq!(m, IntegerMatrix::from_rows(&[vec![1, -1, 1]]));
        assert_eq!(m.rank(), 1);
        assert_eq!(kernel_basis(&m).len(), 2);
        let m1 = norm_matrix(1).unwrap();
        assert_eq!((m1.rows(), m1.cols()), (0, 1));
    }

    #[test]
    fn columns_realize_to_norms() {
        let n = 3;
        let m = norm_matrix(n).unwrap();
        for i in 1..8 {
            let col = ExponentVector { n: n - 1, exponents: m.column(i - 1), sign: 1 };
            let r = col.realize().unwrap();
            let target = basis_unit(n, i as i64).rel_norm().unwrap();
            assert!(r == target || -&r == target);
        }
    }

    #[test]
    fn logarithm_fallback_recovers_exponents() {
        let v = ExponentVector::from_ints(3, &[2, 0, -1, 1, 0, 3, -2], 1);
        let x = v.realize().unwrap();
        assert_eq!(decompose(&x, None).unwrap(), v);
        assert_eq!(decompose(&-&x, None).unwrap(), v.negate());
    }

    #[test]
    fn log_determinant_is_nonzero() {
        for n in 1..=3 {
            let det = log_embedding_determinant(n, 128).unwrap();
            assert!(!det.contains_zero(), "n = {n}: {det}");
        }
    }

    #[test]
    fn identities_and_generation_small_levels() {
        for n in 1..=3 {
            let r = product_identities(n).unwrap();
            assert!(r.passed(), "{}", r.data);
            let r = verify_an_generation(n).unwrap();
            assert!(r.passed(), "{}", r.data);
        }
        let p = verify_pell(2, &PrecisionPolicy::default()).unwrap();
        assert!(p.passed());
        let _ = BigRational::one();
    }
}
