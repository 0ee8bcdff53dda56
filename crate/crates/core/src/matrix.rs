//! Integer matrices with Smith normal form and the kernel/solve routines
//! built on it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    pub d: IntegerMatrix,
    pub rank: usize,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntegerMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = IntegerMatrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut r = IntegerMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        r.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * q;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    pub fn smith(&self) -> Smith {
        let (r, c) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntegerMatrix::identity(r);
        let mut v = IntegerMatrix::identity(c);
        let mut rank = 0;
        for t in 0..r.min(c) {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pick = |a: &IntegerMatrix| {
                let mut best: Option<(usize, usize)> = None;
                for i in t..r {
                    for j in t..c {
                        let x = a.get(i, j);
                        if !x.is_zero()
                            && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                best
            };
            let Some((pi, pj)) = pick(&a) else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..r {
                    if a.get(i, t).is_zero() {
                        continue;
                    }
                    let q = -a.get(i, t).div_floor(a.get(t, t));
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !a.get(i, t).is_zero() {
                        a.swap_rows(t, i);
                        u.swap_rows(t, i);
                        dirty = true;
                    }
                }
                for j in t + 1..c {
                    if a.get(t, j).is_zero() {
                        continue;
                    }
                    let q = -a.get(t, j).div_floor(a.get(t, t));
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !a.get(t, j).is_zero() {
                        a.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // divisibility of the trailing block by the pivot
                let p = a.get(t, t).clone();
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        a.add_row(t, i, &BigInt::one());
                        u.add_row(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            rank += 1;
        }
        Smith { u, v, d: a, rank }
    }

    pub fn rank(&self) -> usize {
        self.smith().rank
    }

    /// Basis of the integer kernel `{x : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let s = self.smith();
        (s.rank..self.cols).map(|j| s.v.column(j)).collect()
    }

    /// An integer solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.rows);
        let s = self.smith();
        let ub = s.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.cols];
        for i in 0..self.rows {
            if i < s.rank {
                let (q, rem) = ub[i].div_rem(s.d.get(i, i));
                if !rem.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ub[i].is_zero() {
                return None;
            }
        }
        Some(s.v.mul_vec(&y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_smith(m: &IntegerMatrix) {
        let s = m.smith();
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for i in 1..s.rank {
            assert!(s.d.get(i, i).is_multiple_of(s.d.get(i - 1, i - 1)));
        }
    }

    #[test]
    fn smith_of_small_example() {
        let m = IntegerMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        check_smith(&m);
        let s = m.smith();
        let diag: Vec<i64> = (0..3).map(|i| i64::try_from(s.d.get(i, i)).unwrap()).collect();
        assert_eq!(diag, vec![2, 6, 12]);
    }

    #[test]
    fn kernel_of_zero_matrix_is_standard_basis() {
        let m = IntegerMatrix::zeros(2, 3);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 3);
        let km = IntegerMatrix::from_columns(3, &k);
        assert!(km.is_unimodular());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = IntegerMatrix::from_rows(&[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]]);
        assert_eq!(m.determinant(), BigInt::from(-90));
    }

    #[test]
    fn solve_respects_divisibility() {
        let m = IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert!(m.solve(&[BigInt::from(1), BigInt::from(0)]).is_none());
        let x = m.solve(&[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
    }

    proptest! {
        #[test]
        fn smith_decomposition_holds(
            rows in 1usize..5,
            cols in 1usize..6,
            seed in proptest::collection::vec(-9i64..10, 30),
        ) {
            let data: Vec<Vec<i64>> =
                (0..rows).map(|i| (0..cols).map(|j| seed[i * cols + j]).collect()).collect();
            let m = IntegerMatrix::from_rows(&data);
            check_smith(&m);
            for k in m.kernel_basis() {
                prop_assert!(m.mul_vec(&k).iter().all(|x| x.is_zero()));
            }
        }
    }
}
