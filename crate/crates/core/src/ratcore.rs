//! Exact rational scalars, vectors and dense matrices.
//!
//! Every numeric quantity in this crate is an arbitrary-precision rational.
//! All sign decisions downstream (facet tests, lexicographic verdicts,
//! dictionary entries) are exact comparisons; floating point never enters a
//! decision path. Indices on the public surface are 1-based, matching the
//! usual complementarity conventions (`i` and `i + n` are complements).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar. Always stored in canonical form: positive
/// denominator, numerator and denominator coprime.
pub type Rational = num_rational::BigRational;

/// Shorthand for `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Error parsing a rational from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u32).pow(e as u32)
}

/// Parses `"p/q"` fractions and decimal literals (`"3"`, `"-0.25"`, `"1e-3"`)
/// into exact rationals.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).map_err(|_| err())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(err());
    }
    let n = BigInt::from_str(&digits).map_err(|_| err())?;
    let scale = frac_part.len() as i64 - exp;
    if scale >= 0 {
        Ok(Rational::new(n, pow10(scale as u64)))
    } else {
        Ok(Rational::from_integer(n * pow10((-scale) as u64)))
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A square submatrix turned out to have determinant zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular;

impl fmt::Display for Singular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("matrix is singular")
    }
}

impl std::error::Error for Singular {}

/// A linear system turned out to be inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoSolution;

impl fmt::Display for NoSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("linear system has no solution")
    }
}

impl std::error::Error for NoSolution {}

/// Dense vector of rationals, indexed 1-based via [`RatVector::at`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatVector {
    data: Vec<Rational>,
}

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        RatVector { data: vec![Rational::zero(); n] }
    }

    pub fn from_vec(data: Vec<Rational>) -> Self {
        RatVector { data }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RatVector { data: entries.iter().map(|&e| rat_int(e)).collect() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// 1-based entry access.
    pub fn at(&self, i: usize) -> &Rational {
        &self.data[i - 1]
    }

    /// 1-based entry update.
    pub fn set(&mut self, i: usize, v: Rational) {
        self.data[i - 1] = v;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.data
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn scaled(&self, s: &Rational) -> RatVector {
        RatVector { data: self.data.iter().map(|e| e * s).collect() }
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "add: length mismatch");
        RatVector {
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        assert_eq!(self.len(), other.len(), "sub: length mismatch");
        RatVector {
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> RatVector {
        RatVector { data: self.data.iter().map(|e| -e).collect() }
    }

    pub fn concat(&self, other: &RatVector) -> RatVector {
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatVector { data }
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.data.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major matrix of rationals, indexed 1-based via [`RatMatrix::at`].
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        RatMatrix { nrows, ncols, data: vec![Rational::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "from_rows: ragged rows");
        RatMatrix { nrows, ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&e| rat_int(e)).collect()).collect(),
        )
    }

    /// Column vector (n×1) from entries.
    pub fn column(v: &RatVector) -> Self {
        RatMatrix { nrows: v.len(), ncols: 1, data: v.as_slice().to_vec() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// 1-based entry access.
    pub fn at(&self, i: usize, j: usize) -> &Rational {
        debug_assert!(i >= 1 && i <= self.nrows && j >= 1 && j <= self.ncols);
        &self.data[(i - 1) * self.ncols + (j - 1)]
    }

    /// 1-based entry update.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        debug_assert!(i >= 1 && i <= self.nrows && j >= 1 && j <= self.ncols);
        self.data[(i - 1) * self.ncols + (j - 1)] = v;
    }

    /// 1-based row as a vector.
    pub fn row_vec(&self, i: usize) -> RatVector {
        RatVector::from_vec(self.data[(i - 1) * self.ncols..i * self.ncols].to_vec())
    }

    /// 1-based column as a vector.
    pub fn col_vec(&self, j: usize) -> RatVector {
        RatVector::from_vec((1..=self.nrows).map(|i| self.at(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.ncols, self.nrows);
        for i in 1..=self.nrows {
            for j in 1..=self.ncols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn neg(&self) -> RatMatrix {
        RatMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|e| -e).collect(),
        }
    }

    pub fn matmul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.ncols, other.nrows, "matmul: dimension mismatch");
        let mut out = RatMatrix::zeros(self.nrows, other.ncols);
        for i in 1..=self.nrows {
            for j in 1..=other.ncols {
                let mut acc = Rational::zero();
                for k in 1..=self.ncols {
                    let a = self.at(i, k);
                    if !a.is_zero() {
                        acc += a * other.at(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.ncols, v.len(), "mul_vec: dimension mismatch");
        let mut out = RatVector::zeros(self.nrows);
        for i in 1..=self.nrows {
            out.set(i, self.row_vec(i).dot(v));
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.nrows, other.nrows, "hstack: row count mismatch");
        let mut rows = Vec::with_capacity(self.nrows);
        for i in 1..=self.nrows {
            let mut row = self.row_vec(i).as_slice().to_vec();
            row.extend(other.row_vec(i).as_slice().to_vec());
            rows.push(row);
        }
        RatMatrix::from_rows(rows)
    }

    /// Gathers columns by 1-based indices.
    pub fn select_columns(&self, indices: &[usize]) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.nrows, indices.len());
        for (k, &j) in indices.iter().enumerate() {
            for i in 1..=self.nrows {
                out.set(i, k + 1, self.at(i, j).clone());
            }
        }
        out
    }

    /// Principal submatrix on 1-based row/column index set.
    pub fn principal_submatrix(&self, indices: &[usize]) -> RatMatrix {
        let mut out = RatMatrix::zeros(indices.len(), indices.len());
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                out.set(r + 1, c + 1, self.at(i, j).clone());
            }
        }
        out
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn invert(&self) -> Result<RatMatrix, Singular> {
        assert_eq!(self.nrows, self.ncols, "invert: matrix not square");
        let n = self.nrows;
        let mut work = self.hstack(&RatMatrix::identity(n));
        for col in 1..=n {
            let pivot_row = (col..=n).find(|&r| !work.at(r, col).is_zero());
            let pivot_row = match pivot_row {
                Some(r) => r,
                None => return Err(Singular),
            };
            work.swap_rows(pivot_row, col);
            work.scale_row(col, &work.at(col, col).recip());
            for r in 1..=n {
                if r != col && !work.at(r, col).is_zero() {
                    let factor = work.at(r, col).clone();
                    work.sub_scaled_row(r, col, &factor);
                }
            }
        }
        let mut out = RatMatrix::zeros(n, n);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, work.at(i, n + j).clone());
            }
        }
        Ok(out)
    }

    /// Exact rank via row elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        let mut row = 1;
        for col in 1..=work.ncols {
            if row > work.nrows {
                break;
            }
            let pivot_row = (row..=work.nrows).find(|&r| !work.at(r, col).is_zero());
            let pivot_row = match pivot_row {
                Some(r) => r,
                None => continue,
            };
            work.swap_rows(pivot_row, row);
            for r in (row + 1)..=work.nrows {
                if !work.at(r, col).is_zero() {
                    let factor = work.at(r, col) / work.at(row, col);
                    work.sub_scaled_row(r, row, &factor);
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Exact determinant via triangularization.
    pub fn det(&self) -> Rational {
        assert_eq!(self.nrows, self.ncols, "det: matrix not square");
        let n = self.nrows;
        let mut work = self.clone();
        let mut det = Rational::one();
        for col in 1..=n {
            let pivot_row = (col..=n).find(|&r| !work.at(r, col).is_zero());
            let pivot_row = match pivot_row {
                Some(r) => r,
                None => return Rational::zero(),
            };
            if pivot_row != col {
                work.swap_rows(pivot_row, col);
                det = -det;
            }
            det *= work.at(col, col);
            for r in (col + 1)..=n {
                if !work.at(r, col).is_zero() {
                    let factor = work.at(r, col) / work.at(col, col);
                    work.sub_scaled_row(r, col, &factor);
                }
            }
        }
        det
    }

    /// Solves `self · x = b` exactly. Free variables of underdetermined
    /// systems are set to zero; inconsistent systems yield [`NoSolution`].
    pub fn solve(&self, b: &RatVector) -> Result<RatVector, NoSolution> {
        assert_eq!(self.nrows, b.len(), "solve: row count mismatch");
        let m = self.nrows;
        let n = self.ncols;
        let mut work = self.hstack(&RatMatrix::column(b));
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 1;
        for col in 1..=n {
            if row > m {
                break;
            }
            let pivot_row = (row..=m).find(|&r| !work.at(r, col).is_zero());
            let pivot_row = match pivot_row {
                Some(r) => r,
                None => continue,
            };
            work.swap_rows(pivot_row, row);
            work.scale_row(row, &work.at(row, col).recip());
            for r in 1..=m {
                if r != row && !work.at(r, col).is_zero() {
                    let factor = work.at(r, col).clone();
                    work.sub_scaled_row(r, row, &factor);
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        for r in row..=m {
            if !work.at(r, n + 1).is_zero() {
                return Err(NoSolution);
            }
        }
        let mut x = RatVector::zeros(n);
        for &(r, c) in &pivots {
            x.set(c, work.at(r, n + 1).clone());
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap((a - 1) * self.ncols + j, (b - 1) * self.ncols + j);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Rational) {
        for j in 1..=self.ncols {
            let v = self.at(r, j) * factor;
            self.set(r, j, v);
        }
    }

    /// row_a -= factor * row_b
    fn sub_scaled_row(&mut self, a: usize, b: usize, factor: &Rational) {
        for j in 1..=self.ncols {
            let v = self.at(a, j) - factor * self.at(b, j);
            self.set(a, j, v);
        }
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// True when the matrix equals its transpose.
    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 1..=self.nrows {
            for j in (i + 1)..=self.ncols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// (self + selfᵀ) / 2
    pub fn symmetric_part(&self) -> RatMatrix {
        assert_eq!(self.nrows, self.ncols);
        let half = rat(1, 2);
        let t = self.transpose();
        let mut out = RatMatrix::zeros(self.nrows, self.ncols);
        for i in 1..=self.nrows {
            for j in 1..=self.ncols {
                out.set(i, j, (self.at(i, j) + t.at(i, j)) * &half);
            }
        }
        out
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.nrows, self.ncols)?;
        for i in 1..=self.nrows {
            writeln!(f, "  {:?}", self.row_vec(i))?;
        }
        Ok(())
    }
}

/// Sign of a rational as -1, 0, +1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("3/-4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2.5e2").unwrap(), rat_int(250));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&rat(6, 8)), "3/4");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-1, 3)), "-1/3");
    }

    #[test]
    fn invert_identity() {
        let id = RatMatrix::identity(3);
        assert_eq!(id.invert().unwrap(), id);
    }

    #[test]
    fn invert_two_by_two() {
        let m = RatMatrix::from_i64_rows(&[&[1, -1], &[1, 1]]);
        let inv = m.invert().unwrap();
        let expected = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(-1, 2), rat(1, 2)],
        ]);
        assert_eq!(inv, expected);
        assert_eq!(inv.matmul(&m), RatMatrix::identity(2));
    }

    #[test]
    fn invert_rank_deficient_is_singular() {
        let m = RatMatrix::from_i64_rows(&[&[0, 1], &[0, 2]]);
        assert_eq!(m.invert(), Err(Singular));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::zeros(2, 3).rank(), 0);
        assert_eq!(RatMatrix::identity(4).rank(), 4);
        assert_eq!(RatMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn solve_examples() {
        let id = RatMatrix::identity(2);
        assert_eq!(id.solve(&RatVector::from_i64(&[3, 5])).unwrap(), RatVector::from_i64(&[3, 5]));

        let diag = RatMatrix::from_i64_rows(&[&[2, 0], &[0, 4]]);
        assert_eq!(
            diag.solve(&RatVector::from_i64(&[1, 1])).unwrap(),
            RatVector::from_vec(vec![rat(1, 2), rat(1, 4)])
        );

        let dup = RatMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(dup.solve(&RatVector::from_i64(&[0, 1])), Err(NoSolution));
    }

    #[test]
    fn det_examples() {
        let m = RatMatrix::from_i64_rows(&[&[1, -1], &[1, 1]]);
        assert_eq!(m.det(), rat_int(2));
        assert_eq!(RatMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).det(), rat_int(0));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec(-5i64..=5, n * n).prop_map(move |v| {
            RatMatrix::from_rows(
                v.chunks(n).map(|r| r.iter().map(|&e| rat_int(e)).collect()).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn rank_equals_rank_of_transpose(m in small_matrix(3)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn inverse_times_matrix_is_identity(m in small_matrix(3)) {
            if let Ok(inv) = m.invert() {
                prop_assert_eq!(inv.matmul(&m), RatMatrix::identity(3));
                prop_assert_eq!(m.matmul(&inv), RatMatrix::identity(3));
            }
        }

        #[test]
        fn solve_produces_exact_solutions(m in small_matrix(3), bv in proptest::collection::vec(-5i64..=5, 3)) {
            let b = RatVector::from_i64(&bv);
            if let Ok(x) = m.solve(&b) {
                prop_assert_eq!(m.mul_vec(&x), b);
            }
        }
    }
}
