//! Exact integer and rational matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::RMat;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rational matrix".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must match shape");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| int(x)).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && *self == -self.transpose()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Least common multiple of all reduced denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Exact determinant: clears denominators, then fraction-free elimination.
    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let scale = self.denominator_lcm();
        let ints: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (&self[(i, j)] * Rational::from_integer(scale.clone())).to_integer())
                    .collect()
            })
            .collect();
        let det = bareiss_determinant(ints);
        Rational::new(det, num_traits::pow(scale, n))
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or_else(|| Error::Singular("rational matrix".into()))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let da = &f * &a[(col, j)];
                    let di = &f * &inv[(col, j)];
                    a[(r, j)] = &a[(r, j)] - da;
                    inv[(r, j)] = &inv[(r, j)] - di;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_f64(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| rational_to_f64(&self[(i, j)]))
    }

    /// Integer entries, failing if any entry is fractional.
    pub fn to_integer(&self) -> Result<ZMatrix> {
        if !self.is_integral() {
            return Err(Error::InvalidArgument(
                "matrix has non-integral entries".into(),
            ));
        }
        Ok(ZMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_integer()).collect(),
        })
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        QMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| {
                acc + &self[(i, k)] * &rhs[(k, j)]
            })
        })
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }
}

impl Neg for QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must match shape");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| BigInt::from(i64::from(i == j)))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * &k).collect(),
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == -&self[(j, i)]))
    }

    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let a: Vec<Vec<BigInt>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        bareiss_determinant(a)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rational(&self) -> QMatrix {
        QMatrix::from_fn(self.rows, self.cols, |i, j| {
            Rational::from_integer(self[(i, j)].clone())
        })
    }

    pub fn to_f64(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for ZMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ZMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ZMatrix {
    type Output = ZMatrix;
    fn mul(self, rhs: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        ZMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(BigInt::zero(), |acc, k| acc + &self[(i, k)] * &rhs[(k, j)])
        })
    }
}

impl fmt::Display for ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination; every intermediate division is exact.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Absolute value test `|d| = 1`.
pub fn is_unit(d: &BigInt) -> bool {
    d.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = ZMatrix::from_i64(3, 3, &[2, -1, 3, 0, 4, 5, 1, 1, -2]);
        // 2(4*-2 - 5*1) - (-1)(0*-2 - 5*1) + 3(0*1 - 4*1) = -26 - 5 - 12
        assert_eq!(m.determinant(), BigInt::from(-43));
        let z = ZMatrix::from_i64(2, 2, &[0, 1, 0, 2]);
        assert_eq!(z.determinant(), BigInt::zero());
        let p = ZMatrix::from_i64(2, 2, &[0, 1, -1, 0]);
        assert_eq!(p.determinant(), BigInt::one());
    }

    #[test]
    fn rational_determinant_and_inverse() {
        let m = QMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 5)]])
            .unwrap();
        assert_eq!(m.determinant(), rat(1, 10) - rat(1, 12));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(2));
        assert!(QMatrix::zeros(2, 2).inverse().is_err());
    }

    #[test]
    fn denominators() {
        let m =
            QMatrix::from_rows(vec![vec![rat(1, 3), rat(-1, 4)], vec![int(2), rat(5, 6)]]).unwrap();
        assert_eq!(m.denominator_lcm(), BigInt::from(12));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
