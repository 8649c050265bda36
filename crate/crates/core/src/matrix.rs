//! Dense exact rational matrices.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{dot, format_rational, rat, Integer, Rational};
use crate::error::{Error, Result};

/// Row-major dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::Shape("ragged matrix columns".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col[i].clone());
            }
        }
        Self::new(r, c, data)
    }

    /// Integer matrix literal; mostly for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
            .collect();
        Self::from_rows(rows).expect("well-formed literal")
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Rational::one(); n])
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let n = d.len();
        let mut data = vec![Rational::zero(); n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = v.clone();
        }
        Self { rows: n, cols: n, data }
    }

    pub fn diagonal_int(d: &[Integer]) -> Self {
        let d: Vec<Rational> = d.iter().map(|v| Rational::from_integer(v.clone())).collect();
        Self::diagonal(&d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn with_column(&self, j: usize, col: &[Rational]) -> Self {
        let mut m = self.clone();
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, v.clone());
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let other_cols = other.columns();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for col in &other_cols {
                data.push(dot(self.row(i), col));
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn mul_int_vec(&self, v: &[Integer]) -> Result<Vec<Rational>> {
        let v: Vec<Rational> = v.iter().map(|x| Rational::from_integer(x.clone())).collect();
        self.mul_vec(&v)
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    /// Square block on rows/columns `start..start+len`.
    pub fn block(&self, start: usize, len: usize) -> Self {
        let mut data = Vec::with_capacity(len * len);
        for i in start..start + len {
            for j in start..start + len {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: len, cols: len, data }
    }

    /// The matrix with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )))
        }
    }

    pub fn det(&self) -> Result<Rational> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            let pivot = a[k][k].clone();
            det *= &pivot;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &pivot;
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<RMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
            a.swap(p, k);
            inv.swap(p, k);
            let pivot = a[k][k].clone();
            for j in 0..n {
                a[k][j] /= &pivot;
                inv[k][j] /= &pivot;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                    let t = &f * &inv[k][j];
                    inv[i][j] -= t;
                }
            }
        }
        Self::from_rows(inv)
    }

    /// Signed cofactors `(-1)^(i+t) det(minor(i, t))` down column `t`.
    pub fn subdeterminants(&self, t: usize) -> Result<Vec<Rational>> {
        self.require_square()?;
        if t >= self.cols {
            return Err(Error::Shape(format!("column {t} out of range")));
        }
        if self.rows == 1 {
            return Ok(vec![Rational::one()]);
        }
        (0..self.rows)
            .map(|i| {
                let d = self.minor(i, t).det()?;
                Ok(if (i + t) % 2 == 0 { d } else { -d })
            })
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square()
            && self.is_integer()
            && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }
}

pub fn det(m: &RMatrix) -> Result<Rational> {
    m.det()
}

pub fn inverse(m: &RMatrix) -> Result<RMatrix> {
    m.inverse()
}

pub fn is_unimodular(m: &RMatrix) -> bool {
    m.is_unimodular()
}

pub fn subdeterminants(m: &RMatrix, col: usize) -> Result<Vec<Rational>> {
    m.subdeterminants(col)
}
