use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LinalgError;
use crate::ZVec;

/// A square matrix over the rationals, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::NotSquare);
        }
        Ok(RationalMatrix { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        RationalMatrix { rows }
    }

    /// Integer matrix given row by row, divided by `denominator`.
    pub fn from_i64(rows: &[&[i64]], denominator: i64) -> Result<Self, LinalgError> {
        assert!(denominator != 0, "zero denominator");
        let d = BigInt::from(denominator);
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::new(BigInt::from(x), d.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    /// The matrix whose columns are the given integer vectors.
    pub fn from_columns(columns: &[ZVec]) -> Result<Self, LinalgError> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(LinalgError::NotSquare);
        }
        let rows = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(columns[j][i].clone())).collect())
            .collect();
        Ok(RationalMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        let n = self.dim();
        assert_eq!(n, other.dim(), "matrix dimensions differ");
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(BigRational::zero(), |acc, k| {
                            acc + &self.rows[i][k] * &other.rows[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        RationalMatrix { rows }
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.dim(), "vector dimension differs from matrix");
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `A x` for integer `x`, or `None` when the image is not integral.
    pub fn apply_integral(&self, x: &[BigInt]) -> Option<ZVec> {
        let v: Vec<BigRational> = x.iter().cloned().map(BigRational::from_integer).collect();
        self.mul_vec(&v)
            .into_iter()
            .map(|q| if q.is_integer() { Some(q.to_integer()) } else { None })
            .collect()
    }

    pub fn pow(&self, mut k: u64) -> RationalMatrix {
        let mut base = self.clone();
        let mut acc = RationalMatrix::identity(self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == RationalMatrix::identity(self.dim())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect();
        RationalMatrix { rows }
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] / &pivot;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<RationalMatrix, LinalgError> {
        let n = self.dim();
        let mut m: Vec<Vec<BigRational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(LinalgError::Singular)?;
            m.swap(p, col);
            let pivot = m[col][col].clone();
            for c in 0..2 * n {
                m[col][c] = &m[col][c] / &pivot;
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
        Ok(RationalMatrix { rows: m.into_iter().map(|r| r[n..].to_vec()).collect() })
    }

    /// Least positive integer `d` with `d A` integral.
    pub fn common_denominator(&self) -> BigInt {
        self.rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    /// Row-major entries scaled to integers by [`Self::common_denominator`].
    pub fn scaled_integer_rows(&self) -> (BigInt, Vec<ZVec>) {
        let d = self.common_denominator();
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|q| (q * &d).to_integer()).collect())
            .collect();
        (d, rows)
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().flatten().all(|q| q.is_integer())
    }

    pub fn max_abs_entry(&self) -> BigRational {
        self.rows
            .iter()
            .flatten()
            .map(|q| q.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, q) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{q}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// The unique `A` with `A * primed[j] = doubleprimed[j]` for every column `j`.
pub fn solve_conjugator(primed: &[ZVec], doubleprimed: &[ZVec]) -> Result<RationalMatrix, LinalgError> {
    if primed.len() != doubleprimed.len() {
        return Err(LinalgError::DimensionMismatch { expected: primed.len(), found: doubleprimed.len() });
    }
    let p = RationalMatrix::from_columns(primed)?;
    let d = RationalMatrix::from_columns(doubleprimed)?;
    Ok(d.mul(&p.inverse()?))
}
