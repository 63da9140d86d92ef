//! Exact rational and integer linear algebra.

mod classify;
mod factor;
mod lattice;
mod matrix;
mod poly;

use core::fmt;

pub use classify::{classify_matrix, minimal_polynomial, FactorVerdict, MatrixClassification, MatrixOrder};
pub use factor::{cyclotomic_polynomial, euler_phi, factor_over_rationals};
pub use lattice::{hnf, integral_preimage, Lattice, LatticeIndex};
pub use matrix::{solve_conjugator, RationalMatrix};
pub use poly::{sturm_count, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    NotSquare,
    DimensionMismatch { expected: usize, found: usize },
    Singular,
    ZeroPolynomial,
    EmptyInterval,
    NotFullRank,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotSquare => write!(f, "matrix is not square"),
            LinalgError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            LinalgError::Singular => write!(f, "matrix is singular"),
            LinalgError::ZeroPolynomial => write!(f, "zero polynomial"),
            LinalgError::EmptyInterval => write!(f, "interval endpoints must satisfy lo < hi"),
            LinalgError::NotFullRank => write!(f, "lattice is not of full rank"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Option<num_rational::BigRational> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(num_rational::BigRational::new(n, d))
        }
        None => Some(num_rational::BigRational::from_integer(s.parse().ok()?)),
    }
}
