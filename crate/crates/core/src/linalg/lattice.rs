use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{LinalgError, RationalMatrix};
use crate::ZVec;

/// A sublattice of `Z^n`, held in column Hermite normal form.
///
/// Column `j` has its pivot (first nonzero entry) in row `pivots[j]`, the pivot
/// rows strictly increase, pivots are positive, and every entry of an earlier
/// column in a pivot row lies in `[0, pivot)`. The form is unique, so derived
/// equality is lattice equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    ambient_dim: usize,
    basis: Vec<ZVec>,
    pivots: Vec<usize>,
}

/// Outcome of comparing a lattice against a candidate superlattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
    NotContained,
}

/// Column Hermite normal form of the lattice spanned by `generators` in `Z^n`.
///
/// Zero generators are allowed; the empty generator list yields the zero lattice.
pub fn hnf(n: usize, generators: &[ZVec]) -> Lattice {
    let mut cols: Vec<ZVec> = generators
        .iter()
        .inspect(|g| assert_eq!(g.len(), n, "generator dimension differs from ambient dimension"))
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for row in 0..n {
        if next == cols.len() {
            break;
        }
        // Euclid on this row across the unprocessed columns.
        let mut found = false;
        loop {
            let best = (next..cols.len())
                .filter(|&j| !cols[j][row].is_zero())
                .min_by(|&a, &b| cols[a][row].abs().cmp(&cols[b][row].abs()));
            let Some(b) = best else { break };
            found = true;
            cols.swap(next, b);
            let mut clean = true;
            for j in next + 1..cols.len() {
                if cols[j][row].is_zero() {
                    continue;
                }
                let q = cols[j][row].div_floor(&cols[next][row]);
                let (head, tail) = cols.split_at_mut(j);
                sub_multiple(&mut tail[0], &q, &head[next]);
                if !tail[0][row].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if cols[next][row].is_negative() {
            for x in cols[next].iter_mut() {
                *x = -&*x;
            }
        }
        let (head, tail) = cols.split_at_mut(next);
        let pivot_col = &tail[0];
        for earlier in head.iter_mut() {
            let q = earlier[row].div_floor(&pivot_col[row]);
            if !q.is_zero() {
                sub_multiple(earlier, &q, pivot_col);
            }
        }
        pivots.push(row);
        next += 1;
    }
    cols.truncate(next);
    Lattice { ambient_dim: n, basis: cols, pivots }
}

fn sub_multiple(target: &mut ZVec, q: &BigInt, col: &ZVec) {
    for (t, c) in target.iter_mut().zip(col) {
        *t -= q * c;
    }
}

impl Lattice {
    /// The full lattice `Z^n`.
    pub fn integer(n: usize) -> Lattice {
        Self::scaled_integer(n, &BigInt::one())
    }

    /// `k Z^n` for `k > 0`.
    pub fn scaled_integer(n: usize, k: &BigInt) -> Lattice {
        assert!(k.is_positive(), "scale must be positive");
        let basis = (0..n)
            .map(|j| (0..n).map(|i| if i == j { k.clone() } else { BigInt::zero() }).collect())
            .collect();
        Lattice { ambient_dim: n, basis, pivots: (0..n).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    /// Basis columns in Hermite form.
    pub fn basis(&self) -> &[ZVec] {
        &self.basis
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivots
    }

    pub fn pivot(&self, j: usize) -> &BigInt {
        &self.basis[j][self.pivots[j]]
    }

    /// Product of the pivots; for full-rank lattices this is `[Z^n : self]`.
    pub fn covolume(&self) -> BigInt {
        (0..self.rank()).fold(BigInt::one(), |acc, j| acc * self.pivot(j))
    }

    /// Integer coordinates of `x` in the Hermite basis, if `x` is a member.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<ZVec> {
        assert_eq!(x.len(), self.ambient_dim, "vector dimension differs from lattice");
        let mut rest: ZVec = x.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (j, col) in self.basis.iter().enumerate() {
            let p = self.pivots[j];
            // rows above p that are not pivot rows must already be cleared
            let start = if j == 0 { 0 } else { self.pivots[j - 1] + 1 };
            if rest[start..p].iter().any(|v| !v.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_mod_floor(&col[p]);
            if !r.is_zero() {
                return None;
            }
            sub_multiple(&mut rest, &q, col);
            coords.push(q);
        }
        if rest.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(coords)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    /// Canonical representative of `x + self`: each pivot coordinate, taken in
    /// increasing row order, is reduced into `[0, pivot)`.
    pub fn residue(&self, x: &[BigInt]) -> ZVec {
        assert_eq!(x.len(), self.ambient_dim, "vector dimension differs from lattice");
        let mut r: ZVec = x.to_vec();
        for (j, col) in self.basis.iter().enumerate() {
            let p = self.pivots[j];
            let q = r[p].div_floor(&col[p]);
            if !q.is_zero() {
                sub_multiple(&mut r, &q, col);
            }
        }
        r
    }

    /// Every canonical residue of a full-rank lattice, in lexicographic order
    /// of the coordinates. There are exactly [`Self::covolume`] of them.
    pub fn residues(&self) -> Vec<ZVec> {
        assert!(self.is_full_rank(), "residue enumeration needs a full-rank lattice");
        let mut out: Vec<ZVec> = alloc::vec![Vec::new()];
        for j in 0..self.ambient_dim {
            let p = self.pivot(j).clone();
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = BigInt::zero();
                while k < p {
                    let mut v = prefix.clone();
                    v.push(k.clone());
                    next.push(v);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }

    /// Rational coordinates of `x` in the basis of a full-rank lattice.
    pub fn rational_coordinates(&self, x: &[BigInt]) -> Result<Vec<BigRational>, LinalgError> {
        if !self.is_full_rank() {
            return Err(LinalgError::NotFullRank);
        }
        let n = self.ambient_dim;
        let mut coords: Vec<BigRational> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = BigRational::from_integer(x[i].clone());
            for (j, c) in coords.iter().enumerate() {
                acc -= c * BigRational::from_integer(self.basis[j][i].clone());
            }
            coords.push(acc / BigRational::from_integer(self.basis[i][i].clone()));
        }
        Ok(coords)
    }

    /// Least `m >= 1` with `m x` in the lattice (full rank only).
    pub fn order_of(&self, x: &[BigInt]) -> Result<BigInt, LinalgError> {
        Ok(self
            .rational_coordinates(x)?
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom())))
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// `[sup : self]`.
    pub fn index_in(&self, sup: &Lattice) -> LatticeIndex {
        assert_eq!(self.ambient_dim, sup.ambient_dim, "ambient dimensions differ");
        if !self.is_subset_of(sup) {
            return LatticeIndex::NotContained;
        }
        if self.rank() < sup.rank() {
            return LatticeIndex::Infinite;
        }
        // equal rank and nested: both span the same rational subspace, so the
        // pivot rows agree and the index is the ratio of pivot products
        LatticeIndex::Finite(self.covolume() / sup.covolume())
    }

    /// Set-theoretic intersection.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let n = self.ambient_dim;
        assert_eq!(n, other.ambient_dim, "ambient dimensions differ");
        // Columns (b, b) for b in self and (c, 0) for c in other; the part of
        // the lattice with vanishing top half has bottom half self ∩ other.
        let mut gens = Vec::with_capacity(self.rank() + other.rank());
        for b in &self.basis {
            let mut v = b.clone();
            v.extend(b.iter().cloned());
            gens.push(v);
        }
        for c in &other.basis {
            let mut v = c.clone();
            v.extend(core::iter::repeat_n(BigInt::zero(), n));
            gens.push(v);
        }
        let big = hnf(2 * n, &gens);
        let bottom: Vec<ZVec> = big
            .basis
            .iter()
            .zip(&big.pivots)
            .filter(|(_, &p)| p >= n)
            .map(|(col, _)| col[n..].to_vec())
            .collect();
        hnf(n, &bottom)
    }

    /// `A(self)`, or `None` when some image vector is not integral.
    pub fn image(&self, a: &RationalMatrix) -> Option<Lattice> {
        assert_eq!(a.dim(), self.ambient_dim, "matrix dimension differs from lattice");
        let cols: Option<Vec<ZVec>> = self.basis.iter().map(|b| a.apply_integral(b)).collect();
        Some(hnf(self.ambient_dim, &cols?))
    }
}

/// `{x in Z^n : A x in Z^n}` for invertible rational `A`.
pub fn integral_preimage(a: &RationalMatrix) -> Result<Lattice, LinalgError> {
    let n = a.dim();
    let inv = a.inverse()?;
    let (d, rows) = a.scaled_integer_rows();
    // with M = dA: x qualifies iff M x lies in d Z^n, i.e. x in M^{-1}(M Z^n ∩ d Z^n)
    let m_cols: Vec<ZVec> = (0..n).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    let image = hnf(n, &m_cols).intersect(&Lattice::scaled_integer(n, &d));
    let d_rat = BigRational::from_integer(d);
    let preimage: Vec<ZVec> = image
        .basis
        .iter()
        .map(|k| {
            let v: Vec<BigRational> = k.iter().map(|x| BigRational::from_integer(x.clone()) / &d_rat).collect();
            inv.mul_vec(&v)
                .into_iter()
                .map(|q| {
                    debug_assert!(q.is_integer());
                    q.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(hnf(n, &preimage))
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (j, col) in self.basis.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (i, x) in col.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ">")
    }
}
