//! The group `G(A, L') = <Z^n, t | t c t^-1 = A c for c in L'>` and its word
//! problem.
//!
//! Elements are words `c0 t^e1 c1 ... t^ek ck` with `ci` in `Z^n`. The normal
//! form is Britton-reduced (no pinch `t c t^-1` with `c` in `L'` and no pinch
//! `t^-1 c t` with `c` in `L''`) and left-pushed: every entry followed by `t`
//! is the Hermite residue of its class mod `L''`, every entry followed by
//! `t^-1` the residue mod `L'`, and the lattice parts have been conjugated
//! across into the next entry. Two words are equal in the group exactly when
//! their normal forms are identical.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::{
    classify_matrix, LatticeIndex, Lattice, LinalgError, MatrixClassification, RationalMatrix, hnf,
};
use crate::ZVec;

/// Exponent of a stable letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_i32(e: i32) -> Option<Sign> {
        match e {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }
}

/// `head t^e1 c1 t^e2 c2 ...`, with `tail = [(e1, c1), (e2, c2), ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub head: ZVec,
    pub tail: Vec<(Sign, ZVec)>,
}

impl Word {
    pub fn identity(n: usize) -> Word {
        Word { head: zero(n), tail: Vec::new() }
    }

    pub fn abelian(c: ZVec) -> Word {
        Word { head: c, tail: Vec::new() }
    }

    /// `t` or `t^-1`.
    pub fn stable(n: usize, sign: Sign) -> Word {
        Word { head: zero(n), tail: alloc::vec![(sign, zero(n))] }
    }

    pub fn dim(&self) -> usize {
        self.head.len()
    }

    pub fn t_length(&self) -> usize {
        self.tail.len()
    }

    /// The final abelian entry.
    pub fn last_entry(&self) -> &ZVec {
        self.tail.last().map(|(_, c)| c).unwrap_or(&self.head)
    }

    fn last_entry_mut(&mut self) -> &mut ZVec {
        match self.tail.last_mut() {
            Some((_, c)) => c,
            None => &mut self.head,
        }
    }

    /// Juxtaposition, merging the abelian letters that meet.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        add_assign(out.last_entry_mut(), &other.head);
        out.tail.extend(other.tail.iter().cloned());
        out
    }

    /// The formal inverse `(-ck) t^-ek ... t^-e1 (-c0)`.
    pub fn formal_inverse(&self) -> Word {
        let mut entries: Vec<&ZVec> = Vec::with_capacity(self.tail.len() + 1);
        entries.push(&self.head);
        entries.extend(self.tail.iter().map(|(_, c)| c));
        let k = self.tail.len();
        let head = neg(entries[k]);
        let tail = (0..k).rev().map(|i| (self.tail[i].0.flip(), neg(entries[i]))).collect();
        Word { head, tail }
    }

    fn check_dim(&self, n: usize) -> Result<(), GroupError> {
        let bad = core::iter::once(&self.head)
            .chain(self.tail.iter().map(|(_, c)| c))
            .find(|c| c.len() != n);
        match bad {
            Some(c) => Err(GroupError::DimensionMismatch { expected: n, found: c.len() }),
            None => Ok(()),
        }
    }
}

fn fmt_vec(f: &mut fmt::Formatter<'_>, v: &[BigInt]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

pub(crate) fn fmt_letter(f: &mut fmt::Formatter<'_>, s: Sign) -> fmt::Result {
    match s {
        Sign::Pos => write!(f, " t "),
        Sign::Neg => write!(f, " t^-1 "),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_vec(f, &self.head)?;
        for (s, c) in &self.tail {
            fmt_letter(f, *s)?;
            fmt_vec(f, c)?;
        }
        Ok(())
    }
}

/// A word in left-pushed Britton normal form. Only [`GroupData`] builds these.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm(Word);

impl NormalForm {
    pub fn head(&self) -> &ZVec {
        &self.0.head
    }

    pub fn tail(&self) -> &[(Sign, ZVec)] {
        &self.0.tail
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn t_length(&self) -> usize {
        self.0.t_length()
    }

    pub fn is_identity(&self) -> bool {
        self.0.tail.is_empty() && self.0.head.iter().all(|x| x.is_zero())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    Linalg(LinalgError),
    ZeroDimension,
    DimensionMismatch { expected: usize, found: usize },
    /// Some generator `c` of `L'` has `A c` outside `Z^n`.
    ImageNotIntegral(ZVec),
    /// `L'` has infinite index in `Z^n`.
    InfiniteIndex,
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::Linalg(e) => write!(f, "{e}"),
            GroupError::ZeroDimension => write!(f, "dimension must be positive"),
            GroupError::DimensionMismatch { expected, found } => {
                write!(f, "vector has dimension {found}, group has dimension {expected}")
            }
            GroupError::ImageNotIntegral(c) => {
                write!(f, "A maps the L' generator ")?;
                fmt_vec(f, c)?;
                write!(f, " outside Z^n")
            }
            GroupError::InfiniteIndex => write!(f, "L' is not of full rank (infinite index)"),
        }
    }
}

impl core::error::Error for GroupError {}

impl From<LinalgError> for GroupError {
    fn from(e: LinalgError) -> Self {
        GroupError::Linalg(e)
    }
}

/// Validated presentation data of `G(A, L')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupData {
    n: usize,
    a: RationalMatrix,
    a_inv: RationalMatrix,
    l_prime: Lattice,
    l_doubleprime: Lattice,
    index_prime: BigInt,
    index_doubleprime: BigInt,
    classification: MatrixClassification,
}

/// Checks the presentation data and derives `L'' = A L'`, both indices and
/// the classification of `A`.
pub fn validate_group(n: usize, a: RationalMatrix, l_prime_generators: &[ZVec]) -> Result<GroupData, GroupError> {
    if n == 0 {
        return Err(GroupError::ZeroDimension);
    }
    if a.dim() != n {
        return Err(GroupError::DimensionMismatch { expected: n, found: a.dim() });
    }
    if let Some(g) = l_prime_generators.iter().find(|g| g.len() != n) {
        return Err(GroupError::DimensionMismatch { expected: n, found: g.len() });
    }
    let a_inv = a.inverse()?;
    if let Some(g) = l_prime_generators.iter().find(|g| a.apply_integral(g).is_none()) {
        return Err(GroupError::ImageNotIntegral(g.clone()));
    }
    let l_prime = hnf(n, l_prime_generators);
    if !l_prime.is_full_rank() {
        return Err(GroupError::InfiniteIndex);
    }
    let l_doubleprime = l_prime.image(&a).expect("generators checked integral");
    let z = Lattice::integer(n);
    let index = |l: &Lattice| match l.index_in(&z) {
        LatticeIndex::Finite(k) => k,
        other => unreachable!("full-rank sublattice of Z^n has finite index, got {other:?}"),
    };
    let index_prime = index(&l_prime);
    let index_doubleprime = index(&l_doubleprime);
    let classification = classify_matrix(&a)?;
    Ok(GroupData { n, a, a_inv, l_prime, l_doubleprime, index_prime, index_doubleprime, classification })
}

impl GroupData {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn matrix_inverse(&self) -> &RationalMatrix {
        &self.a_inv
    }

    pub fn l_prime(&self) -> &Lattice {
        &self.l_prime
    }

    pub fn l_doubleprime(&self) -> &Lattice {
        &self.l_doubleprime
    }

    /// `[Z^n : L']`.
    pub fn index_prime(&self) -> &BigInt {
        &self.index_prime
    }

    /// `[Z^n : L'']`.
    pub fn index_doubleprime(&self) -> &BigInt {
        &self.index_doubleprime
    }

    pub fn classification(&self) -> &MatrixClassification {
        &self.classification
    }

    /// Edge lattice crossed by `t^sign`: `L''` for `t`, `L'` for `t^-1`.
    pub fn edge_lattice(&self, sign: Sign) -> &Lattice {
        match sign {
            Sign::Pos => &self.l_doubleprime,
            Sign::Neg => &self.l_prime,
        }
    }

    /// `A c` for `c` in `L'`.
    pub fn conjugate_by_t(&self, c: &[BigInt]) -> ZVec {
        self.a.apply_integral(c).expect("A maps L' into Z^n")
    }

    /// `A^-1 c` for `c` in `L''`.
    pub fn conjugate_by_t_inverse(&self, c: &[BigInt]) -> ZVec {
        self.a_inv.apply_integral(c).expect("A^-1 maps L'' into Z^n")
    }

    /// The value of the pinch `t^s c t^-s`, if the pinch applies.
    pub fn pinch(&self, s: Sign, c: &[BigInt]) -> Option<ZVec> {
        match s {
            Sign::Pos if self.l_prime.contains(c) => Some(self.conjugate_by_t(c)),
            Sign::Neg if self.l_doubleprime.contains(c) => Some(self.conjugate_by_t_inverse(c)),
            _ => None,
        }
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm(Word::identity(self.n))
    }

    pub fn generator_t(&self, sign: Sign) -> NormalForm {
        NormalForm(Word::stable(self.n, sign))
    }

    pub fn abelian(&self, c: ZVec) -> Result<NormalForm, GroupError> {
        self.normalize(&Word::abelian(c))
    }

    pub fn normalize(&self, w: &Word) -> Result<NormalForm, GroupError> {
        w.check_dim(self.n)?;
        // Britton reduction: a single left-to-right pass with a stack.
        let mut out = Word { head: w.head.clone(), tail: Vec::with_capacity(w.tail.len()) };
        for (s, c) in &w.tail {
            let pinched = match out.tail.last() {
                Some((prev, last)) if *prev == s.flip() => self.pinch(*prev, last),
                _ => None,
            };
            match pinched {
                Some(value) => {
                    out.tail.pop();
                    let entry = out.last_entry_mut();
                    add_assign(entry, &value);
                    add_assign(entry, c);
                }
                None => out.tail.push((*s, c.clone())),
            }
        }
        // Left-push: residues stay, lattice parts cross the next stable letter.
        let k = out.tail.len();
        for i in 0..k {
            let s = out.tail[i].0;
            let entry = if i == 0 { &mut out.head } else { &mut out.tail[i - 1].1 };
            let r = self.edge_lattice(s).residue(entry);
            let lattice_part: ZVec = entry.iter().zip(&r).map(|(x, y)| x - y).collect();
            *entry = r;
            if lattice_part.iter().any(|x| !x.is_zero()) {
                let carried = match s {
                    Sign::Pos => self.conjugate_by_t_inverse(&lattice_part),
                    Sign::Neg => self.conjugate_by_t(&lattice_part),
                };
                add_assign(&mut out.tail[i].1, &carried);
            }
        }
        debug_assert!(self.is_normal(&out));
        Ok(NormalForm(out))
    }

    /// Checks the normal-form conditions directly.
    pub fn is_normal(&self, w: &Word) -> bool {
        if w.check_dim(self.n).is_err() {
            return false;
        }
        let k = w.tail.len();
        (0..k).all(|i| {
            let s = w.tail[i].0;
            let entry = if i == 0 { &w.head } else { &w.tail[i - 1].1 };
            let canonical = self.edge_lattice(s).residue(entry) == *entry;
            let pinch = i > 0 && w.tail[i - 1].0 == s.flip() && self.pinch(s.flip(), entry).is_some();
            canonical && !pinch
        })
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> Result<NormalForm, GroupError> {
        self.normalize(&a.0.concat(&b.0))
    }

    pub fn invert(&self, w: &NormalForm) -> NormalForm {
        self.normalize(&w.0.formal_inverse()).expect("dimension already checked")
    }

    /// `c^k` for `c` in `Z^n`, i.e. `k c`.
    pub fn abelian_power(&self, c: &[BigInt], k: &BigInt) -> NormalForm {
        NormalForm(Word::abelian(c.iter().map(|x| x * k).collect()))
    }
}

pub(crate) fn zero(n: usize) -> ZVec {
    alloc::vec![BigInt::zero(); n]
}

pub(crate) fn add_assign(target: &mut ZVec, v: &[BigInt]) {
    for (t, x) in target.iter_mut().zip(v) {
        *t += x;
    }
}

fn neg(v: &[BigInt]) -> ZVec {
    v.iter().map(|x| -x).collect()
}

/// Ready-made presentations used throughout the tests and demo.
pub mod presets {
    use super::*;

    /// `BS(p, q) = <a, t | t a^p t^-1 = a^q>`, presented with `L' = pZ` and
    /// `A = q/p`.
    pub fn baumslag_solitar(p: i64, q: i64) -> Result<GroupData, GroupError> {
        let a = RationalMatrix::from_i64(&[&[q]], p)?;
        validate_group(1, a, &[crate::zvec(&[p])])
    }

    /// `A = (1/5)[[3,-4],[4,3]]` with `L' = <(2,-1), (1,2)>`, so that
    /// `L'' = <(2,1), (-1,2)>`.
    pub fn flagship() -> GroupData {
        let a = RationalMatrix::from_i64(&[&[3, -4], &[4, 3]], 5).expect("square");
        validate_group(2, a, &[crate::zvec(&[2, -1]), crate::zvec(&[1, 2])]).expect("valid presentation")
    }

    /// Rotation by a quarter turn with `L' = <(1,1), (1,-1)>`, a finite-order
    /// instance.
    pub fn quarter_turn() -> GroupData {
        let a = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]], 1).expect("square");
        validate_group(2, a, &[crate::zvec(&[1, 1]), crate::zvec(&[1, -1])]).expect("valid presentation")
    }
}
