//! Exact computations for the HNN extensions `G(A, L')` of `Z^n`, where the
//! stable letter `t` conjugates a finite-index sublattice `L'` onto
//! `L'' = A L'` for a rational matrix `A`.
//!
//! The crate is `no_std` (it needs `alloc`) and every operation is a pure
//! function over immutable values. It is organised bottom-up:
//!
//! - [`linalg`]: rationals, Hermite-form lattices, polynomials and the
//!   orthogonal-conjugacy / finite-order classification of `A`.
//! - [`hnn`]: validated group data and Britton-reduced normal forms.
//! - [`bass_serre`]: balls of the Bass-Serre tree, the action of group
//!   elements on them, and stabilizer lattices.
//! - [`coarse`]: finite metric spaces, `s`-path components and separation
//!   analysis.
//! - [`cyclic`]: cyclic orders, deduction closure and the invariant-order
//!   solver.
#![no_std]

extern crate alloc;

pub mod bass_serre;
pub mod coarse;
pub mod cyclic;
pub mod hnn;
pub mod linalg;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// An integer vector in `Z^n`.
pub type ZVec = alloc::vec::Vec<BigInt>;

/// Builds a [`ZVec`] from machine integers.
pub fn zvec(entries: &[i64]) -> ZVec {
    entries.iter().map(|&e| BigInt::from(e)).collect()
}
