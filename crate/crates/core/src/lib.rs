//! Equivariant Euler characteristics of `A_{n,i}^a ⊗ B_{n,j}^{n-a}` on the
//! permutohedral variety `X_n`, as exact Laurent polynomials in
//! `t_1, ..., t_{n+1}`.
//!
//! Three independent routes compute the same polynomial:
//!
//! * [`lattice`] counts characters of global sections of Serre-dual divisors,
//! * [`localization`] sums fixed-point contributions over `S_{n+1}`,
//! * [`recursion`] restricts to a boundary divisor and recurses on smaller
//!   permutohedral factors.
//!
//! [`verify`] cross-checks them and runs the invariant suites.

pub mod algebra;
pub mod error;
pub mod lattice;
pub mod localization;
pub mod recursion;
pub mod verify;

pub use algebra::{ExponentVec, LaurentPoly};
pub use error::{DivisionError, Error, Result};
