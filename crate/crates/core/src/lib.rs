//! Arbitrary-precision evaluation and verification of elliptic
//! hypergeometric summation identities.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`] — precision context, complex arithmetic, formatting;
//! * [`theta`] — the theta building block `E(x)` and elliptic numbers;
//! * [`partitions`] — partitions in an `n x N` box;
//! * [`pochhammer`] — theta shifted factorials, single and partition-indexed;
//! * [`series`] — the terminating series and closed forms on both sides of
//!   the identities (Jackson sums, the multivariable `C_n` sum, Warnaar-type
//!   sums, the Bailey transformation, duality factors);
//! * [`verify`] — randomized identity verification with balanced parameter
//!   sampling and JSON reports;
//! * [`cli`] — the `ehs` command-line interface.

// Negated float comparisons like `!(err < tol)` are deliberate: they treat
// NaN as a failure, whereas the `>=` form clippy suggests would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod numerics;
pub mod partitions;
pub mod pochhammer;
pub mod series;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
