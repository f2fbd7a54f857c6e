//! Shared fixtures for the integration tests.

// each test target uses a different slice of this module
#![allow(dead_code)]

pub mod naive;

use ehs::numerics::{BigComplex, PrecisionContext};

pub fn ctx(digits: usize) -> PrecisionContext {
    PrecisionContext::new(digits).unwrap()
}

pub fn bc(re: f64, im: f64, c: &PrecisionContext) -> BigComplex {
    BigComplex::from_f64s(re, im, c)
}

/// `max_rel_err` strings from reports ("0", "5.42807e-46") as comparable
/// floats.
pub fn parse_err(s: &str) -> f64 {
    s.parse::<f64>().unwrap_or(f64::INFINITY)
}
