//! Crate-wide error type.

use thiserror::Error;

/// Description of a denominator factor that is numerically too close to a
/// zero of the theta function to divide by safely.
#[derive(Debug, Clone)]
pub struct PoleInfo {
    /// Which evaluation hit the pole, e.g. `"cn_term lambda=(2,1) denominator (aq/b;q,x)_lambda"`.
    pub site: String,
    /// Index of the offending factor within the product (0-based).
    pub index: i64,
    /// `|E(y)|` of the offending factor divided by its natural scale.
    pub ratio: f64,
}

impl std::fmt::Display for PoleInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}, factor {}: |E|/scale = {:.3e} below pole threshold",
            self.site, self.index, self.ratio
        )
    }
}

/// Errors produced by evaluation, sampling and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid mathematical input (zero argument, |p| >= 1, bad partition, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor fell below the pole threshold.
    #[error("near pole: {0}")]
    Pole(PoleInfo),

    /// The modular/base parameters themselves are degenerate (e.g. E(q) = 0).
    #[error("degenerate base: {0}")]
    DegenerateBase(String),

    /// Random sampling could not produce an admissible parameter set.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// Malformed user input: CLI arguments, parameter files, option values.
    #[error("invalid parameters: {0}")]
    Params(String),

    /// Filesystem / serialization problems in the CLI layer.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn pole(site: impl Into<String>, index: i64, ratio: f64) -> Self {
        Error::Pole(PoleInfo {
            site: site.into(),
            index,
            ratio,
        })
    }

    /// True for errors that a verification driver should respond to by
    /// drawing a fresh parameter sample rather than aborting.
    pub fn is_resamplable(&self) -> bool {
        matches!(self, Error::Pole(_) | Error::DegenerateBase(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
