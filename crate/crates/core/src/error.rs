use thiserror::Error;

/// Errors raised by construction, conversion and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{op} requires dimension {required}, got {found}")]
    UnsupportedDimension {
        op: &'static str,
        required: &'static str,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("malformed polygon: {0}")]
    MalformedPolygon(String),

    #[error("not a dependency set: marginal values {marginals:?} (expected all 1)")]
    NotDependency { marginals: Vec<f64> },

    #[error("negative spectral mass {mass} at atom {atom:?}")]
    NegativeMass { atom: Vec<f64>, mass: f64 },

    #[error("inconsistent extremal coefficients: weight of subset {subset:?} is {weight}")]
    Inconsistent { subset: Vec<usize>, weight: f64 },

    #[error("evaluation budget exceeded: {needed} evaluations needed, limit {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("no exceedances of threshold {threshold}; lower the threshold")]
    NoExceedances { threshold: f64 },

    #[error("exponent density unavailable for a discrete spectral model (density is singular); use the atoms directly")]
    DensityUnavailable,

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
