//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulator operations.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("site index {site} out of range for chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("unsupported local dimension {0} (expected 2 or 3)")]
    UnsupportedLocalDim(usize),

    #[error("operator is not Hermitian (max |M - M^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max |U^dag U - 1| = {0:.3e})")]
    NotUnitary(f64),

    #[error("eigenphase {phase:.6} too close to the principal branch cut (margin {margin:.3})")]
    BranchCut { phase: f64, margin: f64 },

    #[error("state norm drifted to {norm:.12} (tolerance {tol:.1e})")]
    NormDrift { norm: f64, tol: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("argument {0} outside supported range |x| < {1}")]
    OutOfRange(f64, f64),

    #[error("root not bracketed in [{0}, {1}]")]
    RootNotBracketed(f64, f64),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("layer tag {0} is not valid here")]
    InvalidLayer(String),

    #[error("no feasible digital protocol: every table entry exceeds the step budget {0}")]
    NoFeasibleProtocol(usize),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
