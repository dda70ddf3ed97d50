//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by state/operator construction and library operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem mask references index {index} but the profile has {n} subsystems")]
    InvalidMask { index: usize, n: usize },

    #[error("cut must be a proper nonempty subset of the subsystems ({0})")]
    InvalidCut(String),

    #[error("target dims must dominate the source dims componentwise ({0})")]
    InvalidTarget(String),

    #[error("malformed partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource budget exceeded: n = {n}, required dimension {dim} > budget {max_dim}")]
    Budget { n: usize, dim: usize, max_dim: usize },

    #[error("unsupported dimension profile: {0}")]
    UnsupportedProfile(String),

    #[error("vector is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian: max asymmetry {defect}")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig}")]
    NotPsd { min_eig: f64 },

    #[error("matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("matrix is not unitary: max defect {defect}")]
    NotUnitary { defect: f64 },

    #[error("operator is not an effect (0 <= M <= I): eigenvalue {eig} out of range")]
    NotEffect { eig: f64 },

    #[error("Kraus operators are trace increasing: max eigenvalue of sum N_i^dag N_i is {eig}")]
    TraceIncreasing { eig: f64 },

    #[error("operator is not a projector: max defect {defect}")]
    NotProjector { defect: f64 },

    #[error("residual is degenerate: the ansatz overlap is 1")]
    DegenerateResidual,
}

pub type Result<T> = std::result::Result<T, Error>;
