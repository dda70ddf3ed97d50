//! Numerical tolerances used by validation and tests.
//!
//! All values leave double-precision headroom above the O(D²) rounding
//! accumulated by dense channel applications and subset sums.

/// Unit-norm / unit-trace tolerance.
pub const TOL_NORM: f64 = 1e-9;

/// Hermiticity and projector/unitarity defect tolerance.
pub const TOL_HERM: f64 = 1e-9;

/// Eigenvalue floor for positive-semidefiniteness checks. Inputs arrive from
/// floating-point channel applications, so exact nonnegativity is too strict.
pub const TOL_PSD: f64 = 1e-8;

/// Schmidt reconstruction tolerance.
pub const TOL_RECON: f64 = 1e-8;

/// Default cap on the largest dense dimension an exact operation may build.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Budget for operations that materialize dense vectors or matrices.
///
/// Exact subset sums, k-copy projections and Choi states all scale
/// exponentially; the budget keeps them desk-sized unless raised explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_dim: usize,
}

impl Budget {
    pub fn new(max_dim: usize) -> Self {
        Self { max_dim }
    }

    /// Errors when `dim` exceeds the budget, naming the subsystem count.
    pub fn check(&self, n: usize, dim: usize) -> crate::error::Result<()> {
        if dim > self.max_dim {
            Err(crate::error::Error::Budget {
                n,
                dim,
                max_dim: self.max_dim,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}
