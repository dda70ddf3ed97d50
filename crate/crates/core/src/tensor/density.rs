//! Density operators and reduced states.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{DimsProfile, SubsystemMask};
use crate::error::{Error, Result};
use crate::tol::{TOL_HERM, TOL_NORM, TOL_PSD};

/// Hermitian, positive-semidefinite, unit-trace matrix over a dimension
/// profile. PSD is checked against the floor `-TOL_PSD` because inputs arrive
/// from floating-point channel applications.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
    dims: DimsProfile,
}

impl DensityOperator {
    /// Validates Hermiticity, the PSD floor, and unit trace.
    pub fn new(matrix: DMatrix<Complex64>, dims: DimsProfile) -> Result<Self> {
        let d = dims.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for total dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > TOL_HERM {
            return Err(Error::NotHermitian { defect });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL_NORM || trace.im.abs() > TOL_NORM {
            return Err(Error::BadTrace { trace: trace.re });
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -TOL_PSD {
            return Err(Error::NotPsd { min_eig });
        }
        Ok(Self { matrix, dims })
    }

    /// Skips validation; for internal constructions that are valid by
    /// construction (projectors of normalized states, partial traces).
    pub(crate) fn new_unchecked(matrix: DMatrix<Complex64>, dims: DimsProfile) -> Self {
        Self { matrix, dims }
    }

    /// The maximally mixed state I/D.
    pub fn maximally_mixed(dims: DimsProfile) -> Self {
        let d = dims.total_dim();
        let m = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        Self { matrix: m, dims }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dims(&self) -> &DimsProfile {
        &self.dims
    }

    /// tr ρ², a real number in [1/D, 1] for unit-trace ρ.
    pub fn purity(&self) -> f64 {
        purity_of(&self.matrix)
    }

    /// The reduced operator on the kept subsystems, in ascending index order.
    /// Keeping every subsystem returns a copy of the input.
    pub fn partial_trace(&self, keep: &SubsystemMask) -> Result<DensityOperator> {
        if keep.n() != self.dims.n() {
            return Err(Error::InvalidMask {
                index: keep.n().saturating_sub(1),
                n: self.dims.n(),
            });
        }
        if keep.is_full() {
            return Ok(self.clone());
        }
        if keep.is_empty() {
            return Err(Error::InvalidMask {
                index: 0,
                n: self.dims.n(),
            });
        }
        let kept = keep.members();
        let traced = keep.complement();
        let traced = traced.members();
        let strides = self.dims.strides();

        let kept_dims = self.dims.select(kept)?;
        let traced_dims: Vec<usize> = traced.iter().map(|&s| self.dims.dim(s)).collect();
        let traced_total: usize = traced_dims.iter().product();
        let kd = kept_dims.total_dim();

        // Flat offset of each kept/traced digit assignment.
        let offset = |digit_sets: &DimsProfile, sites: &[usize], s: usize| -> usize {
            digit_sets
                .digits(s)
                .iter()
                .zip(sites)
                .map(|(&digit, &site)| digit * strides[site])
                .sum()
        };
        let kept_offsets: Vec<usize> = (0..kd).map(|s| offset(&kept_dims, kept, s)).collect();
        let traced_offsets: Vec<usize> = (0..traced_total)
            .map(|t| {
                let mut rem = t;
                let mut acc = 0usize;
                for i in (0..traced.len()).rev() {
                    acc += (rem % traced_dims[i]) * strides[traced[i]];
                    rem /= traced_dims[i];
                }
                acc
            })
            .collect();

        let mut out = DMatrix::zeros(kd, kd);
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = Complex64::default();
                for &to in &traced_offsets {
                    acc += self.matrix[(ro + to, co + to)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityOperator {
            matrix: out,
            dims: kept_dims,
        })
    }
}

/// tr ρ² for a Hermitian matrix: the squared Frobenius norm.
pub fn purity_of(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().map(|z| z.norm_sqr()).sum()
}

/// Re tr(AB) for Hermitian A, B (the product trace is real).
pub fn trace_product_of(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            // tr(AB) = sum_ij A_ij B_ji; B_ji = conj(B_ij) for Hermitian B.
            acc += (a[(i, j)] * b[(i, j)].conj()).re;
        }
    }
    acc
}

pub fn hermiticity_defect(matrix: &DMatrix<Complex64>) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..matrix.nrows() {
        for j in i..matrix.ncols() {
            defect = defect.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Smallest eigenvalue of a Hermitian matrix (the Hermitian part is taken
/// first to suppress floating-point asymmetry).
pub fn min_eigenvalue(matrix: &DMatrix<Complex64>) -> f64 {
    let eigen = SymmetricEigen::new(hermitian_part(matrix));
    eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(matrix: &DMatrix<Complex64>) -> f64 {
    let eigen = SymmetricEigen::new(hermitian_part(matrix));
    eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn hermitian_part(matrix: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (matrix + matrix.adjoint()).unscale(2.0)
}
