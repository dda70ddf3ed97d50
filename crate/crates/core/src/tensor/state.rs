//! Pure states as dense amplitude vectors over a dimension profile.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::DimsProfile;
use crate::error::{Error, Result};
use crate::tol::TOL_NORM;

/// A normalized complex amplitude vector over a list of local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
    dims: DimsProfile,
}

impl PureState {
    /// Builds a state, checking length and unit norm (within `TOL_NORM`).
    pub fn new(amplitudes: DVector<Complex64>, dims: DimsProfile) -> Result<Self> {
        if amplitudes.len() != dims.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                dims.total_dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes and builds; errors only on a zero vector or length mismatch.
    pub fn normalized(amplitudes: DVector<Complex64>, dims: DimsProfile) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    /// The computational basis state with the given per-site digits.
    pub fn basis_state(dims: DimsProfile, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} subsystems",
                digits.len(),
                dims.n()
            )));
        }
        for (i, &x) in digits.iter().enumerate() {
            if x >= dims.dim(i) {
                return Err(Error::InvalidArgument(format!(
                    "digit {x} out of range for site {i} of dimension {}",
                    dims.dim(i)
                )));
            }
        }
        let mut amplitudes = DVector::zeros(dims.total_dim());
        amplitudes[dims.index(digits)] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, dims })
    }

    /// Product state from per-site local vectors (each normalized on entry).
    pub fn product(locals: &[DVector<Complex64>]) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::InvalidArgument("no local factors".into()));
        }
        let dims = DimsProfile::new(locals.iter().map(|v| v.len()).collect())?;
        let mut amplitudes = DVector::from_element(1, Complex64::new(1.0, 0.0));
        for local in locals {
            amplitudes = amplitudes.kronecker(local);
        }
        Self::new(amplitudes, dims)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &DimsProfile {
        &self.dims
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(
                "inner product between different profiles".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// The projector |ψ⟩⟨ψ| as a density operator.
    pub fn projector(&self) -> super::DensityOperator {
        let d = self.amplitudes.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        super::DensityOperator::new_unchecked(m, self.dims.clone())
    }

    /// Tensor product; the profiles concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims: self.dims.concat(&other.dims),
        }
    }

    /// Embeds each site into a larger local dimension, copying amplitudes onto
    /// the low-index basis states of the enlarged sites. Norm, product-test
    /// value and closest-product overlap are unchanged.
    pub fn embed_pad(&self, target: &DimsProfile) -> Result<Self> {
        if target.n() != self.dims.n() {
            return Err(Error::InvalidTarget(format!(
                "target has {} subsystems, source has {}",
                target.n(),
                self.dims.n()
            )));
        }
        for i in 0..self.dims.n() {
            if target.dim(i) < self.dims.dim(i) {
                return Err(Error::InvalidTarget(format!(
                    "site {i}: target dimension {} < source dimension {}",
                    target.dim(i),
                    self.dims.dim(i)
                )));
            }
        }
        let mut amplitudes = DVector::zeros(target.total_dim());
        for idx in 0..self.dims.total_dim() {
            let digits = self.dims.digits(idx);
            amplitudes[target.index(&digits)] = self.amplitudes[idx];
        }
        Ok(Self {
            amplitudes,
            dims: target.clone(),
        })
    }
}

/// Fidelity and trace distance between two pure states:
/// `F = |⟨ψ|φ⟩|²` and `T = ½‖ψψ† - φφ†‖₁ = √(1-F)`.
///
/// For any projector P, `|⟨ψ|P|ψ⟩ - ⟨φ|P|φ⟩| <= T`.
pub fn fidelity_trace_distance(psi: &PureState, phi: &PureState) -> Result<(f64, f64)> {
    let overlap = psi.inner(phi)?;
    let fidelity = overlap.norm_sqr().min(1.0);
    Ok((fidelity, (1.0 - fidelity).sqrt()))
}

/// Applies an operator acting on the listed sites (in the listed order) to a
/// raw amplitude vector. The operator must be square with dimension equal to
/// the product of the listed sites' local dimensions. The result is not
/// renormalized, so projections shrink the norm.
pub fn apply_on_sites(
    vec: &DVector<Complex64>,
    dims: &DimsProfile,
    op: &DMatrix<Complex64>,
    sites: &[usize],
) -> Result<DVector<Complex64>> {
    let sub = dims.select(sites)?;
    let sub_dim = sub.total_dim();
    if op.nrows() != sub_dim || op.ncols() != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but the selected sites span dimension {}",
            op.nrows(),
            op.ncols(),
            sub_dim
        )));
    }
    if vec.len() != dims.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs total dimension {}",
            vec.len(),
            dims.total_dim()
        )));
    }
    let strides = dims.strides();
    // Flat offsets of every digit assignment of the target sites.
    let mut offsets = vec![0usize; sub_dim];
    for (s, offset) in offsets.iter_mut().enumerate() {
        let digits = sub.digits(s);
        *offset = digits
            .iter()
            .zip(sites)
            .map(|(&digit, &site)| digit * strides[site])
            .sum();
    }
    // Enumerate assignments of the remaining sites.
    let rest: Vec<usize> = (0..dims.n()).filter(|s| !sites.contains(s)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&s| dims.dim(s)).collect();
    let rest_total: usize = rest_dims.iter().product();
    let mut out = DVector::zeros(vec.len());
    let mut gathered = vec![Complex64::default(); sub_dim];
    for r in 0..rest_total {
        let mut base = 0usize;
        let mut rem = r;
        for i in (0..rest.len()).rev() {
            base += (rem % rest_dims[i]) * strides[rest[i]];
            rem /= rest_dims[i];
        }
        for (s, g) in gathered.iter_mut().enumerate() {
            *g = vec[base + offsets[s]];
        }
        for row in 0..sub_dim {
            let mut acc = Complex64::default();
            for (col, &g) in gathered.iter().enumerate() {
                acc += op[(row, col)] * g;
            }
            out[base + offsets[row]] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> PureState {
        let dims = DimsProfile::uniform(2, 2).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let amps = DVector::from_vec(vec![
            Complex64::new(inv, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(inv, 0.0),
        ]);
        PureState::new(amps, dims).unwrap()
    }

    #[test]
    fn rejects_unnormalized() {
        let dims = DimsProfile::uniform(2, 1).unwrap();
        let amps = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(amps, dims),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let psi = bell();
        let (f, t) = fidelity_trace_distance(&psi, &psi).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t, 0.0, epsilon = 1e-12);

        let dims = DimsProfile::uniform(2, 2).unwrap();
        let zero = PureState::basis_state(dims.clone(), &[0, 0]).unwrap();
        let one = PureState::basis_state(dims, &[1, 1]).unwrap();
        let (f, t) = fidelity_trace_distance(&zero, &one).unwrap();
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_three_quarters_gives_half_distance() {
        // F = 0.75 forces T = 0.5
        let dims = DimsProfile::uniform(2, 1).unwrap();
        let a = PureState::basis_state(dims.clone(), &[0]).unwrap();
        let amps = DVector::from_vec(vec![
            Complex64::new(0.75f64.sqrt(), 0.0),
            Complex64::new(0.25f64.sqrt(), 0.0),
        ]);
        let b = PureState::new(amps, dims).unwrap();
        let (f, t) = fidelity_trace_distance(&a, &b).unwrap();
        assert_abs_diff_eq!(f, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(t, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pad_preserves_amplitude_layout() {
        let psi = bell();
        let target = DimsProfile::uniform(3, 2).unwrap();
        let padded = psi.embed_pad(&target).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(padded.amplitudes()[0].re, inv, epsilon = 1e-15);
        assert_abs_diff_eq!(padded.amplitudes()[4].re, inv, epsilon = 1e-15);
        assert_abs_diff_eq!(padded.amplitudes().norm(), 1.0, epsilon = 1e-12);
        // nonzero amplitudes only on indices {0,1} per site
        for idx in 0..9 {
            let digits = target.digits(idx);
            if digits.iter().any(|&x| x == 2) {
                assert_eq!(padded.amplitudes()[idx], Complex64::default());
            }
        }
    }

    #[test]
    fn pad_to_identical_dims_is_identity() {
        let psi = bell();
        let padded = psi.embed_pad(psi.dims()).unwrap();
        assert_eq!(padded, psi);
    }

    #[test]
    fn pad_rejects_shrinking() {
        let psi = bell();
        let target = DimsProfile::new(vec![2, 1]).unwrap();
        assert!(matches!(
            psi.embed_pad(&target),
            Err(Error::InvalidTarget(_))
        ));
    }

    #[test]
    fn apply_on_sites_matches_kron_action() {
        // X on site 1 of |00⟩ gives |01⟩
        let dims = DimsProfile::uniform(2, 2).unwrap();
        let zero = PureState::basis_state(dims.clone(), &[0, 0]).unwrap();
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::default(),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
            ],
        );
        let out = apply_on_sites(zero.amplitudes(), &dims, &x, &[1]).unwrap();
        assert_abs_diff_eq!(out[1].re, 1.0, epsilon = 1e-15);
    }
}
