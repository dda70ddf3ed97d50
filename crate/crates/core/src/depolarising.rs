//! The qudit depolarising channel, its n-fold output purity in direct and
//! closed subset-sum form, and the stability upper bound on the output purity
//! of near-product inputs.
//!
//! `delta` parameterizes retention: the channel keeps the input with
//! amplitude `delta` and replaces it with the maximally mixed state with
//! weight `1 - delta`, so the noise rate is `1 - delta`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{DensityOperator, SubsystemMask};

/// Parameters of the n-fold depolarising channel on qudits of dimension d.
///
/// `gamma = d δ² / (1 - δ²)` is the subset weight of the closed purity form;
/// it is stored at construction and is infinite at δ = 1, where the closed
/// form is singular while the direct form is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarisingParams {
    pub delta: f64,
    pub d: usize,
    pub n: usize,
    gamma: f64,
}

impl DepolarisingParams {
    pub fn new(delta: f64, d: usize, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in [0, 1], got {delta}"
            )));
        }
        if d == 0 || n == 0 {
            return Err(Error::InvalidArgument(
                "depolarising parameters need d >= 1 and n >= 1".into(),
            ));
        }
        let gamma = if delta < 1.0 {
            d as f64 * delta * delta / (1.0 - delta * delta)
        } else {
            f64::INFINITY
        };
        Ok(Self { delta, d, n, gamma })
    }

    /// The distinguished retention δ = 1/√(d+1) at which the weighted purity
    /// sum becomes the unweighted subset sum of the product test.
    pub fn product_test_point(d: usize, n: usize) -> Result<Self> {
        Self::new(1.0 / ((d as f64 + 1.0).sqrt()), d, n)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn check_profile(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dims().n() != self.n || rho.dims().uniform_dim() != Some(self.d) {
            return Err(Error::DimensionMismatch(format!(
                "channel expects {} sites of dimension {}, state has profile {:?}",
                self.n,
                self.d,
                rho.dims().local_dims()
            )));
        }
        Ok(())
    }
}

/// Applies the channel independently to every site:
/// each site maps as `ρ ↦ (1-δ)(tr ρ) I/d + δ ρ`. Trace is preserved and the
/// output stays positive semidefinite.
pub fn apply_depolarising(
    rho: &DensityOperator,
    params: &DepolarisingParams,
) -> Result<DensityOperator> {
    params.check_profile(rho)?;
    let dims = rho.dims().clone();
    let strides = dims.strides();
    let d = params.d;
    let delta = params.delta;
    let mut matrix = rho.matrix().clone();
    for site in 0..params.n {
        let stride = strides[site];
        let total = dims.total_dim();
        let mut next = DMatrix::zeros(total, total);
        for row in 0..total {
            let rdig = row / stride % d;
            let row_base = row - rdig * stride;
            for col in 0..total {
                let cdig = col / stride % d;
                let col_base = col - cdig * stride;
                let mut value = matrix[(row, col)] * delta;
                if rdig == cdig {
                    // (1-δ)/d times the site-trace of the current matrix.
                    let mut site_trace = Complex64::default();
                    for c in 0..d {
                        site_trace += matrix[(row_base + c * stride, col_base + c * stride)];
                    }
                    value += site_trace * ((1.0 - delta) / d as f64);
                }
                next[(row, col)] = value;
            }
        }
        matrix = next;
    }
    Ok(DensityOperator::new(matrix, dims)?)
}

/// Output purity by the closed subset-sum form
/// `((1-δ²)/d)^n Σ_S γ^{|S|} tr ρ_S²`, evaluated through marginal purities.
/// At δ = 1 the form is singular and the purity of `rho` itself is returned
/// (the channel is the identity there).
pub fn output_purity_closed(rho: &DensityOperator, params: &DepolarisingParams) -> Result<f64> {
    params.check_profile(rho)?;
    if params.delta >= 1.0 {
        return Ok(rho.purity());
    }
    let n = params.n;
    let gamma = params.gamma;
    let prefactor = ((1.0 - params.delta * params.delta) / params.d as f64).powi(n as i32);
    let mut sum = 0.0;
    for bits in 0..(1u64 << n) {
        let weight = gamma.powi(bits.count_ones() as i32);
        let purity = if bits == 0 {
            let trace = rho.matrix().trace().re;
            trace * trace
        } else {
            let keep = SubsystemMask::from_bits(bits, n);
            rho.partial_trace(&keep)?.purity()
        };
        sum += weight * purity;
    }
    Ok(prefactor * sum)
}

/// Output purity of any pure product input:
/// `((d-1)/d δ² + 1/d)^n`, the maximum over all inputs.
pub fn pprod(params: &DepolarisingParams) -> f64 {
    let d = params.d as f64;
    ((d - 1.0) / d * params.delta * params.delta + 1.0 / d).powi(params.n as i32)
}

/// Upper bound on the output purity of a pure input at closest-product
/// distance ε:
///
/// `Pprod(δ) (1 - 4ε(1-ε) A + 4 ε^{3/2} B²)` with
/// `A = dδ²(1-δ²)/(1+(d-1)δ²)²` and `B = ((1-δ²)² + d²δ⁴)/(1+(d-1)δ²)²`.
///
/// At δ = 1/√(d+1) the bound reduces to `Pprod · (1 - ε + ε² + ε^{3/2})`.
pub fn stability_upper_bound(eps: f64, params: &DepolarisingParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in [0, 1], got {eps}"
        )));
    }
    let d = params.d as f64;
    let d2 = params.delta * params.delta;
    let denom = 1.0 + (d - 1.0) * d2;
    let a = d * d2 * (1.0 - d2) / (denom * denom);
    let b = ((1.0 - d2) * (1.0 - d2) + d * d * d2 * d2) / (denom * denom);
    let correction = 1.0 - 4.0 * eps * (1.0 - eps) * a + 4.0 * eps.powf(1.5) * b * b;
    Ok(pprod(params) * correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_test::ptest_exact;
    use crate::tensor::{haar_state, DimsProfile, PureState};
    use crate::tol::Budget;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn bell() -> PureState {
        let dims = DimsProfile::uniform(2, 2).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = DVector::zeros(4);
        amps[0] = Complex64::new(inv, 0.0);
        amps[3] = Complex64::new(inv, 0.0);
        PureState::new(amps, dims).unwrap()
    }

    #[test]
    fn delta_one_is_identity() {
        let rho = bell().projector();
        let params = DepolarisingParams::new(1.0, 2, 2).unwrap();
        let out = apply_depolarising(&rho, &params).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-14);
    }

    #[test]
    fn delta_zero_is_maximally_mixed() {
        let rho = bell().projector();
        let params = DepolarisingParams::new(0.0, 2, 2).unwrap();
        let out = apply_depolarising(&rho, &params).unwrap();
        let mixed = DensityOperator::maximally_mixed(rho.dims().clone());
        assert!((out.matrix() - mixed.matrix()).norm() < 1e-14);
    }

    #[test]
    fn trace_preserved_at_any_delta() {
        let rho = bell().projector();
        for &delta in &[0.1, 0.35, 0.7, 0.95] {
            let params = DepolarisingParams::new(delta, 2, 2).unwrap();
            let out = apply_depolarising(&rho, &params).unwrap();
            assert_abs_diff_eq!(out.matrix().trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_direct_application() {
        let mut case = 0u64;
        for d in [2usize, 3] {
            for n in [1usize, 2, 3] {
                if d == 3 && n == 3 {
                    continue;
                }
                for step in 1..=5 {
                    let delta = step as f64 * 0.18;
                    let dims = DimsProfile::uniform(d, n).unwrap();
                    let psi = haar_state(&dims, 100 + case);
                    case += 1;
                    let rho = psi.projector();
                    let params = DepolarisingParams::new(delta, d, n).unwrap();
                    let direct = apply_depolarising(&rho, &params).unwrap().purity();
                    let closed = output_purity_closed(&rho, &params).unwrap();
                    assert_abs_diff_eq!(direct, closed, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn product_input_attains_pprod() {
        let dims = DimsProfile::uniform(2, 3).unwrap();
        let psi = PureState::basis_state(dims, &[0, 1, 0]).unwrap();
        let params = DepolarisingParams::new(0.6, 2, 3).unwrap();
        let direct = apply_depolarising(&psi.projector(), &params)
            .unwrap()
            .purity();
        assert_abs_diff_eq!(direct, pprod(&params), epsilon = 1e-12);
    }

    #[test]
    fn pprod_examples() {
        let p1 = DepolarisingParams::new(1.0, 3, 2).unwrap();
        assert_abs_diff_eq!(pprod(&p1), 1.0, epsilon = 1e-15);
        let p0 = DepolarisingParams::new(0.0, 2, 3).unwrap();
        assert_abs_diff_eq!(pprod(&p0), 1.0 / 8.0, epsilon = 1e-15);
        let p = DepolarisingParams::new(1.0 / 3f64.sqrt(), 2, 2).unwrap();
        assert_abs_diff_eq!(pprod(&p), 4.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn product_test_point_reduces_to_subset_sum() {
        let params = DepolarisingParams::product_test_point(2, 2).unwrap();
        let rho = bell().projector();
        let closed = output_purity_closed(&rho, &params).unwrap();
        let exact = ptest_exact(&rho, Budget::default()).unwrap().value;
        let scale = (3.0f64 / 2.0).powi(2);
        assert_abs_diff_eq!(scale * closed, exact, epsilon = 1e-12);
    }

    #[test]
    fn stability_bound_at_eps_zero_is_pprod() {
        let params = DepolarisingParams::new(0.4, 3, 2).unwrap();
        assert_abs_diff_eq!(
            stability_upper_bound(0.0, &params).unwrap(),
            pprod(&params),
            epsilon = 1e-15
        );
    }

    #[test]
    fn stability_bound_special_point_reduction() {
        // At δ = 1/√(d+1) the correction factor is 1 - ε + ε² + ε^{3/2}.
        for d in [2usize, 3] {
            let params = DepolarisingParams::product_test_point(d, 2).unwrap();
            for step in 0..=10 {
                let eps = step as f64 * 0.1;
                let bound = stability_upper_bound(eps, &params).unwrap();
                let reduced =
                    pprod(&params) * (1.0 - eps + eps * eps + eps.powf(1.5));
                assert_abs_diff_eq!(bound, reduced, epsilon = 1e-12);
            }
        }
        let params = DepolarisingParams::new(1.0 / 3f64.sqrt(), 2, 2).unwrap();
        let bound = stability_upper_bound(0.25, &params).unwrap();
        assert_abs_diff_eq!(bound, pprod(&params) * 0.9375, epsilon = 1e-12);
    }

    #[test]
    fn haar_states_respect_maximality() {
        let params = DepolarisingParams::new(0.55, 2, 3).unwrap();
        for seed in 0..10 {
            let dims = DimsProfile::uniform(2, 3).unwrap();
            let psi = haar_state(&dims, 300 + seed);
            let purity = apply_depolarising(&psi.projector(), &params)
                .unwrap()
                .purity();
            assert!(purity <= pprod(&params) + 1e-12);
        }
    }

    #[test]
    fn profile_mismatch_rejected() {
        let rho = bell().projector();
        let params = DepolarisingParams::new(0.5, 3, 2).unwrap();
        assert!(matches!(
            apply_depolarising(&rho, &params),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
