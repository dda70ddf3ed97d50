//! The composite two-prover accept operator, soundness-bound checks,
//! repetition/threshold amplification, and the gentle measurement check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{sep_maximize, Measurement, RepetitionSpec};
use crate::error::{Error, Result};
use crate::product_approx::OptimizerOptions;
use crate::tensor::{
    embed_on_sites, hermitian_part, permute_sites_operator, symmetric_projector,
    trace_product_of, DensityOperator, DimsProfile,
};
use crate::tol::{Budget, TOL_HERM};

/// The accept projector of the two-copy test for k sites of dimension d,
/// arranged as parties (A_1…A_k : B_1…B_k): the tensor product over j of the
/// symmetric projector on the pair A_jB_j.
pub fn product_test_projector(k: usize, d: usize, budget: Budget) -> Result<Measurement> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "the projector needs k >= 1 and d >= 1".into(),
        ));
    }
    let total = d.checked_pow(2 * k as u32).ok_or(Error::Budget {
        n: 2 * k,
        dim: usize::MAX,
        max_dim: budget.max_dim,
    })?;
    budget.check(2 * k, total)?;
    let dims = DimsProfile::uniform(d, 2 * k)?;
    let pair = symmetric_projector(d, 2)?;
    let mut projector = DMatrix::identity(total, total);
    for j in 0..k {
        projector *= embed_on_sites(pair.matrix(), &[j, k + j], &dims)?;
    }
    let dk = d.pow(k as u32);
    Measurement::new(projector, vec![dk, dk])
}

/// The accept operator of the two-prover composite protocol:
/// `E = Π (M_A ⊗ I_B) Π`, with Π the product-test projector on the k site
/// pairs and M Arthur's original k-party measurement. `0 <= E <= I` and on
/// honest product inputs `tr E (ψ⊗ψ) = tr M ψ`.
pub fn protocol2_operator(m: &Measurement, budget: Budget) -> Result<Measurement> {
    let Some(d) = m.dims().uniform_dim() else {
        return Err(Error::UnsupportedProfile(format!(
            "the composite operator needs uniform party dimensions, got {:?}",
            m.party_dims()
        )));
    };
    let k = m.parties();
    let projector = product_test_projector(k, d, budget)?;
    let dk = d.pow(k as u32);
    let m_a = m.matrix().kronecker(&DMatrix::identity(dk, dk));
    let e = projector.matrix() * m_a * projector.matrix();
    // The sandwich keeps 0 <= E <= I; hermitize away rounding asymmetry.
    Measurement::new(hermitian_part(&e), vec![dk, dk])
}

/// Soundness comparison of the composite operator against its bounds. The
/// seesaw values are certified one-sided bounds; `slack` absorbs their
/// certification gaps. Assertion failures are reported, not thrown.
#[derive(Debug, Clone)]
pub struct SoundnessReport {
    /// Separable value of the original measurement.
    pub s: f64,
    /// Separable value of the composite operator across the prover cut.
    pub s_prime: f64,
    /// `1 - (1-s)²/27`.
    pub bound_general: f64,
    /// `(3+s)/4`, stated for two-party measurements only.
    pub bound_two_party: Option<f64>,
    pub holds_general: bool,
    pub holds_two_party: Option<bool>,
    pub slack: f64,
}

/// Default slack for the soundness comparisons.
pub const SOUNDNESS_SLACK: f64 = 1e-5;

/// Computes s = sep value of `m` over its k parties, s′ = sep value of the
/// composite operator over the (A-block : B-block) structure, and checks
/// `s′ <= 1 - (1-s)²/27` plus, for k = 2, `s′ <= (3+s)/4`.
pub fn soundness_bound_check(
    m: &Measurement,
    opts: &OptimizerOptions,
    budget: Budget,
) -> Result<SoundnessReport> {
    let s = sep_maximize(m, opts)?.value;
    let composite = protocol2_operator(m, budget)?;
    let s_prime = sep_maximize(&composite, opts)?.value;
    let bound_general = 1.0 - (1.0 - s) * (1.0 - s) / 27.0;
    let bound_two_party = (m.parties() == 2).then(|| (3.0 + s) / 4.0);
    Ok(SoundnessReport {
        s,
        s_prime,
        bound_general,
        bound_two_party,
        holds_general: s_prime <= bound_general + SOUNDNESS_SLACK,
        holds_two_party: bound_two_party.map(|b| s_prime <= b + SOUNDNESS_SLACK),
        slack: SOUNDNESS_SLACK,
    })
}

/// `M^{⊗ℓ}` with the party structure regrouped by prover: party i keeps all ℓ
/// of its repetition slots together, so its dimension becomes `d_i^ℓ`.
/// Requires `spec.threshold == spec.ell` (plain repetition).
pub fn repeat_measurement(
    m: &Measurement,
    spec: &RepetitionSpec,
    budget: Budget,
) -> Result<Measurement> {
    if spec.threshold != spec.ell {
        return Err(Error::InvalidArgument(format!(
            "plain repetition needs threshold = ell, got {} and {}",
            spec.threshold, spec.ell
        )));
    }
    let ell = spec.ell;
    if ell == 1 {
        return Ok(m.clone());
    }
    check_repetition_budget(m, ell, budget)?;
    let mut power = m.matrix().clone();
    for _ in 1..ell {
        power = power.kronecker(m.matrix());
    }
    regroup_by_prover(power, m, ell)
}

/// Accept when at least `threshold` of the ℓ slots accept:
/// the sum over qualifying outcome patterns of the tensor products of M and
/// I−M, regrouped by prover. All slot factors commute, so the operator is a
/// well-defined effect. `threshold = ell` reproduces plain repetition,
/// `threshold = 0` the identity.
pub fn threshold_repeat(
    m: &Measurement,
    spec: &RepetitionSpec,
    budget: Budget,
) -> Result<Measurement> {
    let ell = spec.ell;
    if ell == 1 && spec.threshold <= 1 {
        if spec.threshold == 0 {
            return Measurement::identity(m.party_dims().to_vec());
        }
        return Ok(m.clone());
    }
    check_repetition_budget(m, ell, budget)?;
    let total = m.matrix().nrows();
    let reject = DMatrix::identity(total, total) - m.matrix();
    let mut sum: Option<DMatrix<Complex64>> = None;
    for pattern in 0..(1u64 << ell) {
        if (pattern.count_ones() as usize) < spec.threshold {
            continue;
        }
        let mut term = factor_for(pattern, 0, m.matrix(), &reject);
        for slot in 1..ell {
            term = term.kronecker(&factor_for(pattern, slot, m.matrix(), &reject));
        }
        sum = Some(match sum {
            Some(acc) => acc + term,
            None => term,
        });
    }
    let summed = sum.expect("threshold <= ell leaves at least one pattern");
    regroup_by_prover(summed, m, ell)
}

fn factor_for<'a>(
    pattern: u64,
    slot: usize,
    accept: &'a DMatrix<Complex64>,
    reject: &'a DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    if pattern >> slot & 1 == 1 {
        accept.clone()
    } else {
        reject.clone()
    }
}

fn check_repetition_budget(m: &Measurement, ell: usize, budget: Budget) -> Result<()> {
    let mut dim = 1usize;
    for _ in 0..ell {
        dim = dim
            .checked_mul(m.matrix().nrows())
            .ok_or(Error::Budget {
                n: m.parties() * ell,
                dim: usize::MAX,
                max_dim: budget.max_dim,
            })?;
    }
    budget.check(m.parties() * ell, dim)
}

/// Permutes the slot-major tensor power into prover-major order and merges
/// each prover's slots into one party of dimension `d_i^ell`.
fn regroup_by_prover(
    slot_major: DMatrix<Complex64>,
    m: &Measurement,
    ell: usize,
) -> Result<Measurement> {
    let k = m.parties();
    let mut site_dims = Vec::with_capacity(k * ell);
    for _ in 0..ell {
        site_dims.extend_from_slice(m.party_dims());
    }
    let dims = DimsProfile::new(site_dims)?;
    let new_order: Vec<usize> = (0..k)
        .flat_map(|p| (0..ell).map(move |s| s * k + p))
        .collect();
    let (regrouped, _) = permute_sites_operator(&slot_major, &dims, &new_order)?;
    let party_dims: Vec<usize> = m
        .party_dims()
        .iter()
        .map(|&d| d.pow(ell as u32))
        .collect();
    Measurement::new(regrouped, party_dims)
}

/// Gentle measurement check: `½‖ρ - XρX‖₁ <= √(1 - tr ρX)` for a projector X.
#[derive(Debug, Clone, Copy)]
pub struct GentleReport {
    /// `1 - tr ρX`.
    pub delta: f64,
    /// `½‖ρ - XρX‖₁`.
    pub distance: f64,
    pub holds: bool,
}

/// Verifies the displayed trace-norm inequality. `x` must be a projector
/// within `TOL_HERM`.
pub fn gentle_check(rho: &DensityOperator, x: &Measurement) -> Result<GentleReport> {
    let xm = x.matrix();
    if xm.nrows() != rho.matrix().nrows() {
        return Err(Error::DimensionMismatch(format!(
            "projector is {}x{}, state is {}x{}",
            xm.nrows(),
            xm.ncols(),
            rho.matrix().nrows(),
            rho.matrix().ncols()
        )));
    }
    let idempotency_defect = (xm * xm - xm)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if idempotency_defect > TOL_HERM {
        return Err(Error::NotProjector {
            defect: idempotency_defect,
        });
    }
    let delta = (1.0 - trace_product_of(rho.matrix(), xm)).max(0.0);
    let disturbed = xm * rho.matrix() * xm;
    let distance = 0.5 * trace_norm(&(rho.matrix() - disturbed));
    Ok(GentleReport {
        delta,
        distance,
        holds: distance <= delta.sqrt() + 1e-12,
    })
}

/// Trace norm of a Hermitian matrix: the sum of absolute eigenvalues.
fn trace_norm(matrix: &DMatrix<Complex64>) -> f64 {
    let eigen = nalgebra::SymmetricEigen::new(hermitian_part(matrix));
    eigen.eigenvalues.iter().map(|e| e.abs()).sum()
}

/// Eigenvalue range check used by tests on composite operators.
#[cfg(test)]
pub(crate) fn is_effect(matrix: &DMatrix<Complex64>) -> bool {
    use crate::tensor::min_eigenvalue;
    use crate::tol::TOL_PSD;
    let min = min_eigenvalue(matrix);
    let flipped = DMatrix::identity(matrix.nrows(), matrix.ncols()) - matrix;
    let max_ok = min_eigenvalue(&flipped) >= -TOL_PSD;
    min >= -TOL_PSD && max_ok
}
