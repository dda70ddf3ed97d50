//! The product test for unitaries: Choi vectors, normalized Hilbert-Schmidt
//! geometry, and nearest-product-unitary extraction by polar decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::product_approx::{closest_product, OptimizerOptions, ProductAnsatz};
use crate::product_test::{ptest_exact, BoundsWindow, TestReport, HIGH_EPS_CAP};
use crate::tensor::DimsProfile;
use crate::tol::{Budget, TOL_HERM};

/// A unitary on n qudits of local dimension d; `U†U = I` within `TOL_HERM`.
#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    matrix: DMatrix<Complex64>,
    d: usize,
    n: usize,
}

impl UnitaryOperator {
    pub fn new(matrix: DMatrix<Complex64>, d: usize, n: usize) -> Result<Self> {
        let total = d.checked_pow(n as u32).ok_or(Error::Budget {
            n,
            dim: usize::MAX,
            max_dim: usize::MAX,
        })?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for {} sites of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                n,
                d
            )));
        }
        let defect = (matrix.adjoint() * &matrix - DMatrix::identity(total, total))
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if defect > TOL_HERM {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix, d, n })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.n
    }
}

/// The Choi vector `v(M) = (M ⊗ I)|Φ⟩^{⊗n}` laid out over n sites of
/// dimension d², with site i carrying the (output, input) digit pair of
/// qudit i. Component identity: `⟨j|⟨k|v(M)⟩ = ⟨j|M|k⟩ / √(dⁿ)`, so inner
/// products of Choi vectors reproduce the normalized Hilbert-Schmidt inner
/// product. The vector is normalized exactly when `tr M†M / dⁿ = 1`.
#[derive(Debug, Clone)]
pub struct ChoiVector {
    vector: DVector<Complex64>,
    d: usize,
    n: usize,
}

impl ChoiVector {
    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }

    /// (d, n) of the source operator.
    pub fn source_dims(&self) -> (usize, usize) {
        (self.d, self.n)
    }

    /// The profile of n sites of dimension d².
    pub fn dims(&self) -> DimsProfile {
        DimsProfile::uniform(self.d * self.d, self.n).expect("valid profile")
    }

    /// ⟨v(self)|v(other)⟩ = ⟨M, N⟩.
    pub fn inner(&self, other: &ChoiVector) -> Result<Complex64> {
        if self.vector.len() != other.vector.len() {
            return Err(Error::DimensionMismatch(
                "Choi vectors of different dimension".into(),
            ));
        }
        Ok(self.vector.dotc(&other.vector))
    }

    /// As a validated pure state; errors when the source was not
    /// HS-normalized.
    pub fn state(&self) -> Result<crate::tensor::PureState> {
        crate::tensor::PureState::new(self.vector.clone(), self.dims())
    }
}

/// Builds the Choi vector of a dⁿ×dⁿ matrix.
pub fn choi_vector(m: &DMatrix<Complex64>, d: usize, n: usize) -> Result<ChoiVector> {
    let total = d.checked_pow(n as u32).ok_or(Error::Budget {
        n,
        dim: usize::MAX,
        max_dim: usize::MAX,
    })?;
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {} sites of dimension {}",
            m.nrows(),
            m.ncols(),
            n,
            d
        )));
    }
    let site_dims = DimsProfile::uniform(d, n).expect("valid profile");
    let pair_dims = DimsProfile::uniform(d * d, n).expect("valid profile");
    let scale = 1.0 / (total as f64).sqrt();
    let mut vector = DVector::zeros(total * total);
    for row in 0..total {
        let j = site_dims.digits(row);
        for col in 0..total {
            let k = site_dims.digits(col);
            let digits: Vec<usize> = (0..n).map(|i| j[i] * d + k[i]).collect();
            vector[pair_dims.index(&digits)] = m[(row, col)] * scale;
        }
    }
    Ok(ChoiVector { vector, d, n })
}

/// Normalized Hilbert-Schmidt inner product `⟨M, N⟩ = tr(M†N) / dim`.
/// `|⟨U, V⟩| <= 1` for unitaries.
pub fn hs_inner(m: &DMatrix<Complex64>, n: &DMatrix<Complex64>) -> Result<Complex64> {
    if m.nrows() != m.ncols() || m.shape() != n.shape() {
        return Err(Error::DimensionMismatch(format!(
            "hs inner product needs equal square shapes, got {:?} and {:?}",
            m.shape(),
            n.shape()
        )));
    }
    let mut acc = Complex64::default();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += m[(i, j)].conj() * n[(i, j)];
        }
    }
    Ok(acc / m.nrows() as f64)
}

/// Passing probability of the product test applied to two copies of the Choi
/// state `|v(U)⟩`, with respect to the partition into n d²-dimensional sites.
pub fn unitary_ptest(u: &UnitaryOperator, budget: Budget) -> Result<TestReport> {
    let choi_dim = u
        .matrix
        .nrows()
        .checked_mul(u.matrix.nrows())
        .ok_or(Error::Budget {
            n: u.n,
            dim: usize::MAX,
            max_dim: budget.max_dim,
        })?;
    budget.check(u.n, choi_dim)?;
    let psi = choi_vector(&u.matrix, u.d, u.n)?.state()?;
    ptest_exact(&psi.projector(), budget)
}

/// Certified distances of a unitary from product operators and product
/// unitaries.
///
/// `eps_operator` is 1 minus the squared overlap with the best unit-HS-norm
/// product operator found; `eps_unitary` is certified from below by the
/// extracted polar factors, so no exactness is claimed beyond the candidate
/// pair. When `eps_operator <= 1/2` the extraction guarantees
/// `|⟨U, ⊗V_i⟩|² >= (1 - 2 eps_operator)²`.
#[derive(Debug, Clone)]
pub struct OperatorOverlapReport {
    pub eps_operator: f64,
    pub eps_unitary: f64,
    /// ⟨U, V_1⊗…⊗V_n⟩ of the certified pair.
    pub hs_value: Complex64,
    /// Set when some local operator was numerically singular and its polar
    /// factor was completed through the SVD basis pairing.
    pub flagged_singular: bool,
}

/// Nearest product unitary: optimizes the closest product state of `v(U)`,
/// reads off local operators `A_i` of unit HS norm, and takes their unitary
/// polar factors `V_i`.
pub fn closest_product_unitary(
    u: &UnitaryOperator,
    opts: &OptimizerOptions,
    budget: Budget,
) -> Result<(Vec<DMatrix<Complex64>>, OperatorOverlapReport)> {
    let choi_dim = u
        .matrix
        .nrows()
        .checked_mul(u.matrix.nrows())
        .ok_or(Error::Budget {
            n: u.n,
            dim: usize::MAX,
            max_dim: budget.max_dim,
        })?;
    budget.check(u.n, choi_dim)?;
    let psi = choi_vector(&u.matrix, u.d, u.n)?.state()?;
    let found = closest_product(&psi, opts)?;
    let locals = local_operators(&found.ansatz, u.d);

    let mut factors = Vec::with_capacity(u.n);
    let mut flagged_singular = false;
    for a in &locals {
        let (v, singular) = unitary_polar_factor(a);
        flagged_singular |= singular;
        factors.push(v);
    }
    let mut product = factors[0].clone();
    for v in &factors[1..] {
        product = product.kronecker(v);
    }
    let hs_value = hs_inner(&u.matrix, &product)?;
    let eps_unitary = (1.0 - hs_value.norm_sqr()).clamp(0.0, 1.0);
    // The product unitary is itself a unit-HS product operator, so it can
    // only tighten the operator distance.
    let eps_operator = found.ansatz.eps().min(eps_unitary);

    Ok((
        factors,
        OperatorOverlapReport {
            eps_operator,
            eps_unitary,
            hs_value,
            flagged_singular,
        },
    ))
}

/// Converts the per-site Choi ansatz vectors back into d×d operators of unit
/// HS norm: `A[(j,k)] = √d · a[j·d + k]`.
pub(crate) fn local_operators(ansatz: &ProductAnsatz, d: usize) -> Vec<DMatrix<Complex64>> {
    let scale = (d as f64).sqrt();
    ansatz
        .locals()
        .iter()
        .map(|a| DMatrix::from_fn(d, d, |j, k| a[j * d + k] * scale))
        .collect()
}

/// Unitary factor of the polar decomposition `A = |A| C` via SVD `A = WΣX†`,
/// giving `C = WX†`. A singular A is flagged; the kernel directions inherit
/// the SVD's basis pairing.
pub(crate) fn unitary_polar_factor(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, bool) {
    let svd = a.clone().svd(true, true);
    let w = svd.u.expect("requested U");
    let x_t = svd.v_t.expect("requested V^T");
    let singular = svd.singular_values.iter().any(|&s| s < 1e-12);
    (w * x_t, singular)
}

/// The upper bound window for the unitary test at operator distance ε:
/// `1 - ε/4 + ε²/16 + ε^{3/2}/8` in the small-ε regime and 501/512 beyond
/// the crossover (≈ 0.106) where the two caps meet. The lower side is the
/// completeness bound `(1-ε)²` inherited by the Choi state.
pub fn unitary_bounds(eps: f64) -> Result<BoundsWindow> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in [0, 1], got {eps}"
        )));
    }
    let threshold = unitary_cap_crossover();
    let cubic = |e: f64| 1.0 - e / 4.0 + e * e / 16.0 + e.powf(1.5) / 8.0;
    let upper = if eps <= threshold {
        cubic(eps).min(1.0)
    } else {
        HIGH_EPS_CAP
    };
    Ok(BoundsWindow {
        eps,
        lower: (1.0 - eps) * (1.0 - eps),
        upper,
        high_eps_cap_applies: eps > threshold,
    })
}

/// Where `1 - ε/4 + ε²/16 + ε^{3/2}/8` meets 501/512 (≈ 0.106), by bisection.
pub fn unitary_cap_crossover() -> f64 {
    let f = |e: f64| 1.0 - e / 4.0 + e * e / 16.0 + e.powf(1.5) / 8.0 - HIGH_EPS_CAP;
    let (mut lo, mut hi) = (0.01f64, 0.2f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{haar_unitary, substream_rng};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn pauli_x() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::default(),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
            ],
        )
    }

    fn pauli_z() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::default(),
                Complex64::default(),
                Complex64::new(-1.0, 0.0),
            ],
        )
    }

    fn cnot() -> UnitaryOperator {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        m[(2, 3)] = Complex64::new(1.0, 0.0);
        m[(3, 2)] = Complex64::new(1.0, 0.0);
        UnitaryOperator::new(m, 2, 2).unwrap()
    }

    fn swap() -> UnitaryOperator {
        UnitaryOperator::new(crate::tensor::swap_operator(2), 2, 2).unwrap()
    }

    fn random_matrix(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = substream_rng(seed, 0);
        DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    #[test]
    fn choi_of_identity_is_max_entangled_power() {
        let id = DMatrix::identity(4, 4);
        let v = choi_vector(&id, 2, 2).unwrap();
        // |Φ⟩^{⊗2} has amplitude 1/2 on the four (j,j) pair sites.
        let dims = v.dims();
        for idx in 0..16 {
            let digits = dims.digits(idx);
            let diagonal = digits.iter().all(|&p| p / 2 == p % 2);
            let expect = if diagonal { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(v.vector()[idx].re, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn choi_of_pauli_x() {
        let v = choi_vector(&pauli_x(), 2, 1).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v.vector()[1].re, inv, epsilon = 1e-14);
        assert_abs_diff_eq!(v.vector()[2].re, inv, epsilon = 1e-14);
        assert_abs_diff_eq!(v.vector()[0].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn choi_inner_product_identity() {
        for seed in 0..20 {
            let m = random_matrix(4, 900 + seed);
            let n = random_matrix(4, 950 + seed);
            let vm = choi_vector(&m, 2, 2).unwrap();
            let vn = choi_vector(&n, 2, 2).unwrap();
            let lhs = vm.inner(&vn).unwrap();
            let rhs = hs_inner(&m, &n).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn choi_is_linear() {
        let m = random_matrix(4, 15);
        let n = random_matrix(4, 16);
        let a = Complex64::new(0.3, -0.8);
        let b = Complex64::new(-1.1, 0.2);
        let combo = choi_vector(&(m.map(|z| z * a) + n.map(|z| z * b)), 2, 2).unwrap();
        let direct = choi_vector(&m, 2, 2).unwrap().vector().map(|z| z * a)
            + choi_vector(&n, 2, 2).unwrap().vector().map(|z| z * b);
        assert!((combo.vector() - direct).norm() < 1e-12);
    }

    #[test]
    fn hs_inner_examples() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!((hs_inner(&id, &id).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(hs_inner(&pauli_x(), &pauli_z()).unwrap().norm() < 1e-15);
        for seed in 0..20 {
            let u = haar_unitary(4, 300 + seed);
            let v = haar_unitary(4, 400 + seed);
            assert!(hs_inner(&u, &v).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn ptest_of_product_unitary_is_one() {
        let u1 = haar_unitary(2, 21);
        let u2 = haar_unitary(2, 22);
        let u = UnitaryOperator::new(u1.kronecker(&u2), 2, 2).unwrap();
        let r = unitary_ptest(&u, Budget::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ptest_of_cnot_and_swap() {
        let r = unitary_ptest(&cnot(), Budget::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.75, epsilon = 1e-10);
        let r = unitary_ptest(&swap(), Budget::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.625, epsilon = 1e-10);
    }

    #[test]
    fn closest_product_unitary_on_product_input() {
        let u1 = haar_unitary(2, 31);
        let u2 = haar_unitary(2, 32);
        let u = UnitaryOperator::new(u1.kronecker(&u2), 2, 2).unwrap();
        let (factors, report) =
            closest_product_unitary(&u, &OptimizerOptions::default(), Budget::default()).unwrap();
        assert!(report.eps_operator < 1e-10);
        assert!(report.eps_unitary < 1e-10);
        // Factors recover the inputs up to a per-site phase.
        for (found, truth) in factors.iter().zip([&u1, &u2]) {
            let overlap = hs_inner(found, truth).unwrap().norm();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn closest_product_unitary_on_cnot() {
        let (_, report) =
            closest_product_unitary(&cnot(), &OptimizerOptions::default(), Budget::default())
                .unwrap();
        assert_abs_diff_eq!(report.eps_operator, 0.5, epsilon = 1e-6);
        assert!(report.eps_operator <= report.eps_unitary + 1e-12);
    }

    #[test]
    fn polar_certification() {
        // ⟨V_i, A_i⟩ equals (1/d) tr|A_i|, real nonnegative.
        let psi = choi_vector(&haar_unitary(4, 55), 2, 2)
            .unwrap()
            .state()
            .unwrap();
        let found = closest_product(&psi, &OptimizerOptions::default()).unwrap();
        for a in local_operators(&found.ansatz, 2) {
            let (v, _) = unitary_polar_factor(&a);
            let cert = hs_inner(&v, &a).unwrap();
            let svd = a.clone().svd(false, false);
            let trace_abs: f64 = svd.singular_values.iter().sum();
            assert!(cert.im.abs() < 1e-10);
            assert!(cert.re >= -1e-12);
            assert_abs_diff_eq!(cert.re, trace_abs / 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn extraction_guarantee_holds_on_haar_sweep() {
        for seed in 0..10 {
            let u = UnitaryOperator::new(haar_unitary(4, 600 + seed), 2, 2).unwrap();
            let (_, report) =
                closest_product_unitary(&u, &OptimizerOptions::default(), Budget::default())
                    .unwrap();
            assert!(report.eps_operator <= report.eps_unitary + 1e-12);
            if report.eps_operator <= 0.5 {
                let guarantee = (1.0 - 2.0 * report.eps_operator).powi(2);
                assert!(
                    report.hs_value.norm_sqr() >= guarantee - 1e-6,
                    "seed {seed}: |hs|² = {} < {}",
                    report.hs_value.norm_sqr(),
                    guarantee
                );
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let b = unitary_bounds(0.0).unwrap();
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-15);
        assert!(!b.high_eps_cap_applies);

        let b = unitary_bounds(0.08).unwrap();
        let expect = 1.0 - 0.02 + 0.08f64 * 0.08 / 16.0 + 0.08f64.powf(1.5) / 8.0;
        assert_abs_diff_eq!(b.upper, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 0.98322843, epsilon = 1e-7);

        let b = unitary_bounds(0.5).unwrap();
        assert_abs_diff_eq!(b.upper, HIGH_EPS_CAP, epsilon = 1e-15);
        assert!(b.high_eps_cap_applies);

        // The crossover sits near 0.106 and the two caps meet there.
        let t = unitary_cap_crossover();
        assert!((t - 0.106).abs() < 2e-3, "crossover {t}");
        let cubic = 1.0 - t / 4.0 + t * t / 16.0 + t.powf(1.5) / 8.0;
        assert_abs_diff_eq!(cubic, HIGH_EPS_CAP, epsilon = 1e-10);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_diagonal_element(2, 2, Complex64::new(2.0, 0.0));
        assert!(matches!(
            UnitaryOperator::new(m, 2, 1),
            Err(Error::NotUnitary { .. })
        ));
    }
}
