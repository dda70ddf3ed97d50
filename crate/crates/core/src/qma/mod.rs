//! Finite-dimensional objects of the separable-measurement protocol:
//! measurements over party structures, trace-non-increasing Kraus channels,
//! seesaw optimization over product witnesses, the composite two-prover
//! accept operator, repetition/threshold amplification, the
//! measurement/channel correspondence behind the 1→∞ norm, and the gentle
//! measurement check.

mod channel;
mod protocol;
mod seesaw;

pub use channel::{
    channel_to_measurement, channel_to_measurement_printed, measurement_to_channel,
    random_channel,
};
pub use protocol::{
    gentle_check, product_test_projector, protocol2_operator, repeat_measurement,
    soundness_bound_check, threshold_repeat, GentleReport, SoundnessReport,
};
pub use seesaw::{grid_sep_value, min_output_infinity, sep_maximize, sep_minimize, MinOutputReport};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::product_approx::ProductAnsatz;
use crate::tensor::{
    haar_vector, hermitian_part, hermiticity_defect, substream_rng, DimsProfile,
};
use crate::tol::{TOL_HERM, TOL_PSD};

/// A binary-measurement accept operator: Hermitian with `0 <= M <= I`, over a
/// declared party structure (parties may be composite sites). Optional
/// soundness/completeness annotations travel with the operator.
#[derive(Debug, Clone)]
pub struct Measurement {
    matrix: DMatrix<Complex64>,
    party_dims: Vec<usize>,
    pub soundness: Option<f64>,
    pub completeness: Option<f64>,
}

impl Measurement {
    pub fn new(matrix: DMatrix<Complex64>, party_dims: Vec<usize>) -> Result<Self> {
        let dims = DimsProfile::new(party_dims.clone())?;
        let total = dims.total_dim();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for party dims {:?}",
                matrix.nrows(),
                matrix.ncols(),
                party_dims
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > TOL_HERM {
            return Err(Error::NotHermitian { defect });
        }
        let eigen = SymmetricEigen::new(hermitian_part(&matrix));
        for &eig in eigen.eigenvalues.iter() {
            if !(-TOL_PSD..=1.0 + TOL_PSD).contains(&eig) {
                return Err(Error::NotEffect { eig });
            }
        }
        Ok(Self {
            matrix,
            party_dims,
            soundness: None,
            completeness: None,
        })
    }

    /// The identity effect on the given party structure.
    pub fn identity(party_dims: Vec<usize>) -> Result<Self> {
        let total: usize = party_dims.iter().product();
        Self::new(DMatrix::identity(total, total), party_dims)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn dims(&self) -> DimsProfile {
        DimsProfile::new(self.party_dims.clone()).expect("validated at construction")
    }

    /// Same operator viewed over a different party structure of equal total
    /// dimension.
    pub fn regroup(&self, party_dims: Vec<usize>) -> Result<Self> {
        Self::new(self.matrix.clone(), party_dims)
    }

    /// `tr Mρ` for a product witness given as per-party unit vectors.
    pub fn product_expectation(&self, locals: &[nalgebra::DVector<Complex64>]) -> f64 {
        let dims = self.dims();
        let mut acc = Complex64::default();
        for row in 0..self.matrix.nrows() {
            let u = dims.digits(row);
            let mut left = Complex64::new(1.0, 0.0);
            for (p, &digit) in u.iter().enumerate() {
                left *= locals[p][digit].conj();
            }
            for col in 0..self.matrix.ncols() {
                let w = dims.digits(col);
                let mut right = Complex64::new(1.0, 0.0);
                for (p, &digit) in w.iter().enumerate() {
                    right *= locals[p][digit];
                }
                acc += left * self.matrix[(row, col)] * right;
            }
        }
        acc.re
    }
}

/// A list of Kraus operators `N_1, …, N_k` with `Σ N_i†N_i <= I`
/// (trace non-increasing). All operators share the same output×input shape.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus_ops: Vec<DMatrix<Complex64>>,
    output_dim: usize,
    input_dim: usize,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let Some(first) = kraus_ops.first() else {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus operator".into(),
            ));
        };
        let (output_dim, input_dim) = first.shape();
        if output_dim == 0 || input_dim == 0 {
            return Err(Error::InvalidArgument("empty Kraus operator".into()));
        }
        let mut gram = DMatrix::<Complex64>::zeros(input_dim, input_dim);
        for op in &kraus_ops {
            if op.shape() != (output_dim, input_dim) {
                return Err(Error::DimensionMismatch(
                    "Kraus operators must share one shape".into(),
                ));
            }
            gram += op.adjoint() * op;
        }
        let eigen = SymmetricEigen::new(hermitian_part(&gram));
        let max = eigen
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max > 1.0 + TOL_PSD {
            return Err(Error::TraceIncreasing { eig: max });
        }
        Ok(Self {
            kraus_ops,
            output_dim,
            input_dim,
        })
    }

    /// The identity channel on dimension d.
    pub fn identity(d: usize) -> Self {
        Self {
            kraus_ops: vec![DMatrix::identity(d, d)],
            output_dim: d,
            input_dim: d,
        }
    }

    /// The fully depolarising qubit channel with Kraus operators σ_i / 2.
    pub fn fully_depolarising_qubit() -> Self {
        let h = Complex64::new(0.5, 0.0);
        let ih = Complex64::new(0.0, 0.5);
        let ops = vec![
            DMatrix::from_row_slice(2, 2, &[h, Complex64::default(), Complex64::default(), h]),
            DMatrix::from_row_slice(2, 2, &[Complex64::default(), h, h, Complex64::default()]),
            DMatrix::from_row_slice(2, 2, &[Complex64::default(), -ih, ih, Complex64::default()]),
            DMatrix::from_row_slice(2, 2, &[h, Complex64::default(), Complex64::default(), -h]),
        ];
        Self::new(ops).expect("valid channel")
    }

    pub fn kraus_ops(&self) -> &[DMatrix<Complex64>] {
        &self.kraus_ops
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus_ops.len()
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// `N(X) = Σ N_i X N_i†`.
    pub fn apply(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.output_dim, self.output_dim);
        for op in &self.kraus_ops {
            out += op * x * op.adjoint();
        }
        out
    }
}

/// Outcome of a seesaw run: a certified one-sided bound on the separable
/// optimum together with the product witness attaining it. For maximization
/// the value is a lower bound on the true maximum; for minimization an upper
/// bound on the true minimum.
#[derive(Debug, Clone)]
pub struct SepOptResult {
    pub value: f64,
    pub witness: ProductAnsatz,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Repetition of a protocol: ℓ parallel slots with an accept threshold.
/// `threshold = ell` is plain repetition (accept iff every slot accepts).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionSpec {
    pub ell: usize,
    pub threshold: usize,
}

impl RepetitionSpec {
    pub fn new(ell: usize, threshold: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidArgument("ell must be >= 1".into()));
        }
        if threshold > ell {
            return Err(Error::InvalidArgument(format!(
                "threshold {threshold} exceeds ell {ell}"
            )));
        }
        Ok(Self { ell, threshold })
    }

    /// Plain all-accept repetition.
    pub fn plain(ell: usize) -> Result<Self> {
        Self::new(ell, ell)
    }
}

/// A random separable-form effect `Σ_j a_j β_j⊗…⊗η_j`, scaled so the largest
/// eigenvalue is 1. Deterministic given the seed.
pub fn separable_form_measurement(
    party_dims: &[usize],
    terms: usize,
    seed: u64,
) -> Result<Measurement> {
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be >= 1".into()));
    }
    let dims = DimsProfile::new(party_dims.to_vec())?;
    let total = dims.total_dim();
    let mut m = DMatrix::<Complex64>::zeros(total, total);
    for j in 0..terms {
        let mut rng = substream_rng(seed, j as u64);
        let locals: Vec<_> = party_dims.iter().map(|&d| haar_vector(d, &mut rng)).collect();
        let mut product = locals[0].clone();
        for v in &locals[1..] {
            product = product.kronecker(v);
        }
        let weight: f64 = 0.2 + 0.8 * (j as f64 + 1.0) / terms as f64;
        for r in 0..total {
            for c in 0..total {
                m[(r, c)] += product[r] * product[c].conj() * weight;
            }
        }
    }
    let eigen = SymmetricEigen::new(hermitian_part(&m));
    let max = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Measurement::new(m.unscale(max), party_dims.to_vec())
}
