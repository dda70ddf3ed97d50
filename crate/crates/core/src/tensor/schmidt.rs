//! Schmidt decomposition across a bipartite cut.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{PureState, SubsystemMask};
use crate::error::{Error, Result};

/// Values λ below this floor are treated as numerically zero and dropped.
const LAMBDA_FLOOR: f64 = 1e-24;

/// Schmidt data of a bipartite cut: probabilities `λ_1 >= … >= λ_r > 0`
/// summing to 1, together with the orthonormal left/right families, so the
/// state reconstructs as `Σ √λ_i |l_i⟩⊗|r_i⟩` (left = cut side, right =
/// complement, each in ascending site order).
#[derive(Debug, Clone)]
pub struct SchmidtData {
    coefficients: Vec<f64>,
    left_vectors: Vec<DVector<Complex64>>,
    right_vectors: Vec<DVector<Complex64>>,
}

impl SchmidtData {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_vectors(&self) -> &[DVector<Complex64>] {
        &self.left_vectors
    }

    pub fn right_vectors(&self) -> &[DVector<Complex64>] {
        &self.right_vectors
    }

    /// Number of nonzero Schmidt values.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Largest Schmidt probability λ₁: the squared maximum product overlap
    /// across the cut.
    pub fn lambda_max(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    /// Σ λ_i², the purity of either reduced state.
    pub fn purity(&self) -> f64 {
        self.coefficients.iter().map(|l| l * l).sum()
    }

    /// Rebuilds the (cut × complement) amplitude matrix `Σ √λ_i l_i r_iᵀ`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let rows = self.left_vectors[0].len();
        let cols = self.right_vectors[0].len();
        let mut out = DMatrix::zeros(rows, cols);
        for ((l, r), &lam) in self
            .left_vectors
            .iter()
            .zip(&self.right_vectors)
            .zip(&self.coefficients)
        {
            let w = Complex64::new(lam.sqrt(), 0.0);
            for j in 0..rows {
                for k in 0..cols {
                    out[(j, k)] += w * l[j] * r[k];
                }
            }
        }
        out
    }
}

/// Rearranges the state's amplitudes into the (cut × complement) matrix whose
/// SVD is the Schmidt decomposition.
pub fn cut_matrix(psi: &PureState, cut: &SubsystemMask) -> Result<DMatrix<Complex64>> {
    let dims = psi.dims();
    let left = dims.select(cut.members())?;
    let right = dims.select(cut.complement().members())?;
    let strides = dims.strides();
    let left_offsets: Vec<usize> = (0..left.total_dim())
        .map(|s| {
            left.digits(s)
                .iter()
                .zip(cut.members())
                .map(|(&digit, &site)| digit * strides[site])
                .sum()
        })
        .collect();
    let comp = cut.complement();
    let right_offsets: Vec<usize> = (0..right.total_dim())
        .map(|s| {
            right
                .digits(s)
                .iter()
                .zip(comp.members())
                .map(|(&digit, &site)| digit * strides[site])
                .sum()
        })
        .collect();
    let mut m = DMatrix::zeros(left.total_dim(), right.total_dim());
    for (j, &lo) in left_offsets.iter().enumerate() {
        for (k, &ro) in right_offsets.iter().enumerate() {
            m[(j, k)] = psi.amplitudes()[lo + ro];
        }
    }
    Ok(m)
}

/// Schmidt decomposition of `psi` across `cut`, which must be a proper
/// nonempty subset of the subsystems.
///
/// Output is deterministic: values sorted nonincreasing, exact ties broken by
/// the first differing left-vector component, and each left vector's first
/// nonzero component made real positive (the compensating phase goes into the
/// right vector).
pub fn schmidt(psi: &PureState, cut: &SubsystemMask) -> Result<SchmidtData> {
    if cut.n() != psi.dims().n() {
        return Err(Error::InvalidCut(format!(
            "cut is over {} subsystems, state has {}",
            cut.n(),
            psi.dims().n()
        )));
    }
    if cut.is_empty() || cut.is_full() {
        return Err(Error::InvalidCut(format!(
            "cut has {} of {} subsystems",
            cut.len(),
            cut.n()
        )));
    }
    let m = cut_matrix(psi, cut)?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");

    let mut triples: Vec<(f64, DVector<Complex64>, DVector<Complex64>)> = Vec::new();
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        let lambda = sigma * sigma;
        if lambda <= LAMBDA_FLOOR {
            continue;
        }
        let mut l: DVector<Complex64> = u.column(i).into_owned();
        let mut r: DVector<Complex64> = v_t.row(i).transpose();
        // Phase convention: first nonzero left component real positive.
        if let Some(z) = l.iter().find(|z| z.norm() > 1e-12) {
            let phase = z / z.norm();
            let inv = phase.conj();
            l.iter_mut().for_each(|x| *x *= inv);
            r.iter_mut().for_each(|x| *x *= phase);
        }
        triples.push((lambda, l, r));
    }
    triples.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| lex_cmp(&a.1, &b.1))
    });

    Ok(SchmidtData {
        coefficients: triples.iter().map(|t| t.0).collect(),
        left_vectors: triples.iter().map(|t| t.1.clone()).collect(),
        right_vectors: triples.into_iter().map(|t| t.2).collect(),
    })
}

fn lex_cmp(a: &DVector<Complex64>, b: &DVector<Complex64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x
            .re
            .partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
        {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}
