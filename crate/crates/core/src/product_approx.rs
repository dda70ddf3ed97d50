//! Closest product state and the distance ε = 1 - max|⟨ψ|φ_1…φ_n⟩|².
//!
//! The optimizer is the standard alternating scheme for the geometric
//! measure: holding all sites but one fixed, the optimal local vector is the
//! normalized contraction of the state against the other sites' vectors, so
//! every update is exactly optimal and the overlap ascends monotonically.
//! Haar-seeded restarts guard against bad stationary points; for n = 2 the
//! exact answer comes from the Schmidt decomposition instead.
//!
//! `brute_force_eps` is an independent oracle: a quasi-uniform grid over
//! product states followed by a derivative-free local polish. It evaluates
//! raw overlaps only and shares no machinery with the alternating updates it
//! cross-checks.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::product_test::product_overlap;
use crate::tensor::mesh::{covering_radius_estimate, state_mesh};
use crate::tensor::{haar_vector, schmidt, substream_rng, PureState, SubsystemMask};
use crate::tol::Budget;

/// A product ansatz: one unit vector per site and the squared overlap it
/// achieves with the target state. `eps` is derived as `1 - overlap_sq` and
/// is an upper bound on the true distance (the optimizer maximizes overlap).
#[derive(Debug, Clone)]
pub struct ProductAnsatz {
    locals: Vec<DVector<Complex64>>,
    overlap_sq: f64,
}

impl ProductAnsatz {
    /// Builds an ansatz from local unit vectors, measuring the overlap
    /// against `psi`. Each local is phase-fixed (first nonzero component real
    /// positive) and must be normalized.
    pub fn new(locals: Vec<DVector<Complex64>>, psi: &PureState) -> Result<Self> {
        if locals.len() != psi.dims().n() {
            return Err(Error::DimensionMismatch(format!(
                "{} locals for {} sites",
                locals.len(),
                psi.dims().n()
            )));
        }
        for (i, v) in locals.iter().enumerate() {
            if v.len() != psi.dims().dim(i) {
                return Err(Error::DimensionMismatch(format!(
                    "local {i} has length {}, site dimension is {}",
                    v.len(),
                    psi.dims().dim(i)
                )));
            }
            if (v.norm() - 1.0).abs() > crate::tol::TOL_NORM {
                return Err(Error::NotNormalized { norm: v.norm() });
            }
        }
        let locals: Vec<_> = locals.into_iter().map(fix_phase).collect();
        let overlap_sq = product_overlap(psi, &locals).norm_sqr().min(1.0);
        Ok(Self { locals, overlap_sq })
    }

    /// From already phase-fixed unit locals with an externally measured
    /// objective; the seesaw stores its operator expectation here.
    pub(crate) fn from_parts(locals: Vec<DVector<Complex64>>, value: f64) -> Self {
        let locals = locals.into_iter().map(fix_phase).collect();
        Self {
            locals,
            overlap_sq: value,
        }
    }

    pub fn locals(&self) -> &[DVector<Complex64>] {
        &self.locals
    }

    pub fn overlap_sq(&self) -> f64 {
        self.overlap_sq
    }

    pub fn eps(&self) -> f64 {
        (1.0 - self.overlap_sq).max(0.0)
    }

    /// The ansatz as a product state.
    pub fn product_state(&self) -> PureState {
        PureState::product(&self.locals).expect("locals are unit vectors")
    }
}

/// Knobs for the alternating optimizer and the seesaw in the protocol
/// harness. Restart r draws its start from substream (seed, r), so results
/// do not depend on how restarts are scheduled.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 500,
            rel_tol: 1e-12,
            seed: 0,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || self.rel_tol <= 0.0 {
            return Err(Error::InvalidArgument(
                "optimizer needs restarts >= 1, max_iters >= 1 and rel_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Result of the closest-product search. Non-convergence is not an error:
/// the best iterate is returned with `converged = false`, since the derived
/// eps stays a valid upper bound either way.
#[derive(Debug, Clone)]
pub struct ClosestProduct {
    pub ansatz: ProductAnsatz,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Best product approximation of `psi` over Haar-seeded restarts. For n = 2
/// the exact maximizer is read off the Schmidt decomposition.
pub fn closest_product(psi: &PureState, opts: &OptimizerOptions) -> Result<ClosestProduct> {
    opts.validate()?;
    let n = psi.dims().n();
    if n == 1 {
        let ansatz = ProductAnsatz::new(vec![psi.amplitudes().clone()], psi)?;
        return Ok(ClosestProduct {
            ansatz,
            iterations: 0,
            restarts_used: 1,
            converged: true,
        });
    }
    if n == 2 {
        let cut = SubsystemMask::new([0], 2)?;
        let s = schmidt(psi, &cut)?;
        let locals = vec![s.left_vectors()[0].clone(), s.right_vectors()[0].clone()];
        let ansatz = ProductAnsatz::new(locals, psi)?;
        return Ok(ClosestProduct {
            ansatz,
            iterations: 0,
            restarts_used: 1,
            converged: true,
        });
    }

    let runs: Vec<(f64, Vec<DVector<Complex64>>, usize, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream_rng(opts.seed, r as u64);
            let start: Vec<DVector<Complex64>> = (0..n)
                .map(|i| haar_vector(psi.dims().dim(i), &mut rng))
                .collect();
            alternating_ascent(psi, start, opts.max_iters, opts.rel_tol)
        })
        .collect();

    // Ties between equal overlaps go to the lowest restart index.
    let mut best = 0usize;
    for (r, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = r;
        }
    }
    let (_, locals, iterations, converged) = runs.into_iter().nth(best).expect("restarts >= 1");
    let ansatz = ProductAnsatz::new(locals, psi)?;
    Ok(ClosestProduct {
        ansatz,
        iterations,
        restarts_used: opts.restarts,
        converged,
    })
}

/// One alternating run: returns (overlap_sq, locals, sweeps, converged).
fn alternating_ascent(
    psi: &PureState,
    mut locals: Vec<DVector<Complex64>>,
    max_iters: usize,
    rel_tol: f64,
) -> (f64, Vec<DVector<Complex64>>, usize, bool) {
    let n = locals.len();
    let mut overlap_sq = product_overlap(psi, &locals).norm_sqr();
    let mut converged = false;
    let mut sweeps = 0usize;
    for _ in 0..max_iters {
        sweeps += 1;
        let before = overlap_sq;
        for i in 0..n {
            let c = contract_except(psi, &locals, i);
            let norm = c.norm();
            if norm > 0.0 {
                locals[i] = c.unscale(norm);
                let updated = norm * norm;
                // Each site update is exactly optimal, so ascent is monotone.
                debug_assert!(updated >= overlap_sq - 1e-12);
                overlap_sq = updated;
            }
        }
        if (overlap_sq - before).abs() <= rel_tol * overlap_sq.max(1e-30) {
            converged = true;
            break;
        }
    }
    (overlap_sq, locals, sweeps, converged)
}

/// Contraction of ψ against all locals except site `i`: the unnormalized
/// optimal i-th local vector. Its norm is the overlap attained after the
/// update.
pub(crate) fn contract_except(
    psi: &PureState,
    locals: &[DVector<Complex64>],
    site: usize,
) -> DVector<Complex64> {
    let dims = psi.dims();
    let mut c = DVector::zeros(dims.dim(site));
    for (x, amp) in psi.amplitudes().iter().enumerate() {
        let digits = dims.digits(x);
        let mut term = *amp;
        for (j, &digit) in digits.iter().enumerate() {
            if j != site {
                term *= locals[j][digit].conj();
            }
        }
        c[digits[site]] += term;
    }
    c
}

/// Makes the first component of magnitude > 1e-12 real positive.
fn fix_phase(mut v: DVector<Complex64>) -> DVector<Complex64> {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12) {
        let phase = (z / z.norm()).conj();
        v.iter_mut().for_each(|x| *x *= phase);
    }
    v
}

/// Oracle output: the eps found by exhaustive search plus the coarse-mesh
/// guarantee `true_eps >= eps - error_bound` (the found eps is always an
/// upper bound on the true distance).
#[derive(Debug, Clone, Copy)]
pub struct BruteForceEps {
    pub eps: f64,
    pub error_bound: f64,
}

/// Work cap on the coarse grid: resolution^n enumerated product candidates.
const MAX_GRID_CANDIDATES: usize = 1 << 26;

/// How many coarse candidates get the local polish.
const REFINE_CANDIDATES: usize = 8;

/// Independent grid oracle for ε: enumerates quasi-uniform product states at
/// `resolution` points per site, then polishes the best candidates with a
/// compass search over raw amplitude coordinates. The reported error bound is
/// the covering-radius overlap loss of the coarse mesh.
pub fn brute_force_eps(psi: &PureState, resolution: usize, budget: Budget) -> Result<BruteForceEps> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!(
            "oracle resolution must be >= 8, got {resolution}"
        )));
    }
    let n = psi.dims().n();
    budget.check(n, psi.dims().total_dim())?;
    if n == 1 {
        return Ok(BruteForceEps {
            eps: 0.0,
            error_bound: 0.0,
        });
    }
    let mut candidates = 1usize;
    for _ in 0..n {
        candidates = candidates.saturating_mul(resolution);
        if candidates > MAX_GRID_CANDIDATES {
            return Err(Error::Budget {
                n,
                dim: candidates,
                max_dim: MAX_GRID_CANDIDATES,
            });
        }
    }

    let meshes: Vec<Vec<DVector<Complex64>>> = (0..n)
        .map(|i| state_mesh(psi.dims().dim(i), resolution, i as u64))
        .collect();

    // Coarse scan by nested contraction, keeping the top candidates.
    let mut top: Vec<(f64, Vec<usize>)> = Vec::new();
    let root: Vec<Complex64> = psi.amplitudes().iter().map(|z| z.conj()).collect();
    scan(&root, psi, &meshes, 0, &mut Vec::new(), &mut top);
    top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    // Local polish of each surviving candidate.
    let best = top
        .iter()
        .take(REFINE_CANDIDATES)
        .map(|(_, picks)| {
            let locals: Vec<DVector<Complex64>> = picks
                .iter()
                .enumerate()
                .map(|(i, &p)| meshes[i][p].clone())
                .collect();
            compass_polish(psi, locals)
        })
        .fold(0.0f64, f64::max);

    let delta = meshes
        .iter()
        .enumerate()
        .map(|(i, mesh)| covering_radius_estimate(mesh, psi.dims().dim(i), 4 * resolution))
        .fold(0.0f64, f64::max);
    let loss = (n as f64 * delta).min(1.0);

    Ok(BruteForceEps {
        eps: (1.0 - best).clamp(0.0, 1.0),
        error_bound: 2.0 * loss + loss * loss,
    })
}

/// Depth-first contraction over the per-site meshes. `partial` holds the
/// conjugated state contracted against the picks so far, flattened over the
/// remaining sites.
fn scan(
    partial: &[Complex64],
    psi: &PureState,
    meshes: &[Vec<DVector<Complex64>>],
    level: usize,
    picks: &mut Vec<usize>,
    top: &mut Vec<(f64, Vec<usize>)>,
) {
    let n = psi.dims().n();
    if level == n {
        let overlap_sq = partial[0].norm_sqr();
        record_top(top, overlap_sq, picks.clone());
        return;
    }
    let d = psi.dims().dim(level);
    let rest: usize = partial.len() / d;
    let mut next = vec![Complex64::default(); rest];
    for (m, v) in meshes[level].iter().enumerate() {
        for (r, slot) in next.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for a in 0..d {
                acc += partial[a * rest + r] * v[a];
            }
            *slot = acc;
        }
        picks.push(m);
        scan(&next, psi, meshes, level + 1, picks, top);
        picks.pop();
    }
}

fn record_top(top: &mut Vec<(f64, Vec<usize>)>, value: f64, picks: Vec<usize>) {
    if top.len() < REFINE_CANDIDATES * 2 {
        top.push((value, picks));
        return;
    }
    let (mut worst, mut worst_value) = (0usize, f64::INFINITY);
    for (i, (v, _)) in top.iter().enumerate() {
        if *v < worst_value {
            worst = i;
            worst_value = *v;
        }
    }
    if value > worst_value {
        top[worst] = (value, picks);
    }
}

/// Derivative-free polish: coordinate perturbations of the raw amplitudes
/// with step halving. Touches nothing but overlap evaluations.
fn compass_polish(psi: &PureState, mut locals: Vec<DVector<Complex64>>) -> f64 {
    crate::tensor::mesh::compass_refine(&mut locals, |locals| {
        product_overlap(psi, locals).norm_sqr()
    })
}

/// Splits ψ into its product part and the orthogonal residual:
/// returns `(eps, ξ)` with `⟨φ_1…φ_n|ξ⟩ = 0`, `‖ξ‖ = 1` and
/// `ψ = ⟨p|ψ⟩ p + √eps ξ` for `p` the ansatz product state — the product
/// coefficient has modulus `√(1-eps)` and carries the overlap's phase.
pub fn residual_decomposition(
    psi: &PureState,
    ansatz: &ProductAnsatz,
) -> Result<(f64, PureState)> {
    let p = ansatz.product_state();
    let c = p.inner(psi)?;
    let eps = (1.0 - c.norm_sqr()).max(0.0);
    if eps < 1e-24 {
        return Err(Error::DegenerateResidual);
    }
    let residual = psi.amplitudes() - p.amplitudes().map(|z| z * c);
    let xi = PureState::normalized(residual, psi.dims().clone())?;
    Ok((eps, xi))
}

/// First-order optimality: at any genuine maximizer the single-site
/// contraction of ψ against the other sites' vectors is parallel to the
/// site's own vector, which is what forbids weight-1 residual amplitudes.
/// Checks the orthogonal defect of every site against `tol`.
pub fn weight1_check(psi: &PureState, ansatz: &ProductAnsatz, tol: f64) -> bool {
    for site in 0..psi.dims().n() {
        let c = contract_except(psi, ansatz.locals(), site);
        let along = ansatz.locals()[site].dotc(&c);
        let defect = (&c - ansatz.locals()[site].map(|z| z * along)).norm();
        if defect > tol {
            return false;
        }
    }
    true
}
