//! Seesaw optimization of linear functionals over product witnesses, the
//! two-party grid oracle that cross-checks it, and the channel 1→∞ norm.
//!
//! The optimum of `tr Mρ` over the separable set is attained at pure product
//! states (the objective is linear over a convex set), which is exactly what
//! the seesaw searches: holding all parties but one fixed, the optimal local
//! vector is the extreme eigenvector of the contracted operator, so the
//! objective is monotone along the sweep. Values are certified one-sided
//! bounds; no global-optimality claim is made.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{KrausChannel, Measurement, SepOptResult};
use crate::error::{Error, Result};
use crate::product_approx::{OptimizerOptions, ProductAnsatz};
use crate::tensor::mesh::state_mesh;
use crate::tensor::{haar_vector, hermitian_part, substream_rng};

/// Certified lower bound on `max { tr Mρ : ρ separable }`.
pub fn sep_maximize(m: &Measurement, opts: &OptimizerOptions) -> Result<SepOptResult> {
    seesaw(m, opts, true)
}

/// Certified upper bound on `min { tr Kρ : ρ separable }`; identical seesaw
/// with bottom eigenvectors.
pub fn sep_minimize(m: &Measurement, opts: &OptimizerOptions) -> Result<SepOptResult> {
    seesaw(m, opts, false)
}

fn seesaw(m: &Measurement, opts: &OptimizerOptions, maximize: bool) -> Result<SepOptResult> {
    opts.validate()?;
    let dims = m.dims();
    let parties = m.parties();

    if parties == 1 {
        let (value, vector) = extreme_eigenpair(m.matrix(), maximize);
        return Ok(SepOptResult {
            value,
            witness: ProductAnsatz::from_parts(vec![vector], value),
            iterations: 0,
            restarts_used: 1,
            converged: true,
        });
    }

    let runs: Vec<(f64, Vec<DVector<Complex64>>, usize, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream_rng(opts.seed, r as u64);
            let mut locals: Vec<DVector<Complex64>> = (0..parties)
                .map(|p| haar_vector(dims.dim(p), &mut rng))
                .collect();
            let mut value = m.product_expectation(&locals);
            let mut converged = false;
            let mut sweeps = 0usize;
            for _ in 0..opts.max_iters {
                sweeps += 1;
                let before = value;
                for p in 0..parties {
                    let contracted = contract_party(m, &locals, p);
                    let (eig, vector) = extreme_eigenpair(&contracted, maximize);
                    // Each update is the exact optimum of its party.
                    debug_assert!(if maximize {
                        eig >= value - 1e-10
                    } else {
                        eig <= value + 1e-10
                    });
                    value = eig;
                    locals[p] = vector;
                }
                if (value - before).abs() <= opts.rel_tol * value.abs().max(1e-30) {
                    converged = true;
                    break;
                }
            }
            (value, locals, sweeps, converged)
        })
        .collect();

    let mut best = 0usize;
    for (r, run) in runs.iter().enumerate() {
        let improves = if maximize {
            run.0 > runs[best].0
        } else {
            run.0 < runs[best].0
        };
        if improves {
            best = r;
        }
    }
    let (value, locals, iterations, converged) =
        runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(SepOptResult {
        value,
        witness: ProductAnsatz::from_parts(locals, value),
        iterations,
        restarts_used: opts.restarts,
        converged,
    })
}

/// `(⟨ψ_1|⊗…⊗I_p⊗…⊗⟨ψ_k|) M (|ψ_1⟩⊗…⊗I_p⊗…⊗|ψ_k⟩)`: the operator whose
/// extreme eigenvector is the optimal update of party p.
fn contract_party(
    m: &Measurement,
    locals: &[DVector<Complex64>],
    party: usize,
) -> DMatrix<Complex64> {
    let dims = m.dims();
    let d = dims.dim(party);
    let mut out = DMatrix::zeros(d, d);
    let matrix = m.matrix();
    for row in 0..matrix.nrows() {
        let u = dims.digits(row);
        let mut left = Complex64::new(1.0, 0.0);
        for (p, &digit) in u.iter().enumerate() {
            if p != party {
                left *= locals[p][digit].conj();
            }
        }
        if left.norm_sqr() == 0.0 {
            continue;
        }
        for col in 0..matrix.ncols() {
            let w = dims.digits(col);
            let mut right = Complex64::new(1.0, 0.0);
            for (p, &digit) in w.iter().enumerate() {
                if p != party {
                    right *= locals[p][digit];
                }
            }
            out[(u[party], w[party])] += left * matrix[(row, col)] * right;
        }
    }
    hermitian_part(&out)
}

/// Largest (or smallest) eigenvalue and a unit eigenvector of a Hermitian
/// matrix.
fn extreme_eigenpair(matrix: &DMatrix<Complex64>, maximize: bool) -> (f64, DVector<Complex64>) {
    let eigen = SymmetricEigen::new(hermitian_part(matrix));
    let mut idx = 0usize;
    for i in 1..eigen.eigenvalues.len() {
        let better = if maximize {
            eigen.eigenvalues[i] > eigen.eigenvalues[idx]
        } else {
            eigen.eigenvalues[i] < eigen.eigenvalues[idx]
        };
        if better {
            idx = i;
        }
    }
    let mut vector: DVector<Complex64> = eigen.eigenvectors.column(idx).into_owned();
    let norm = vector.norm();
    if norm > 0.0 {
        vector.unscale_mut(norm);
    }
    (eigen.eigenvalues[idx], vector)
}

/// How many grid candidates survive into the polish stage.
const REFINE_CANDIDATES: usize = 24;

/// Mesh points for one party: `resolution` covers a qubit's state space
/// (2 real dimensions); higher local dimensions get a power of it, capped.
fn mesh_points(d: usize, resolution: usize) -> usize {
    let mut count = resolution;
    for _ in 2..d {
        count = count.saturating_mul(resolution);
    }
    count.min(20_000)
}

/// Independent two-party oracle: quasi-uniform product grid plus a
/// derivative-free polish of the best candidates. Evaluates expectations
/// only — no eigenvector updates — so it cross-checks the seesaw honestly.
pub fn grid_sep_value(m: &Measurement, resolution: usize, maximize: bool) -> Result<f64> {
    if m.parties() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the grid oracle handles exactly two parties, got {}",
            m.parties()
        )));
    }
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!(
            "oracle resolution must be >= 8, got {resolution}"
        )));
    }
    let (d1, d2) = (m.party_dims()[0], m.party_dims()[1]);
    let mesh1 = state_mesh(d1, mesh_points(d1, resolution), 0);
    let mesh2 = state_mesh(d2, mesh_points(d2, resolution), 1);
    let sign = if maximize { 1.0 } else { -1.0 };

    // One champion per η mesh point keeps the polish starts spread over the
    // second party's state space instead of clustering in one basin.
    let mut champions: Vec<(f64, usize, usize)> = Vec::with_capacity(mesh2.len());
    for (j, eta) in mesh2.iter().enumerate() {
        let contracted = contract_second_party(m, eta);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, beta) in mesh1.iter().enumerate() {
            let value = quadratic_form(&contracted, beta) * sign;
            if value > best.0 {
                best = (value, i);
            }
        }
        champions.push((best.0, best.1, j));
    }
    champions.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let best = champions
        .iter()
        .take(REFINE_CANDIDATES)
        .map(|&(_, i, j)| polish_pair(m, mesh1[i].clone(), mesh2[j].clone(), sign))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best * sign)
}

/// `⟨·⊗η| M |·⊗η⟩` as an operator on the first party.
fn contract_second_party(m: &Measurement, eta: &DVector<Complex64>) -> DMatrix<Complex64> {
    let (d1, d2) = (m.party_dims()[0], m.party_dims()[1]);
    let matrix = m.matrix();
    let mut out = DMatrix::zeros(d1, d1);
    for a in 0..d1 {
        for b in 0..d1 {
            let mut acc = Complex64::default();
            for u in 0..d2 {
                for w in 0..d2 {
                    acc += eta[u].conj() * matrix[(a * d2 + u, b * d2 + w)] * eta[w];
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

fn quadratic_form(matrix: &DMatrix<Complex64>, v: &DVector<Complex64>) -> f64 {
    let mut acc = Complex64::default();
    for a in 0..matrix.nrows() {
        for b in 0..matrix.ncols() {
            acc += v[a].conj() * matrix[(a, b)] * v[b];
        }
    }
    acc.re
}

/// Compass search over the raw coordinates of both party vectors, maximizing
/// `sign * ⟨β⊗η|M|β⊗η⟩`.
fn polish_pair(
    m: &Measurement,
    beta: DVector<Complex64>,
    eta: DVector<Complex64>,
    sign: f64,
) -> f64 {
    let mut locals = vec![beta, eta];
    let best = crate::tensor::mesh::compass_refine(&mut locals, |locals| {
        m.product_expectation(locals) * sign
    });
    best
}

/// The channel 1→∞ norm and the matching min output ∞-entropy
/// `S_∞^min = -ln ‖N‖_{1→∞}` (natural logarithm).
#[derive(Debug, Clone)]
pub struct MinOutputReport {
    /// `‖N‖_{1→∞} = max_{ψ,η} ⟨η|N(ψ)|η⟩`.
    pub value: f64,
    pub s_inf_min: f64,
    pub witness_input: DVector<Complex64>,
    pub witness_output: DVector<Complex64>,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Seesaw for `max_{ψ,η} ⟨η|N(ψψ†)|η⟩`: alternates the top eigenvector of
/// the channel output with the top eigenvector of `Σ N_i†|η⟩⟨η|N_i`.
pub fn min_output_infinity(
    channel: &KrausChannel,
    opts: &OptimizerOptions,
) -> Result<MinOutputReport> {
    opts.validate()?;
    let din = channel.input_dim();
    let dout = channel.output_dim();

    let runs: Vec<(f64, DVector<Complex64>, DVector<Complex64>, usize, bool)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream_rng(opts.seed, r as u64);
            let mut input = haar_vector(din, &mut rng);
            let mut output = haar_vector(dout, &mut rng);
            let mut value = 0.0f64;
            let mut converged = false;
            let mut sweeps = 0usize;
            for _ in 0..opts.max_iters {
                sweeps += 1;
                let before = value;
                // Optimal input for the current output direction.
                let mut back = DMatrix::<Complex64>::zeros(din, din);
                for op in channel.kraus_ops() {
                    let w = op.adjoint() * &output;
                    for a in 0..din {
                        for b in 0..din {
                            back[(a, b)] += w[a] * w[b].conj();
                        }
                    }
                }
                let (_, psi) = extreme_eigenpair(&back, true);
                input = psi;
                // Optimal output for the current input.
                let rho = {
                    let mut m = DMatrix::<Complex64>::zeros(din, din);
                    for a in 0..din {
                        for b in 0..din {
                            m[(a, b)] = input[a] * input[b].conj();
                        }
                    }
                    m
                };
                let (eig, eta) = extreme_eigenpair(&channel.apply(&rho), true);
                output = eta;
                value = eig;
                if (value - before).abs() <= opts.rel_tol * value.abs().max(1e-30) {
                    converged = true;
                    break;
                }
            }
            (value, input, output, sweeps, converged)
        })
        .collect();

    let mut best = 0usize;
    for (r, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = r;
        }
    }
    let (value, witness_input, witness_output, iterations, converged) =
        runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(MinOutputReport {
        value,
        s_inf_min: -value.max(f64::MIN_POSITIVE).ln(),
        witness_input,
        witness_output,
        iterations,
        restarts_used: opts.restarts,
        converged,
    })
}
