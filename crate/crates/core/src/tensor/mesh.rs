//! Quasi-uniform meshes on the pure-state space of ℂ^d, used by the
//! brute-force oracles. The construction is a Kronecker (generalized
//! golden-ratio) low-discrepancy sequence in the cube, pushed onto the unit
//! sphere through Box-Muller, with a deterministic phase fix. This keeps the
//! oracles free of the eigenvector machinery used by the optimizers they
//! cross-check.

use nalgebra::DVector;
use num_complex::Complex64;

/// Root of x^(s+1) = x + 1; the generalized golden ratio driving the
/// Kronecker sequence in s dimensions.
fn generalized_golden(s: usize) -> f64 {
    let mut x = 1.5f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (s as f64 + 1.0));
    }
    x
}

/// The k-th point of the s-dimensional Kronecker low-discrepancy sequence,
/// offset so distinct `stream` values give disjoint point sets.
fn kronecker_point(s: usize, k: usize, stream: u64) -> Vec<f64> {
    let phi = generalized_golden(s);
    let mut alpha = Vec::with_capacity(s);
    let mut a = 1.0;
    for _ in 0..s {
        a /= phi;
        alpha.push(a);
    }
    let shift = 0.5 + (stream as f64) * std::f64::consts::SQRT_2;
    alpha
        .iter()
        .map(|&aj| {
            let v = shift + aj * (k as f64 + 1.0);
            v - v.floor()
        })
        .collect()
}

/// Maps a cube point to a unit vector in ℂ^d via Box-Muller: quasi-uniform
/// points become quasi-uniform directions on the sphere.
fn cube_to_state(u: &[f64], d: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(d);
    for i in 0..d {
        let u1 = u[2 * i].clamp(1e-12, 1.0);
        let u2 = u[2 * i + 1];
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        v[i] = Complex64::new(r * theta.cos(), r * theta.sin());
    }
    let norm = v.norm();
    if norm == 0.0 {
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    v.unscale_mut(norm);
    // Deterministic representative of the ray: first nonzero component real
    // positive.
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12) {
        let phase = (z / z.norm()).conj();
        v.iter_mut().for_each(|x| *x *= phase);
    }
    v
}

/// A mesh of `count` quasi-uniform pure states of one d-dimensional system.
pub fn state_mesh(d: usize, count: usize, stream: u64) -> Vec<DVector<Complex64>> {
    (0..count)
        .map(|k| cube_to_state(&kronecker_point(2 * d, k, stream), d))
        .collect()
}

/// Phase-minimized chordal distance between unit vectors:
/// `sqrt(2 (1 - |⟨u|v⟩|))`.
pub fn chordal_distance(u: &DVector<Complex64>, v: &DVector<Complex64>) -> f64 {
    let overlap = u.dotc(v).norm().min(1.0);
    (2.0 * (1.0 - overlap)).sqrt()
}

/// Derivative-free polish shared by the brute-force oracles: compass search
/// over the raw re/im coordinates of a set of unit vectors, renormalizing
/// after every move. The step halves when a sweep yields no improvement and
/// also after a bounded number of improving sweeps, so ridge-following
/// cannot pin the step at a coarse scale. Maximizes `objective` and returns
/// the best value found; `locals` is left at the best point.
pub fn compass_refine(
    locals: &mut [DVector<Complex64>],
    objective: impl Fn(&[DVector<Complex64>]) -> f64,
) -> f64 {
    let mut best = objective(locals);
    let mut step = 0.25f64;
    while step > 1e-8 {
        let mut rounds_at_step = 0usize;
        loop {
            rounds_at_step += 1;
            let mut improved = false;
            for site in 0..locals.len() {
                for coord in 0..locals[site].len() {
                    for &(dr, di) in &[(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                        let mut trial = locals[site].clone();
                        trial[coord] += Complex64::new(dr, di);
                        let norm = trial.norm();
                        if norm < 1e-12 {
                            continue;
                        }
                        trial.unscale_mut(norm);
                        let saved = std::mem::replace(&mut locals[site], trial);
                        let value = objective(locals);
                        if value > best + 1e-16 {
                            best = value;
                            improved = true;
                        } else {
                            locals[site] = saved;
                        }
                    }
                }
            }
            if !improved || rounds_at_step >= 60 {
                break;
            }
        }
        step *= 0.5;
    }
    best
}

/// Empirical covering-radius estimate of a mesh: the largest distance from a
/// probe state to its nearest mesh point, over `probes` quasi-random probes
/// drawn from a disjoint stream, inflated by a 1.25 safety factor.
pub fn covering_radius_estimate(mesh: &[DVector<Complex64>], d: usize, probes: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..probes {
        let probe = cube_to_state(&kronecker_point(2 * d, k, 777), d);
        let nearest = mesh
            .iter()
            .map(|m| chordal_distance(&probe, m))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    worst * 1.25
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_points_are_normalized_and_distinct() {
        let mesh = state_mesh(2, 32, 0);
        assert_eq!(mesh.len(), 32);
        for v in &mesh {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(chordal_distance(&mesh[0], &mesh[1]) > 1e-3);
    }

    #[test]
    fn covering_radius_shrinks_with_resolution() {
        let coarse = covering_radius_estimate(&state_mesh(2, 16, 0), 2, 64);
        let fine = covering_radius_estimate(&state_mesh(2, 256, 0), 2, 64);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
    }

    #[test]
    fn deterministic_given_stream() {
        let a = state_mesh(3, 10, 4);
        let b = state_mesh(3, 10, 4);
        assert_eq!(a, b);
    }
}
