//! Haar-distributed states and unitaries with deterministic seeding.
//!
//! Every randomized operation in this crate takes an explicit seed; callers
//! that fan work out across shots, samples or restarts derive one substream
//! per item so results are independent of worker count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::{DimsProfile, PureState};

/// Independent RNG for item `index` of the stream labelled `seed`.
pub fn substream_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random pure state: a complex-Gaussian vector, normalized.
/// Identical seeds give bit-identical output.
pub fn haar_state(dims: &DimsProfile, seed: u64) -> PureState {
    let mut rng = substream_rng(seed, 0);
    haar_state_with(dims, &mut rng)
}

pub fn haar_state_with(dims: &DimsProfile, rng: &mut impl Rng) -> PureState {
    let amps = haar_vector(dims.total_dim(), rng);
    PureState::new(amps, dims.clone()).expect("normalized by construction")
}

/// Haar-random unit vector in dimension `d`.
pub fn haar_vector(d: usize, rng: &mut impl Rng) -> DVector<Complex64> {
    let mut v = DVector::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v.unscale_mut(norm);
    v
}

/// Haar-random unitary on dimension `d`: QR of a complex Ginibre matrix with
/// the diagonal-phase correction. Naive orthonormalization alone is biased;
/// multiplying Q by diag(r_ii/|r_ii|) restores exact Haar distribution.
pub fn haar_unitary(d: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = substream_rng(seed, 0);
    haar_unitary_with(d, &mut rng)
}

pub fn haar_unitary_with(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..d {
        let rii = r[(i, i)];
        let phase = if rii.norm() > 0.0 {
            rii / rii.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..d {
            q[(row, i)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn states_are_normalized() {
        let dims = DimsProfile::new(vec![2, 3]).unwrap();
        for seed in 0..20 {
            let psi = haar_state(&dims, seed);
            assert_abs_diff_eq!(psi.amplitudes().norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_dimensional_state_is_unit_modulus() {
        let dims = DimsProfile::uniform(1, 1).unwrap();
        let psi = haar_state(&dims, 7);
        assert_abs_diff_eq!(psi.amplitudes()[0].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn seeding_is_deterministic_and_sensitive() {
        let dims = DimsProfile::uniform(2, 2).unwrap();
        let a = haar_state(&dims, 42);
        let b = haar_state(&dims, 42);
        let c = haar_state(&dims, 43);
        assert_eq!(a.amplitudes(), b.amplitudes());
        assert_ne!(a.amplitudes(), c.amplitudes());

        let u = haar_unitary(3, 5);
        let v = haar_unitary(3, 5);
        let w = haar_unitary(3, 6);
        assert_eq!(u, v);
        assert_ne!(u, w);
    }

    #[test]
    fn unitary_is_unitary() {
        for seed in 0..10 {
            let u = haar_unitary(4, seed);
            let defect = (u.adjoint() * &u - DMatrix::identity(4, 4)).norm();
            assert!(defect < 1e-12, "defect {defect}");
        }
    }

    #[test]
    fn substreams_are_independent() {
        let mut a = substream_rng(1, 0);
        let mut b = substream_rng(1, 1);
        let xa: f64 = a.gen();
        let xb: f64 = b.gen();
        assert_ne!(xa, xb);
    }
}
