//! The correspondence between two-party accept operators and trace
//! non-increasing channels: `‖N‖_{1→∞} = max { tr ρM : ρ separable }`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{KrausChannel, Measurement};
use crate::error::{Error, Result};
use crate::tensor::hermitian_part;

/// The default forward construction `M = VV†` with `V = Σ_i N_i ⊗ |i⟩`, on
/// party dims `(d_out, kraus_count)`. Its separable maximum equals the
/// channel's 1→∞ norm: the optimal output direction and Kraus-index vector
/// factor through the second party.
pub fn channel_to_measurement(channel: &KrausChannel) -> Result<Measurement> {
    let d1 = channel.output_dim();
    let din = channel.input_dim();
    let k = channel.kraus_count();
    let mut v = DMatrix::<Complex64>::zeros(d1 * k, din);
    for (i, op) in channel.kraus_ops().iter().enumerate() {
        for a in 0..d1 {
            for b in 0..din {
                v[(a * k + i, b)] = op[(a, b)];
            }
        }
    }
    let m = &v * v.adjoint();
    Measurement::new(hermitian_part(&m), vec![d1, k])
}

/// The cross-term-free construction `M = Σ_i N_i N_i† ⊗ |i⟩⟨i|`, block
/// diagonal in the Kraus index. Computed alongside the default so the two
/// can be compared; its separable maximum can fall below the channel norm
/// (the fully depolarising qubit gives 1/4 against a norm of 1/2).
pub fn channel_to_measurement_printed(channel: &KrausChannel) -> Result<Measurement> {
    let d1 = channel.output_dim();
    let k = channel.kraus_count();
    let mut m = DMatrix::<Complex64>::zeros(d1 * k, d1 * k);
    for (i, op) in channel.kraus_ops().iter().enumerate() {
        let block = op * op.adjoint();
        for a in 0..d1 {
            for b in 0..d1 {
                m[(a * k + i, b * k + i)] = block[(a, b)];
            }
        }
    }
    Measurement::new(hermitian_part(&m), vec![d1, k])
}

/// The backward construction: the channel `N(X) = tr_2 (M^{1/2} X M^{1/2})`
/// with Kraus operators `K_j = (I ⊗ ⟨j|) M^{1/2}` restricted to the support
/// of M. Its 1→∞ norm equals the separable maximum of M.
pub fn measurement_to_channel(m: &Measurement) -> Result<KrausChannel> {
    if m.parties() != 2 {
        return Err(Error::UnsupportedProfile(format!(
            "the backward construction needs exactly two parties, got {}",
            m.parties()
        )));
    }
    let (d1, d2) = (m.party_dims()[0], m.party_dims()[1]);
    let eigen = SymmetricEigen::new(hermitian_part(m.matrix()));
    let support_tol = 1e-12;

    // M^{1/2} columns restricted to supp M: sqrt(M) S with S the support
    // isometry, assembled directly from the eigendecomposition.
    let mut support_cols: Vec<usize> = Vec::new();
    for (i, &eig) in eigen.eigenvalues.iter().enumerate() {
        if eig > support_tol {
            support_cols.push(i);
        }
    }
    if support_cols.is_empty() {
        return Err(Error::InvalidArgument(
            "measurement has empty support".into(),
        ));
    }
    let rank = support_cols.len();
    let total = d1 * d2;
    // sqrt_restricted[(x, r)] = Σ_i sqrt(λ_i) u_i[x] conj(u_i[support_r])
    // — equivalently sqrt(M) times the support isometry.
    let mut sqrt_restricted = DMatrix::<Complex64>::zeros(total, rank);
    for (r, &col) in support_cols.iter().enumerate() {
        let root = eigen.eigenvalues[col].max(0.0).sqrt();
        for x in 0..total {
            sqrt_restricted[(x, r)] += eigen.eigenvectors[(x, col)] * root;
        }
    }
    let ops: Vec<DMatrix<Complex64>> = (0..d2)
        .map(|j| {
            DMatrix::from_fn(d1, rank, |a, b| sqrt_restricted[(a * d2 + j, b)])
        })
        .collect();
    KrausChannel::new(ops)
}

/// A random trace-preserving channel with `k` Kraus operators:
/// Gaussian raws `G_i` normalized as `N_i = G_i S^{-1/2}` with
/// `S = Σ G_i†G_i`. Deterministic given the seed.
pub fn random_channel(d_out: usize, d_in: usize, k: usize, seed: u64) -> Result<KrausChannel> {
    use rand::Rng;
    if d_out == 0 || d_in == 0 || k == 0 {
        return Err(Error::InvalidArgument(
            "channel dimensions and Kraus count must be >= 1".into(),
        ));
    }
    let mut rng = crate::tensor::substream_rng(seed, 0);
    let raw: Vec<DMatrix<Complex64>> = (0..k)
        .map(|_| {
            DMatrix::from_fn(d_out, d_in, |_, _| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
        })
        .collect();
    let mut gram = DMatrix::<Complex64>::zeros(d_in, d_in);
    for g in &raw {
        gram += g.adjoint() * g;
    }
    let eigen = SymmetricEigen::new(hermitian_part(&gram));
    let mut inv_root = DMatrix::<Complex64>::zeros(d_in, d_in);
    for i in 0..d_in {
        let scale = 1.0 / eigen.eigenvalues[i].max(1e-30).sqrt();
        for a in 0..d_in {
            for b in 0..d_in {
                inv_root[(a, b)] +=
                    eigen.eigenvectors[(a, i)] * eigen.eigenvectors[(b, i)].conj() * scale;
            }
        }
    }
    KrausChannel::new(raw.into_iter().map(|g| g * &inv_root).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product_approx::OptimizerOptions;
    use crate::qma::{min_output_infinity, sep_maximize, separable_form_measurement};
    use approx::assert_abs_diff_eq;

    fn random_channel(d_out: usize, d_in: usize, k: usize, seed: u64) -> KrausChannel {
        super::random_channel(d_out, d_in, k, seed).unwrap()
    }

    #[test]
    fn identity_channel_gives_rank_one_block() {
        let m = channel_to_measurement(&KrausChannel::identity(2)).unwrap();
        assert_eq!(m.party_dims(), &[2, 1]);
        let sep = sep_maximize(&m, &OptimizerOptions::default()).unwrap();
        assert_abs_diff_eq!(sep.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn depolarising_forward_values() {
        let channel = KrausChannel::fully_depolarising_qubit();
        let default = channel_to_measurement(&channel).unwrap();
        let printed = channel_to_measurement_printed(&channel).unwrap();
        let opts = OptimizerOptions::default();
        let sep_default = sep_maximize(&default, &opts).unwrap().value;
        let sep_printed = sep_maximize(&printed, &opts).unwrap().value;
        assert_abs_diff_eq!(sep_default, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(sep_printed, 0.25, epsilon = 1e-6);
        let norm = min_output_infinity(&channel, &opts).unwrap().value;
        assert_abs_diff_eq!(sep_default, norm, epsilon = 1e-8);
    }

    #[test]
    fn kraus_scaling_scales_sep_value_quadratically() {
        let channel = random_channel(2, 2, 2, 31);
        let t = 0.7;
        let scaled = KrausChannel::new(
            channel
                .kraus_ops()
                .iter()
                .map(|op| op.map(|z| z * t))
                .collect(),
        )
        .unwrap();
        let opts = OptimizerOptions::default();
        let a = sep_maximize(&channel_to_measurement(&channel).unwrap(), &opts)
            .unwrap()
            .value;
        let b = sep_maximize(&channel_to_measurement(&scaled).unwrap(), &opts)
            .unwrap()
            .value;
        assert_abs_diff_eq!(b, t * t * a, epsilon = 1e-8);
    }

    #[test]
    fn forward_matches_channel_norm_on_random_channels() {
        let opts = OptimizerOptions::default();
        for seed in 0..8 {
            let channel = random_channel(2, 2, 3, 100 + seed);
            let m = channel_to_measurement(&channel).unwrap();
            let sep = sep_maximize(&m, &opts).unwrap().value;
            let norm = min_output_infinity(&channel, &opts).unwrap().value;
            assert_abs_diff_eq!(sep, norm, epsilon = 1e-6);
        }
    }

    #[test]
    fn backward_identity_gives_partial_trace_kraus() {
        let m = Measurement::identity(vec![2, 2]).unwrap();
        let channel = measurement_to_channel(&m).unwrap();
        assert_eq!(channel.kraus_count(), 2);
        assert_eq!(channel.output_dim(), 2);
        let opts = OptimizerOptions::default();
        let norm = min_output_infinity(&channel, &opts).unwrap().value;
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn backward_matches_sep_value() {
        let opts = OptimizerOptions::default();
        // Bell projector: both sides give 1/2.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = nalgebra::DVector::<Complex64>::zeros(4);
        v[0] = Complex64::new(inv, 0.0);
        v[3] = Complex64::new(inv, 0.0);
        let bell = DMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj());
        let bell = Measurement::new(bell, vec![2, 2]).unwrap();
        let channel = measurement_to_channel(&bell).unwrap();
        let norm = min_output_infinity(&channel, &opts).unwrap().value;
        assert_abs_diff_eq!(norm, 0.5, epsilon = 1e-6);

        for seed in 0..6 {
            let m = separable_form_measurement(&[2, 2], 4, 200 + seed).unwrap();
            let sep = sep_maximize(&m, &opts).unwrap().value;
            let norm = min_output_infinity(&measurement_to_channel(&m).unwrap(), &opts)
                .unwrap()
                .value;
            assert_abs_diff_eq!(sep, norm, epsilon = 1e-6);
        }
    }
}
