//! Permutation operators on (ℂ^d)^{⊗k}, the symmetric-subspace projector,
//! and helpers for embedding/reordering multi-site operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DimsProfile;
use crate::error::{Error, Result};

/// What a [`PermutationOperator`] represents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetryDescriptor {
    /// P(π) for a permutation π of the k copies.
    Permutation(Vec<usize>),
    /// The projector onto Sym^k ℂ^d.
    SymmetricProjector { d: usize, k: usize },
}

/// A dense operator on (ℂ^d)^{⊗k}: either a permutation operator (a unitary
/// 0/1 matrix) or the symmetric projector (idempotent, Hermitian, of rank
/// C(d+k-1, k)).
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOperator {
    matrix: DMatrix<Complex64>,
    descriptor: SymmetryDescriptor,
}

impl PermutationOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn descriptor(&self) -> &SymmetryDescriptor {
        &self.descriptor
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }
}

/// P(π) = Σ |i_1,…,i_k⟩⟨i_{π(1)},…,i_{π(k)}| on (ℂ^d)^{⊗k}, with π 0-based.
pub fn permutation_operator(d: usize, perm: &[usize]) -> Result<PermutationOperator> {
    let k = perm.len();
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidArgument(format!(
                "not a permutation of 0..{k}: {perm:?}"
            )));
        }
        seen[p] = true;
    }
    let dims = DimsProfile::uniform(d, k)?;
    let total = dims.total_dim();
    let mut m = DMatrix::zeros(total, total);
    for col in 0..total {
        let i = dims.digits(col);
        let j: Vec<usize> = perm.iter().map(|&p| i[p]).collect();
        m[(dims.index(&j), col)] = Complex64::new(1.0, 0.0);
    }
    Ok(PermutationOperator {
        matrix: m,
        descriptor: SymmetryDescriptor::Permutation(perm.to_vec()),
    })
}

/// The swap operator F on two d-dimensional systems.
pub fn swap_operator(d: usize) -> DMatrix<Complex64> {
    permutation_operator(d, &[1, 0])
        .expect("valid permutation")
        .into_matrix()
}

/// Projector onto the symmetric subspace Sym^k ℂ^d: the average
/// `(1/k!) Σ_π P(π)` over all permutations of the k copies.
pub fn symmetric_projector(d: usize, k: usize) -> Result<PermutationOperator> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidArgument(
            "symmetric projector needs d >= 1 and k >= 1".into(),
        ));
    }
    let dims = DimsProfile::uniform(d, k)?;
    let total = dims.total_dim();
    let mut m = DMatrix::zeros(total, total);
    let mut count = 0usize;
    for_each_permutation(k, &mut |perm| {
        count += 1;
        for col in 0..total {
            let i = dims.digits(col);
            let j: Vec<usize> = perm.iter().map(|&p| i[p]).collect();
            m[(dims.index(&j), col)] += Complex64::new(1.0, 0.0);
        }
    });
    m.unscale_mut(count as f64);
    Ok(PermutationOperator {
        matrix: m,
        descriptor: SymmetryDescriptor::SymmetricProjector { d, k },
    })
}

/// Heap's algorithm, calling `f` with each permutation of 0..k.
fn for_each_permutation(k: usize, f: &mut impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    f(&items);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(&items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Binomial coefficient C(n, k); the rank of the symmetric projector is
/// C(d+k-1, k).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Embeds `op` (acting on the listed sites, in the listed order) into the full
/// space described by `dims`, acting as the identity elsewhere.
pub fn embed_on_sites(
    op: &DMatrix<Complex64>,
    sites: &[usize],
    dims: &DimsProfile,
) -> Result<DMatrix<Complex64>> {
    let sub = dims.select(sites)?;
    let sub_dim = sub.total_dim();
    if op.nrows() != sub_dim || op.ncols() != sub_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but the selected sites span dimension {}",
            op.nrows(),
            op.ncols(),
            sub_dim
        )));
    }
    let strides = dims.strides();
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|s| {
            sub.digits(s)
                .iter()
                .zip(sites)
                .map(|(&digit, &site)| digit * strides[site])
                .sum()
        })
        .collect();
    let rest: Vec<usize> = (0..dims.n()).filter(|s| !sites.contains(s)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&s| dims.dim(s)).collect();
    let rest_total: usize = rest_dims.iter().product();
    let total = dims.total_dim();
    let mut out = DMatrix::zeros(total, total);
    for ra in 0..rest_total {
        let mut base = 0usize;
        let mut rem = ra;
        for i in (0..rest.len()).rev() {
            base += (rem % rest_dims[i]) * strides[rest[i]];
            rem /= rest_dims[i];
        }
        for (r, &ro) in offsets.iter().enumerate() {
            for (c, &co) in offsets.iter().enumerate() {
                out[(base + ro, base + co)] = op[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Reorders the tensor factors of an operator. `new_order[i]` names the old
/// site that becomes site i of the result; the result's profile is
/// `dims.select(new_order)`.
pub fn permute_sites_operator(
    op: &DMatrix<Complex64>,
    dims: &DimsProfile,
    new_order: &[usize],
) -> Result<(DMatrix<Complex64>, DimsProfile)> {
    if new_order.len() != dims.n() {
        return Err(Error::InvalidArgument(format!(
            "ordering has {} entries for {} sites",
            new_order.len(),
            dims.n()
        )));
    }
    let mut seen = vec![false; dims.n()];
    for &s in new_order {
        if s >= dims.n() || seen[s] {
            return Err(Error::InvalidArgument(format!(
                "not a permutation of the sites: {new_order:?}"
            )));
        }
        seen[s] = true;
    }
    let total = dims.total_dim();
    if op.nrows() != total || op.ncols() != total {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but the profile spans {}",
            op.nrows(),
            op.ncols(),
            total
        )));
    }
    let new_dims = dims.select(new_order)?;
    let old_index = |new_digits: &[usize]| -> usize {
        let mut digits = vec![0usize; dims.n()];
        for (i, &old_site) in new_order.iter().enumerate() {
            digits[old_site] = new_digits[i];
        }
        dims.index(&digits)
    };
    let map: Vec<usize> = (0..total).map(|x| old_index(&new_dims.digits(x))).collect();
    let mut out = DMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(r, c)] = op[(map[r], map[c])];
        }
    }
    Ok((out, new_dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn swap_squares_to_identity() {
        let f = swap_operator(3);
        let id = DMatrix::identity(9, 9);
        assert!((&f * &f - id).norm() < 1e-14);
    }

    #[test]
    fn symmetric_projector_rank_examples() {
        // d=2, k=2: rank C(3,2) = 3
        let pi = symmetric_projector(2, 2).unwrap();
        let rank: f64 = pi.matrix().trace().re;
        assert_abs_diff_eq!(rank, 3.0, epsilon = 1e-12);
        assert_eq!(binomial(3, 2), 3);

        // k=1 gives the identity
        let pi1 = symmetric_projector(5, 1).unwrap();
        assert!((pi1.matrix() - DMatrix::identity(5, 5)).norm() < 1e-14);

        // d=3, k=3: rank C(5,3) = 10
        let pi33 = symmetric_projector(3, 3).unwrap();
        assert_abs_diff_eq!(pi33.matrix().trace().re, 10.0, epsilon = 1e-10);
    }

    #[test]
    fn symmetric_projector_is_idempotent() {
        let pi = symmetric_projector(2, 3).unwrap();
        let m = pi.matrix();
        assert!((m * m - m).norm() < 1e-12);
        assert!((m.adjoint() - m).norm() < 1e-14);
    }

    #[test]
    fn two_copy_projector_is_half_identity_plus_swap() {
        for d in [2, 3] {
            let pi = symmetric_projector(d, 2).unwrap();
            let expect = (DMatrix::identity(d * d, d * d) + swap_operator(d)).unscale(2.0);
            assert!((pi.matrix() - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_acts_as_identity_elsewhere() {
        let dims = DimsProfile::uniform(2, 3).unwrap();
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::default(),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
            ],
        );
        let full = embed_on_sites(&x, &[1], &dims).unwrap();
        // should equal I ⊗ X ⊗ I
        let id = DMatrix::identity(2, 2);
        let expect = id.kronecker(&x).kronecker(&id);
        assert!((full - expect).norm() < 1e-14);
    }

    #[test]
    fn permute_sites_round_trip() {
        let dims = DimsProfile::new(vec![2, 3]).unwrap();
        let a = DMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        let b = DMatrix::from_fn(3, 3, |i, j| Complex64::new(0.0, (i * 3 + j) as f64));
        let ab = a.kronecker(&b);
        let (ba, new_dims) = permute_sites_operator(&ab, &dims, &[1, 0]).unwrap();
        assert_eq!(new_dims.local_dims(), &[3, 2]);
        assert!((ba - b.kronecker(&a)).norm() < 1e-14);
    }
}
