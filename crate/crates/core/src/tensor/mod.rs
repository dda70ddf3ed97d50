//! Multi-qudit states and operators: dimension profiles, partial traces,
//! Schmidt decomposition, Haar sampling, and permutation/symmetric-subspace
//! operators.
//!
//! Index convention: a basis state of subsystems with local dimensions
//! `d_0, …, d_{n-1}` is the mixed-radix number with subsystem 0 as the most
//! significant digit. Subsystem indices are 0-based throughout.

mod density;
mod haar;
pub mod mesh;
mod perm;
mod schmidt;
mod state;

pub use density::{
    hermitian_part, hermiticity_defect, max_eigenvalue, min_eigenvalue, purity_of,
    trace_product_of, DensityOperator,
};
pub use haar::{haar_state, haar_unitary, substream_rng};
pub(crate) use haar::haar_vector;
pub use perm::{
    binomial, embed_on_sites, permutation_operator, permute_sites_operator, swap_operator,
    symmetric_projector, PermutationOperator, SymmetryDescriptor,
};
pub use schmidt::{schmidt, SchmidtData};
pub use state::{apply_on_sites, fidelity_trace_distance, PureState};

use crate::error::{Error, Result};

/// Local dimensions of an n-subsystem Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimsProfile {
    local_dims: Vec<usize>,
}

impl DimsProfile {
    /// Builds a profile; requires at least one subsystem and every local
    /// dimension >= 1.
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::InvalidArgument(
                "a dimension profile needs at least one subsystem".into(),
            ));
        }
        if local_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(
                "every local dimension must be >= 1".into(),
            ));
        }
        Ok(Self { local_dims })
    }

    /// Profile of `n` subsystems all of dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    /// Number of subsystems.
    pub fn n(&self) -> usize {
        self.local_dims.len()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn dim(&self, site: usize) -> usize {
        self.local_dims[site]
    }

    /// Total dimension `D = prod(d_i)`.
    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// Returns `Some(d)` when every subsystem has the same dimension `d`.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.local_dims[0];
        self.local_dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Mixed-radix strides: the basis index is `sum(digit[i] * stride[i])`
    /// with subsystem 0 most significant.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.local_dims[i + 1];
        }
        strides
    }

    /// Decomposes a flat basis index into per-subsystem digits.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.n()];
        let mut rem = index;
        for i in (0..self.n()).rev() {
            digits[i] = rem % self.local_dims[i];
            rem /= self.local_dims[i];
        }
        digits
    }

    /// Recomposes per-subsystem digits into the flat basis index.
    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.n());
        let mut index = 0usize;
        for (i, &x) in digits.iter().enumerate() {
            debug_assert!(x < self.local_dims[i]);
            index = index * self.local_dims[i] + x;
        }
        index
    }

    /// Profile restricted to the listed sites, in the given order.
    pub fn select(&self, sites: &[usize]) -> Result<Self> {
        let dims = sites
            .iter()
            .map(|&s| {
                self.local_dims
                    .get(s)
                    .copied()
                    .ok_or(Error::InvalidMask { index: s, n: self.n() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// Concatenation with another profile.
    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.local_dims.clone();
        dims.extend_from_slice(&other.local_dims);
        Self { local_dims: dims }
    }
}

/// A subset S of the subsystems {0, …, n-1}; the complement is always derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemMask {
    members: Vec<usize>,
    n: usize,
}

impl SubsystemMask {
    /// Builds a mask over `n` subsystems. Members are sorted and deduplicated;
    /// an index >= n is an invalid-mask error.
    pub fn new(members: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&m| m >= n) {
            return Err(Error::InvalidMask { index: bad, n });
        }
        Ok(Self { members, n })
    }

    /// Mask from the low `n` bits of `bits`; bit i selects subsystem i.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        let members = (0..n).filter(|i| bits >> i & 1 == 1).collect();
        Self { members, n }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
            n,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self { members: Vec::new(), n }
    }

    /// Members in ascending order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.n
    }

    pub fn contains(&self, site: usize) -> bool {
        self.members.binary_search(&site).is_ok()
    }

    /// The complement mask over the same subsystems.
    pub fn complement(&self) -> Self {
        let members = (0..self.n).filter(|s| !self.contains(*s)).collect();
        Self { members, n: self.n }
    }

    /// Union with another mask over the same profile.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "mask over {} subsystems vs mask over {}",
                self.n, other.n
            )));
        }
        Self::new(
            self.members.iter().chain(other.members.iter()).copied(),
            self.n,
        )
    }
}

/// A partition of {0, …, n-1} into k disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    /// Validates that the blocks are disjoint, nonempty, and cover all sites.
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &site in block {
                if site >= n {
                    return Err(Error::InvalidPartition(format!(
                        "block references site {site} but n = {n}"
                    )));
                }
                if seen[site] {
                    return Err(Error::InvalidPartition(format!(
                        "site {site} appears in two blocks"
                    )));
                }
                seen[site] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidPartition(
                "blocks do not cover every site".into(),
            ));
        }
        Ok(Self { blocks, n })
    }

    /// The all-singletons partition.
    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|s| vec![s]).collect(),
            n,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks k.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}
