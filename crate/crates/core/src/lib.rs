//! Product-state testing for multipartite quantum states at desk scale.
//!
//! The crate implements, with exact and sampled evaluators plus independent
//! oracles:
//!
//! - the two-copy product test and its partition and k-copy generalisations,
//!   with the closed subset-sum form `2^{-n} Σ_S tr ρ_S²`;
//! - the qudit depolarising channel, its output purity in direct and closed
//!   form, and the stability bound on near-maximal output purity;
//! - closest-product-state (geometric-measure) optimization by alternating
//!   contractions with Haar restarts, plus a grid brute-force oracle;
//! - the product test for unitaries via the Choi vector and nearest
//!   product-unitary extraction by polar decomposition;
//! - the separable-measurement protocol harness: seesaw optimization over
//!   product witnesses, the composite two-prover accept operator, repetition
//!   and threshold amplification, and the measurement/channel correspondence
//!   behind the 1→∞ norm.
//!
//! Everything randomized takes an explicit seed and is deterministic given
//! it; all values are immutable after construction and safe to share across
//! threads.

pub mod depolarising;
pub mod error;
pub mod product_approx;
pub mod qma;
pub mod tensor;
pub mod tol;
pub mod unitary_test;
pub mod verify;

pub use error::{Error, Result};
pub use tol::Budget;
