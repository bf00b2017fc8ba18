//! Core of the general random intersection graph toolkit.
//!
//! A graph `G(n, a, K, P)` has `n` vertices. Each vertex joins group `i` with
//! probability `a[i]` and then draws a uniform `K[i]`-subset of an object pool
//! of size `P`. Two vertices are adjacent when their subsets intersect.
//!
//! This crate is `no_std` (it needs `alloc`). It carries everything that is a
//! pure function of its inputs:
//!
//! * [`params`]: validated model parameters.
//! * [`model`]: closed-form edge and isolation probabilities, the deviation
//!   `beta`, the second-moment ratio and the `K_1` solver.
//! * [`regime`]: advisory diagnostics and the threshold-regime classifier.
//! * [`sampler`]: seeded, counter-based realization of graphs.
//! * [`graph`]: connectivity and isolation on a realized graph, without ever
//!   materializing the edge set.
//! * [`exact`] and [`oracle`]: arbitrary-precision rational ground truth for
//!   tiny instances.
//!
//! Group indices are zero-based throughout: group `0` is the group with the
//! smallest key ring.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dsu;
pub mod exact;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod params;
pub mod regime;
pub mod sampler;

pub use graph::{analyze, build_inverted_index, connectivity, isolation_counts, InvertedIndex, TrialStats};
pub use model::{
    beta, cross_moment_ratio, edge_prob, expected_isolated, group_edge_prob, no_overlap_ratio, pairwise_edge_prob,
    solve_k1, ExactQuantities,
};
pub use params::ModelParams;
pub use regime::{classify_regime, diagnostics, AdvisoryBounds, Regime, RegimeDiagnostics, RegimeFlag};
pub use sampler::{sample_graph, GraphSample, SeedSpec};

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("group probabilities must sum to 1 (got {sum})")]
    ProbabilitySum { sum: f64 },
    #[error("key ring sizes must satisfy 1 <= K_1 <= ... <= K_m <= P (violated at group {index})")]
    KeyRingOrder { index: usize },
    #[error("subset size {k} exceeds pool size {pool}")]
    SubsetTooLarge { k: u64, pool: u64 },
    #[error("group index {index} out of range for {groups} groups")]
    GroupIndex { index: usize, groups: usize },
    #[error("operation needs n >= {needed}, got n = {n}")]
    TooFewVertices { needed: usize, n: usize },
    #[error("regime violation: 2*K_1 = {double_k1} exceeds pool size {pool}")]
    RegimeViolation { double_k1: u64, pool: u64 },
    #[error("target beta {target} unachievable: K = (P, ..., P) only reaches {best}")]
    Unachievable { target: f64, best: f64 },
    #[error("enumeration of {required} configurations exceeds budget of {budget}")]
    EnumerationBudget { required: u128, budget: u128 },
    #[error("invalid graph sample: {0}")]
    InvalidSample(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
