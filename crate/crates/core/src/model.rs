//! Closed-form probabilities of the general random intersection graph.
//!
//! Binomial ratios are evaluated as sums of `log1p` terms and exponentiated
//! at the end, so `P` may be far beyond the range where `C(P, K)` fits in any
//! machine integer.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::params::ModelParams;
use crate::{Error, Result};

/// `ln(C(P - removed, take) / C(P, take))`, or `-inf` when the ratio is zero.
///
/// The ratio is symmetric in `(removed, take)`, so the shorter product is used.
fn ln_no_overlap(pool: u64, removed: u64, take: u64) -> Result<f64> {
    for k in [removed, take] {
        if k > pool {
            return Err(Error::SubsetTooLarge { k, pool });
        }
    }
    if removed == 0 || take == 0 {
        return Ok(0.0);
    }
    if pool - removed < take {
        return Ok(f64::NEG_INFINITY);
    }
    let (terms, removed) = if take <= removed { (take, removed) } else { (removed, take) };
    let removed = removed as f64;
    let sum = (0..terms).map(|t| libm::log1p(-removed / (pool - t) as f64)).sum();
    Ok(sum)
}

/// Probability that a uniform `kj`-subset of a `pool`-object pool misses a
/// fixed `ki`-subset: `C(P - Ki, Kj) / C(P, Kj)`.
pub fn no_overlap_ratio(pool: u64, ki: u64, kj: u64) -> Result<f64> {
    let ln = ln_no_overlap(pool, ki, kj)?;
    Ok(if ln == 0.0 { 1.0 } else { libm::exp(ln) })
}

fn overlap_prob(pool: u64, ki: u64, kj: u64) -> Result<f64> {
    // -expm1 keeps relative precision when the overlap probability is tiny.
    let ln = ln_no_overlap(pool, ki, kj)?;
    Ok(if ln == f64::NEG_INFINITY { 1.0 } else { -libm::expm1(ln) })
}

fn check_group(params: &ModelParams, index: usize) -> Result<()> {
    if index >= params.groups() {
        return Err(Error::GroupIndex { index, groups: params.groups() });
    }
    Ok(())
}

fn require_n(params: &ModelParams, needed: usize) -> Result<()> {
    if params.n() < needed {
        return Err(Error::TooFewVertices { needed, n: params.n() });
    }
    Ok(())
}

/// Edge probability between a group-`i` vertex and a group-`j` vertex.
pub fn pairwise_edge_prob(params: &ModelParams, i: usize, j: usize) -> Result<f64> {
    check_group(params, i)?;
    check_group(params, j)?;
    overlap_prob(params.pool(), params.k()[i], params.k()[j])
}

/// The full `m x m` matrix of [`pairwise_edge_prob`].
pub fn edge_prob_matrix(params: &ModelParams) -> Vec<Vec<f64>> {
    let m = params.groups();
    let mut p = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = pairwise_edge_prob(params, i, j).expect("indices in range");
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    p
}

/// Probability `b_i` that a group-`i` vertex is adjacent to a random other vertex.
pub fn group_edge_prob(params: &ModelParams, i: usize) -> Result<f64> {
    check_group(params, i)?;
    let mut b = 0.0;
    for (j, &aj) in params.a().iter().enumerate() {
        b += aj * pairwise_edge_prob(params, i, j)?;
    }
    // weights summing to 1 + ulp can push a certain edge past one
    Ok(b.min(1.0))
}

fn group_edge_probs(params: &ModelParams) -> Vec<f64> {
    (0..params.groups()).map(|i| group_edge_prob(params, i).expect("index in range")).collect()
}

/// Unconditional probability that two distinct vertices are adjacent.
pub fn edge_prob(params: &ModelParams) -> f64 {
    params.a().iter().zip(group_edge_probs(params)).map(|(ai, bi)| ai * bi).sum()
}

/// `n * b - ln n`.
pub fn beta_for(n: usize, b1: f64) -> f64 {
    let n = n as f64;
    n * b1 - libm::log(n)
}

/// Deviation `beta` defined by `b_1 = (ln n + beta) / n`.
pub fn beta(params: &ModelParams) -> Result<f64> {
    require_n(params, 2)?;
    Ok(beta_for(params.n(), group_edge_prob(params, 0)?))
}

/// `(1 - b)^(n - 1)`, evaluated as `exp((n - 1) * log1p(-b))`.
fn survival(b: f64, n: usize) -> f64 {
    libm::exp((n - 1) as f64 * libm::log1p(-b))
}

/// Expected number of isolated vertices and of isolated group-0 vertices:
/// `n * sum_i a_i (1 - b_i)^(n-1)` and `n * a_1 (1 - b_1)^(n-1)`.
pub fn expected_isolated(params: &ModelParams) -> Result<(f64, f64)> {
    require_n(params, 2)?;
    let n = params.n();
    let b = group_edge_probs(params);
    let terms: Vec<f64> = params.a().iter().zip(&b).map(|(ai, &bi)| ai * survival(bi, n)).collect();
    let nf = n as f64;
    let total = nf * terms.iter().sum::<f64>();
    let group1 = nf * terms[0];
    Ok((total, group1.min(total)))
}

/// Base of the second-moment ratio before it is raised to `n - 2`:
///
/// `sum_l a_l C(P - 2K_1, K_l)/C(P, K_l)  /  (sum_l a_l C(P - K_1, K_l)/C(P, K_l))^2`
///
/// Accepts `K_1 = 0`, for which the base is one. Returns the natural
/// logarithm of the base (`-inf` when the numerator vanishes).
pub fn ln_cross_moment_base(pool: u64, a: &[f64], k: &[u64]) -> Result<f64> {
    let k1 = *k.first().ok_or(Error::InvalidParams("at least one group is required"))?;
    let double = 2 * k1;
    if double > pool {
        return Err(Error::RegimeViolation { double_k1: double, pool });
    }
    let mut both = 0.0;
    let mut one = 0.0;
    for (&al, &kl) in a.iter().zip(k) {
        both += al * libm::exp(ln_no_overlap(pool, double, kl)?);
        one += al * libm::exp(ln_no_overlap(pool, k1, kl)?);
    }
    Ok(libm::log(both) - 2.0 * libm::log(one))
}

/// Upper bound on `E[psi_1 psi_2] / E[psi_1]^2` for the pair of group-0
/// isolation indicators, in ratio form.
pub fn cross_moment_ratio(params: &ModelParams) -> Result<f64> {
    require_n(params, 3)?;
    let ln_base = ln_cross_moment_base(params.pool(), params.a(), params.k())?;
    Ok(libm::exp((params.n() - 2) as f64 * ln_base))
}

fn round_half_up(x: f64) -> u64 {
    libm::floor(x + 0.5) as u64
}

/// Key ring vector for a given `K_1`: `K_j = min(P, max(K_1, round(r_j K_1)))`.
pub fn scaled_key_rings(k1: u64, ratios: &[f64], pool: u64) -> Vec<u64> {
    ratios.iter().map(|&r| round_half_up(r * k1 as f64).max(k1).min(pool)).collect()
}

/// Smallest key ring vector (indexed by `K_1`, other groups following
/// `ratios`) whose `beta` reaches `target_beta`.
///
/// Bisection over `K_1 in [1, P]`; relies on `b_1` being nondecreasing in `K_1`.
pub fn solve_k1(n: usize, pool: u64, a: &[f64], ratios: &[f64], target_beta: f64) -> Result<Vec<u64>> {
    if !target_beta.is_finite() {
        return Err(Error::InvalidParams("target beta must be finite"));
    }
    if ratios.len() != a.len() {
        return Err(Error::InvalidParams("ratios and a must have the same length"));
    }
    if ratios.first() != Some(&1.0) {
        return Err(Error::InvalidParams("ratios[0] must be 1"));
    }
    if ratios.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidParams("ratios must be finite and nondecreasing"));
    }
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, n });
    }
    let beta_at = |k1: u64| -> Result<f64> {
        let params = ModelParams::new(n, a.to_vec(), scaled_key_rings(k1, ratios, pool), pool)?;
        beta(&params)
    };

    let best = beta_at(pool)?;
    if best < target_beta {
        return Err(Error::Unachievable { target: target_beta, best });
    }
    let (mut lo, mut hi) = (1u64, pool);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if beta_at(mid)? >= target_beta {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(scaled_key_rings(lo, ratios, pool))
}

/// Every closed-form quantity of one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactQuantities {
    pub p: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub edge_prob: f64,
    pub beta: f64,
    pub expected_isolated: f64,
    pub expected_group1_isolated: f64,
    /// `None` when `n < 3` or `2 K_1 > P`.
    pub cross_moment_ratio: Option<f64>,
}

impl ExactQuantities {
    pub fn compute(params: &ModelParams) -> Result<Self> {
        let (expected_isolated, expected_group1_isolated) = expected_isolated(params)?;
        Ok(ExactQuantities {
            p: edge_prob_matrix(params),
            b: group_edge_probs(params),
            edge_prob: edge_prob(params),
            beta: beta(params)?,
            expected_isolated,
            expected_group1_isolated,
            cross_moment_ratio: cross_moment_ratio(params).ok(),
        })
    }
}
