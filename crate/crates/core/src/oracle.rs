//! Brute-force ground truth by exhaustive enumeration, in exact rationals.
//!
//! Nothing here touches the closed forms in [`crate::model`]. The only
//! shared code is the graph analysis of [`crate::graph`], which is checked
//! separately against an adjacency-matrix search.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::weights;
use crate::graph::analyze;
use crate::params::ModelParams;
use crate::sampler::GraphSample;
use crate::{Error, Result};

/// Hard cap on the number of enumerated configurations.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step.
        c = match c.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// All `k`-subsets of `0..pool` in lexicographic order.
pub fn subsets(pool: u64, k: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if k > pool {
        return out;
    }
    let mut cur: Vec<u64> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let mut i = k as usize;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < pool - k + i as u64 {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k as usize {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn intersects(x: &[u64], y: &[u64]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn check_budget(required: u128) -> Result<()> {
    if required > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget { required, budget: ENUMERATION_BUDGET });
    }
    Ok(())
}

/// Fraction of ordered (ki-subset, kj-subset) pairs that intersect.
pub fn enumerate_pair_prob(pool: u64, ki: u64, kj: u64) -> Result<BigRational> {
    for k in [ki, kj] {
        if k > pool {
            return Err(Error::SubsetTooLarge { k, pool });
        }
    }
    check_budget(binomial(pool, ki).saturating_mul(binomial(pool, kj)))?;
    let left = subsets(pool, ki);
    let right = subsets(pool, kj);
    let hits: u64 = left.iter().map(|x| right.iter().filter(|y| intersects(x, y)).count() as u64).sum();
    let total = (left.len() * right.len()) as u64;
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

/// Exact event probabilities of one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct EventProbs {
    pub p_connected: BigRational,
    pub p_no_isolated: BigRational,
    pub expected_isolated: BigRational,
}

/// Sums over every joint (group, object set) assignment of all `n`
/// vertices, weighting each by `prod_x a_{g_x} / C(P, K_{g_x})`.
pub fn enumerate_event_probs(params: &ModelParams) -> Result<EventProbs> {
    let n = params.n();
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, n });
    }
    let per_vertex = (params.groups() as u128).saturating_mul(binomial(params.pool(), params.k_max()));
    let required = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(per_vertex)).unwrap_or(u128::MAX);
    check_budget(required)?;

    let mut options: Vec<(usize, Vec<u64>, BigRational)> = Vec::new();
    for (g, ag) in weights(params).iter().enumerate() {
        let sets = subsets(params.pool(), params.k()[g]);
        let w = ag / BigRational::from_integer(BigInt::from(sets.len()));
        options.extend(sets.into_iter().map(|s| (g, s, w.clone())));
    }

    let mut p_connected = BigRational::zero();
    let mut p_no_isolated = BigRational::zero();
    let mut expected_isolated = BigRational::zero();
    let mut choice = vec![0usize; n];
    loop {
        let groups = choice.iter().map(|&c| options[c].0).collect();
        let sets = choice.iter().map(|&c| options[c].1.clone()).collect();
        let sample = GraphSample::new(groups, sets, params.fingerprint())?;
        let stats = analyze(&sample)?;
        let weight = choice.iter().fold(BigRational::one(), |acc, &c| acc * &options[c].2);
        if stats.connected {
            p_connected += &weight;
        }
        if stats.isolated_count == 0 {
            p_no_isolated += &weight;
        }
        expected_isolated += weight * BigRational::from_integer(BigInt::from(stats.isolated_count));

        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(EventProbs { p_connected, p_no_isolated, expected_isolated });
            }
            choice[pos] += 1;
            if choice[pos] < options.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
