//! Seeded realization of `G(n, a, K, P)`.
//!
//! Every trial owns its generator. The generator seed is a pure function of
//! `(master_seed, trial_index)`, so trial `t` can be produced without
//! touching trials `0..t` and trials can run on any number of threads.
//! Samples are reproducible within this implementation only; the underlying
//! random streams are not a cross-language contract.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::params::ModelParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SeedSpec { master_seed, trial_index }
    }

    /// Seed of the per-trial generator:
    /// `splitmix64(master_seed + splitmix64(trial_index))` with wrapping add.
    pub fn derived_seed(&self) -> u64 {
        splitmix64(self.master_seed.wrapping_add(splitmix64(self.trial_index)))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derived_seed())
    }
}

/// SplitMix64 step: golden-ratio increment followed by the avalanche finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One realized graph. Edges stay implicit: vertices `x` and `y` are
/// adjacent iff `object_sets[x]` and `object_sets[y]` intersect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSample {
    groups: Vec<usize>,
    object_sets: Vec<Vec<u64>>,
    #[serde(skip)]
    params_hash: u64,
}

impl GraphSample {
    /// Checks that there is one group per set and that every set is strictly
    /// increasing.
    pub fn new(groups: Vec<usize>, object_sets: Vec<Vec<u64>>, params_hash: u64) -> Result<Self> {
        if groups.len() != object_sets.len() {
            return Err(Error::InvalidSample("one group id per object set is required"));
        }
        if object_sets.iter().any(|s| s.windows(2).any(|w| w[0] >= w[1])) {
            return Err(Error::InvalidSample("object sets must be strictly increasing"));
        }
        Ok(GraphSample { groups, object_sets, params_hash })
    }

    /// A sample with every vertex in group 0 and no params fingerprint.
    pub fn from_sets(object_sets: Vec<Vec<u64>>) -> Result<Self> {
        let groups = alloc::vec![0; object_sets.len()];
        GraphSample::new(groups, object_sets, 0)
    }

    pub fn n(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn object_sets(&self) -> &[Vec<u64>] {
        &self.object_sets
    }

    pub fn params_hash(&self) -> u64 {
        self.params_hash
    }

    /// Checks the sample against the parameters that supposedly produced it.
    pub fn is_consistent_with(&self, params: &ModelParams) -> bool {
        self.n() == params.n()
            && self.groups.iter().zip(&self.object_sets).all(|(&g, set)| {
                g < params.groups()
                    && set.len() as u64 == params.k()[g]
                    && set.last().is_none_or(|&last| last < params.pool())
            })
    }
}

/// Inverse-CDF group draw: the least `i` with `u < a_0 + ... + a_i`. The last
/// group absorbs any rounding shortfall in the cumulative sum.
pub fn assign_group(a: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        cumulative += ai;
        if u < cumulative {
            return i;
        }
    }
    a.len() - 1
}

/// Uniform `k`-subset of `0..pool`, sorted. Floyd's algorithm: memory is
/// `O(k)` regardless of `pool`.
pub fn sample_object_set<R: Rng + ?Sized>(pool: u64, k: u64, rng: &mut R) -> Result<Vec<u64>> {
    if k > pool {
        return Err(Error::SubsetTooLarge { k, pool });
    }
    if k > SMALL_RING {
        let mut chosen = BTreeSet::new();
        for j in (pool - k)..pool {
            let t = rng.gen_range(0..=j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        return Ok(chosen.into_iter().collect());
    }
    // small rings: a linear membership scan beats tree allocation
    let mut chosen = Vec::with_capacity(k as usize);
    for j in (pool - k)..pool {
        let t = rng.gen_range(0..=j);
        chosen.push(if chosen.contains(&t) { j } else { t });
    }
    chosen.sort_unstable();
    Ok(chosen)
}

const SMALL_RING: u64 = 32;

pub fn sample_graph(params: &ModelParams, seed: SeedSpec) -> GraphSample {
    let mut rng = seed.rng();
    let n = params.n();
    let mut groups = Vec::with_capacity(n);
    let mut object_sets = Vec::with_capacity(n);
    for _ in 0..n {
        let g = assign_group(params.a(), rng.gen::<f64>());
        let set = sample_object_set(params.pool(), params.k()[g], &mut rng).expect("K <= P by construction");
        groups.push(g);
        object_sets.push(set);
    }
    GraphSample { groups, object_sets, params_hash: params.fingerprint() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn inverse_cdf() {
        assert_eq!(assign_group(&[1.0], 0.0), 0);
        assert_eq!(assign_group(&[1.0], 0.999_999), 0);
        assert_eq!(assign_group(&[0.5, 0.5], 0.25), 0);
        assert_eq!(assign_group(&[0.5, 0.5], 0.75), 1);
        assert_eq!(assign_group(&[0.5, 0.5], 0.5), 1);
        // rounding shortfall lands in the last bucket
        assert_eq!(assign_group(&[0.3, 0.3, 0.3], 0.95), 2);
    }

    #[test]
    fn group_frequency() {
        let mut rng = SeedSpec::new(11, 0).rng();
        let draws = 100_000;
        let hits = (0..draws).filter(|_| assign_group(&[0.2, 0.8], rng.gen::<f64>()) == 0).count();
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.2).abs() <= 0.01, "{freq}");
    }

    #[test]
    fn full_pool_and_oversize() {
        let mut rng = SeedSpec::new(1, 2).rng();
        assert_eq!(sample_object_set(6, 6, &mut rng).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(sample_object_set(6, 7, &mut rng), Err(Error::SubsetTooLarge { k: 7, pool: 6 }));
        assert!(sample_object_set(6, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn singleton_frequencies() {
        let mut rng = SeedSpec::new(3, 0).rng();
        let mut counts = [0u32; 4];
        for _ in 0..10_000 {
            let s = sample_object_set(4, 1, &mut rng).unwrap();
            counts[s[0] as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 10_000.0 - 0.25).abs() <= 0.02, "{counts:?}");
        }
    }

    #[test]
    fn pair_subset_frequencies() {
        let mut rng = SeedSpec::new(4, 0).rng();
        let mut counts = std::collections::BTreeMap::<Vec<u64>, u32>::new();
        for _ in 0..100_000 {
            *counts.entry(sample_object_set(4, 2, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as f64 / 100_000.0 - 1.0 / 6.0).abs() <= 0.02);
        }
    }

    #[test]
    fn large_pool_small_ring() {
        let mut rng = SeedSpec::new(5, 0).rng();
        let s = sample_object_set(1_000_000_000, 50, &mut rng).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(*s.last().unwrap() < 1_000_000_000);
    }

    #[test]
    fn deterministic_and_counter_based() {
        let params = ModelParams::new(40, vec![0.3, 0.7], vec![2, 4], 60).unwrap();
        let a = sample_graph(&params, SeedSpec::new(9, 17));
        let b = sample_graph(&params, SeedSpec::new(9, 17));
        assert_eq!(a, b);
        assert!(a.is_consistent_with(&params));
        assert_eq!(a.params_hash(), params.fingerprint());
        assert_ne!(a, sample_graph(&params, SeedSpec::new(9, 18)));
        assert_ne!(a, sample_graph(&params, SeedSpec::new(10, 17)));
    }

    #[test]
    fn whole_pool_rings() {
        let params = ModelParams::new(5, vec![1.0], vec![3], 3).unwrap();
        let s = sample_graph(&params, SeedSpec::new(0, 0));
        assert!(s.object_sets().iter().all(|set| set == &vec![0, 1, 2]));
    }

    #[test]
    fn sample_validation() {
        assert!(GraphSample::new(vec![0], vec![vec![2, 1]], 0).is_err());
        assert!(GraphSample::new(vec![0], vec![vec![1, 1]], 0).is_err());
        assert!(GraphSample::new(vec![0, 0], vec![vec![1]], 0).is_err());
        assert!(GraphSample::from_sets(vec![vec![0, 3], vec![1]]).is_ok());
    }
}
