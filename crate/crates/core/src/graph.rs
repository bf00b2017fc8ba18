//! Connectivity and isolation on a realized graph.
//!
//! The edge set is never built. Vertices holding a common object form a
//! clique, so uniting every holder of an object with its first holder yields
//! the connected components in time near-linear in the total ring size.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::dsu::UnionFind;
use crate::sampler::GraphSample;
use crate::{Error, Result};

/// Object id to the ascending list of vertices holding it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    holders: BTreeMap<u64, Vec<usize>>,
}

impl InvertedIndex {
    pub fn holders(&self, object: u64) -> &[usize] {
        self.holders.get(&object).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[usize])> {
        self.holders.iter().map(|(&o, h)| (o, h.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.holders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holders.is_empty()
    }

    /// Total number of (object, holder) entries; equals the sum of ring sizes.
    pub fn entries(&self) -> usize {
        self.holders.values().map(Vec::len).sum()
    }

    /// Rebuilds the per-vertex object sets of an `n`-vertex sample.
    pub fn invert(&self, n: usize) -> Vec<Vec<u64>> {
        let mut sets = alloc::vec![Vec::new(); n];
        for (&object, holders) in &self.holders {
            for &v in holders {
                sets[v].push(object);
            }
        }
        sets
    }
}

pub fn build_inverted_index(sample: &GraphSample) -> InvertedIndex {
    let mut holders: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (v, set) in sample.object_sets().iter().enumerate() {
        for &object in set {
            holders.entry(object).or_default().push(v);
        }
    }
    InvertedIndex { holders }
}

/// Union-find over vertices plus, per vertex, whether it shares any object.
///
/// Walks the holders of each object once. Pools no larger than a few times
/// the total ring size use a dense first-holder table; larger pools sort the
/// flat (object, vertex) list instead. Both are linear or `n log n` in the
/// total ring size, never in `P`.
fn scan(sample: &GraphSample) -> (UnionFind, Vec<bool>) {
    let n = sample.n();
    let entries: usize = sample.object_sets().iter().map(Vec::len).sum();
    let max_object = sample.object_sets().iter().filter_map(|s| s.last()).max().copied();
    let mut uf = UnionFind::new(n);
    let mut shared = alloc::vec![false; n];
    let mut link = |first: usize, v: usize, uf: &mut UnionFind| {
        uf.union(first, v);
        shared[first] = true;
        shared[v] = true;
    };
    match max_object {
        Some(max) if max < 4 * entries as u64 + 64 => {
            let mut first = alloc::vec![usize::MAX; max as usize + 1];
            for (v, set) in sample.object_sets().iter().enumerate() {
                for &o in set {
                    let slot = &mut first[o as usize];
                    if *slot == usize::MAX {
                        *slot = v;
                    } else {
                        link(*slot, v, &mut uf);
                    }
                }
            }
        }
        Some(_) => {
            let mut pairs: Vec<(u64, usize)> = Vec::with_capacity(entries);
            for (v, set) in sample.object_sets().iter().enumerate() {
                pairs.extend(set.iter().map(|&o| (o, v)));
            }
            pairs.sort_unstable();
            for run in pairs.chunk_by(|x, y| x.0 == y.0) {
                for &(_, v) in &run[1..] {
                    link(run[0].1, v, &mut uf);
                }
            }
        }
        None => {}
    }
    (uf, shared)
}

/// Whether the sample is connected, and its number of components.
/// A single vertex counts as connected.
pub fn connectivity(sample: &GraphSample) -> Result<(bool, usize)> {
    if sample.n() == 0 {
        return Err(Error::TooFewVertices { needed: 1, n: 0 });
    }
    let count = scan(sample).0.set_count();
    Ok((count == 1, count))
}

/// A vertex is isolated iff it is the sole holder of every object it holds.
fn isolation_from_shared(sample: &GraphSample, shared: &[bool]) -> (usize, usize) {
    let mut isolated = 0;
    let mut group1 = 0;
    for (v, &s) in shared.iter().enumerate() {
        if !s {
            isolated += 1;
            if sample.groups()[v] == 0 {
                group1 += 1;
            }
        }
    }
    (isolated, group1)
}

/// Number of isolated vertices and of isolated group-0 vertices.
///
/// Isolation is rejected at `n = 1`, where it has no meaningful definition.
pub fn isolation_counts(sample: &GraphSample) -> Result<(usize, usize)> {
    if sample.n() < 2 {
        return Err(Error::TooFewVertices { needed: 2, n: sample.n() });
    }
    Ok(isolation_from_shared(sample, &scan(sample).1))
}

/// Observable events of one realized graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialStats {
    pub connected: bool,
    pub isolated_count: usize,
    pub group1_isolated_count: usize,
    /// No isolated vertex, yet disconnected.
    pub no_isolated_but_disconnected: bool,
    pub component_count: usize,
    pub min_degree_zero: bool,
}

pub fn analyze(sample: &GraphSample) -> Result<TrialStats> {
    if sample.n() < 2 {
        return Err(Error::TooFewVertices { needed: 2, n: sample.n() });
    }
    let (uf, shared) = scan(sample);
    let component_count = uf.set_count();
    let (isolated_count, group1_isolated_count) = isolation_from_shared(sample, &shared);
    let connected = component_count == 1;
    assert!(!connected || isolated_count == 0, "connected graph with an isolated vertex");
    Ok(TrialStats {
        connected,
        isolated_count,
        group1_isolated_count,
        no_isolated_but_disconnected: isolated_count == 0 && !connected,
        component_count,
        min_degree_zero: isolated_count > 0,
    })
}
