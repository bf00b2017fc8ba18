use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest tolerated deviation of `sum(a)` from one before renormalization.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Validated parameters `(n, a, K, P)` of a general random intersection graph.
///
/// Construction renormalizes `a` when its sum is within
/// [`PROBABILITY_SUM_TOLERANCE`] of one and rejects it otherwise. Key rings
/// must already be sorted: reordering them would silently detach them from
/// their group probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    n: usize,
    a: Vec<f64>,
    k: Vec<u64>,
    pool: u64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    a: Vec<f64>,
    #[serde(rename = "K")]
    k: Vec<u64>,
    #[serde(rename = "P")]
    pool: u64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.n, raw.a, raw.k, raw.pool)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams { n: p.n, a: p.a, k: p.k, pool: p.pool }
    }
}

impl ModelParams {
    pub fn new(n: usize, a: Vec<f64>, k: Vec<u64>, pool: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1"));
        }
        if a.is_empty() {
            return Err(Error::InvalidParams("at least one group is required"));
        }
        if a.len() != k.len() {
            return Err(Error::InvalidParams("a and K must have the same length"));
        }
        if pool == 0 {
            return Err(Error::InvalidParams("pool size P must be at least 1"));
        }
        if a.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidParams("every group probability a_i must be positive and finite"));
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::ProbabilitySum { sum });
        }
        let a = a.into_iter().map(|x| x / sum).collect();

        let mut prev = 1;
        for (index, &ki) in k.iter().enumerate() {
            if ki < prev || ki > pool {
                return Err(Error::KeyRingOrder { index });
            }
            prev = ki;
        }

        Ok(ModelParams { n, a, k, pool })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of groups.
    pub fn groups(&self) -> usize {
        self.a.len()
    }

    /// Group probabilities, renormalized to sum to one.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Key ring sizes, nondecreasing.
    pub fn k(&self) -> &[u64] {
        &self.k
    }

    /// Object pool size `P`.
    pub fn pool(&self) -> u64 {
        self.pool
    }

    pub fn k_max(&self) -> u64 {
        *self.k.last().expect("at least one group")
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        ModelParams::new(n, self.a.clone(), self.k.clone(), self.pool)
    }

    pub fn with_pool(&self, pool: u64) -> Result<Self> {
        ModelParams::new(self.n, self.a.clone(), self.k.clone(), pool)
    }

    pub fn with_k(&self, k: Vec<u64>) -> Result<Self> {
        ModelParams::new(self.n, self.a.clone(), k, self.pool)
    }

    /// 64-bit FNV-1a fingerprint over `(n, a, K, P)`.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |word: u64| {
            for byte in word.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.n as u64);
        feed(self.a.len() as u64);
        for &x in &self.a {
            feed(x.to_bits());
        }
        for &ki in &self.k {
            feed(ki);
        }
        feed(self.pool);
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn renormalizes_small_drift() {
        let p = ModelParams::new(10, vec![0.5 + 4e-10, 0.5], vec![1, 2], 5).unwrap();
        let sum: f64 = p.a().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sum() {
        let err = ModelParams::new(10, vec![0.4, 0.4], vec![1, 2], 5).unwrap_err();
        assert!(matches!(err, Error::ProbabilitySum { .. }));
    }

    #[test]
    fn rejects_unsorted_or_oversized_rings() {
        assert_eq!(ModelParams::new(10, vec![0.5, 0.5], vec![3, 2], 5).unwrap_err(), Error::KeyRingOrder { index: 1 });
        assert_eq!(ModelParams::new(10, vec![1.0], vec![6], 5).unwrap_err(), Error::KeyRingOrder { index: 0 });
        assert_eq!(ModelParams::new(10, vec![1.0], vec![0], 5).unwrap_err(), Error::KeyRingOrder { index: 0 });
    }

    #[test]
    fn rejects_nonpositive_probability() {
        assert!(ModelParams::new(10, vec![0.0, 1.0], vec![1, 2], 5).is_err());
        assert!(ModelParams::new(10, vec![f64::NAN], vec![1], 5).is_err());
    }

    #[test]
    fn fingerprint_tracks_every_field() {
        let p = ModelParams::new(10, vec![0.5, 0.5], vec![1, 2], 5).unwrap();
        assert_ne!(p.fingerprint(), p.with_n(11).unwrap().fingerprint());
        assert_ne!(p.fingerprint(), p.with_pool(6).unwrap().fingerprint());
        assert_ne!(p.fingerprint(), p.with_k(vec![2, 2]).unwrap().fingerprint());
        assert_eq!(p.fingerprint(), p.clone().fingerprint());
    }
}
