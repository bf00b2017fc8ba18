//! Arbitrary-precision rational versions of the closed forms in
//! [`crate::model`], meant as test ground truth for small pools (`P <= 200`).
//!
//! Group probabilities are taken as the exact binary values of the `f64`
//! weights, renormalized so they sum to exactly one.

use alloc::vec::Vec;

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::params::ModelParams;
use crate::{Error, Result};

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact group weights summing to one.
pub fn weights(params: &ModelParams) -> Vec<BigRational> {
    let raw: Vec<BigRational> =
        params.a().iter().map(|&x| BigRational::from_float(x).expect("finite weight")).collect();
    let total = raw.iter().fold(BigRational::zero(), |acc, x| acc + x);
    raw.into_iter().map(|x| x / &total).collect()
}

/// `prod_{t < kj} (P - ki - t) / (P - t)`.
pub fn no_overlap_ratio(pool: u64, ki: u64, kj: u64) -> Result<BigRational> {
    for k in [ki, kj] {
        if k > pool {
            return Err(Error::SubsetTooLarge { k, pool });
        }
    }
    if pool - ki < kj {
        return Ok(BigRational::zero());
    }
    let mut r = BigRational::one();
    for t in 0..kj {
        r *= ratio(pool - ki - t, pool - t);
    }
    Ok(r)
}

pub fn pairwise_edge_prob(params: &ModelParams, i: usize, j: usize) -> Result<BigRational> {
    let m = params.groups();
    for index in [i, j] {
        if index >= m {
            return Err(Error::GroupIndex { index, groups: m });
        }
    }
    Ok(BigRational::one() - no_overlap_ratio(params.pool(), params.k()[i], params.k()[j])?)
}

pub fn group_edge_prob(params: &ModelParams, i: usize) -> Result<BigRational> {
    let mut b = BigRational::zero();
    for (j, aj) in weights(params).iter().enumerate() {
        b += aj * pairwise_edge_prob(params, i, j)?;
    }
    Ok(b)
}

pub fn edge_prob(params: &ModelParams) -> Result<BigRational> {
    let mut e = BigRational::zero();
    for (i, ai) in weights(params).iter().enumerate() {
        e += ai * group_edge_prob(params, i)?;
    }
    Ok(e)
}

/// `(n sum_i a_i (1 - b_i)^(n-1), n a_1 (1 - b_1)^(n-1))`.
pub fn expected_isolated(params: &ModelParams) -> Result<(BigRational, BigRational)> {
    let n = params.n();
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, n });
    }
    let exponent = i32::try_from(n - 1).map_err(|_| Error::InvalidParams("n too large for the exact path"))?;
    let nr = BigRational::from_integer(BigInt::from(n));
    let mut total = BigRational::zero();
    let mut group1 = BigRational::zero();
    for (i, ai) in weights(params).iter().enumerate() {
        let miss = BigRational::one() - group_edge_prob(params, i)?;
        let term = &nr * ai * num_traits::pow::Pow::pow(miss, exponent);
        if i == 0 {
            group1 = term.clone();
        }
        total += term;
    }
    Ok((total, group1))
}
