//! Advisory regime diagnostics and the threshold classifier.
//!
//! The connectivity law is asymptotic, so none of this can be decided at a
//! single `n`. The bounds below only flag parameter points that sit far from
//! the regime where the law is expected to describe finite graphs.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{beta_for, group_edge_prob};
use crate::params::ModelParams;
use crate::{Error, Result};

/// Thresholds for [`diagnostics`]. Defaults: `P/n >= 1`, `K_m^2/P <= 0.1`,
/// `|beta|/ln n <= 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvisoryBounds {
    pub min_p_over_n: f64,
    pub max_km_sq_over_p: f64,
    pub max_abs_beta_over_ln_n: f64,
}

impl Default for AdvisoryBounds {
    fn default() -> Self {
        AdvisoryBounds { min_p_over_n: 1.0, max_km_sq_over_p: 0.1, max_abs_beta_over_ln_n: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeFlag {
    /// `P/n` below `min_p_over_n`.
    PoolSmall,
    /// `K_m^2/P` above `max_km_sq_over_p`.
    KeyRingLarge,
    /// `|beta|/ln n` above `max_abs_beta_over_ln_n`.
    BetaLarge,
}

impl RegimeFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeFlag::PoolSmall => "pool-small",
            RegimeFlag::KeyRingLarge => "key-ring-large",
            RegimeFlag::BetaLarge => "beta-large",
        }
    }
}

impl fmt::Display for RegimeFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeDiagnostics {
    pub p_over_n: f64,
    pub km_sq_over_p: f64,
    pub beta: f64,
    pub beta_over_ln_n: f64,
    pub yagan_c: f64,
    pub flags: Vec<RegimeFlag>,
}

pub fn diagnostics(params: &ModelParams, bounds: &AdvisoryBounds) -> Result<RegimeDiagnostics> {
    if params.n() < 2 {
        return Err(Error::TooFewVertices { needed: 2, n: params.n() });
    }
    let n = params.n() as f64;
    let pool = params.pool() as f64;
    let km = params.k_max() as f64;
    let b1 = group_edge_prob(params, 0)?;
    let ln_n = libm::log(n);
    let beta = beta_for(params.n(), b1);

    let p_over_n = pool / n;
    let km_sq_over_p = km * km / pool;
    let beta_over_ln_n = beta / ln_n;
    let mut flags = Vec::new();
    if p_over_n < bounds.min_p_over_n {
        flags.push(RegimeFlag::PoolSmall);
    }
    if km_sq_over_p > bounds.max_km_sq_over_p {
        flags.push(RegimeFlag::KeyRingLarge);
    }
    if beta_over_ln_n.abs() > bounds.max_abs_beta_over_ln_n {
        flags.push(RegimeFlag::BetaLarge);
    }
    Ok(RegimeDiagnostics { p_over_n, km_sq_over_p, beta, beta_over_ln_n, yagan_c: n * b1 / ln_n, flags })
}

/// Default half-width of the critical window around `c = 1`.
pub const DEFAULT_CRITICAL_DELTA: f64 = 0.05;

/// Position of a parameter point relative to the coarse `c = n b_1 / ln n`
/// law. Inside the critical window only the sign of `beta` decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SubcriticalYagan,
    SupercriticalYagan,
    /// `c` within `delta` of one. The payload is the sign of `beta`
    /// (`-1`, `0` or `1`).
    CriticalWindow(i8),
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::SubcriticalYagan => "subcritical-yagan",
            Regime::SupercriticalYagan => "supercritical-yagan",
            Regime::CriticalWindow(s) if s > 0 => "critical-window(+)",
            Regime::CriticalWindow(s) if s < 0 => "critical-window(-)",
            Regime::CriticalWindow(_) => "critical-window(0)",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classification from `n` and `b_1` alone.
pub fn classify(n: f64, b1: f64, delta: f64) -> Regime {
    let ln_n = libm::log(n);
    let c = n * b1 / ln_n;
    if c < 1.0 - delta {
        Regime::SubcriticalYagan
    } else if c > 1.0 + delta {
        Regime::SupercriticalYagan
    } else {
        let beta = n * b1 - ln_n;
        let sign = if beta > 0.0 {
            1
        } else if beta < 0.0 {
            -1
        } else {
            0
        };
        Regime::CriticalWindow(sign)
    }
}

pub fn classify_regime(params: &ModelParams, delta: f64) -> Result<Regime> {
    if params.n() < 2 {
        return Err(Error::TooFewVertices { needed: 2, n: params.n() });
    }
    Ok(classify(params.n() as f64, group_edge_prob(params, 0)?, delta))
}
