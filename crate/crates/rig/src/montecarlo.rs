//! Seeded trial runner and binomial estimators.
//!
//! Trial `t` always uses `SeedSpec(master_seed, t)`. Workers take contiguous
//! trial ranges and return integer counts, which are summed afterwards, so
//! the result does not depend on the number of threads.

use std::ops::{Add, Range};
use std::thread;

use rig_core::{analyze, sample_graph, ModelParams, SeedSpec, TrialStats};
use serde::Serialize;

use crate::Error;

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), Error> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if successes > trials {
        return Err(Error::Invalid(format!("successes {successes} exceed trials {trials}")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let high = if successes == trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    Ok((low, high))
}

/// Point estimate and 95% Wilson interval of one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateRow {
    pub trials: u64,
    pub successes: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateRow {
    pub fn new(successes: u64, trials: u64) -> Result<Self, Error> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95)?;
        Ok(EstimateRow { trials, successes, point: successes as f64 / trials as f64, ci_low, ci_high })
    }

    /// Binomial standard error of the point estimate.
    pub fn std_error(&self) -> f64 {
        (self.point * (1.0 - self.point) / self.trials as f64).sqrt()
    }
}

/// Commutative per-trial tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub trials: u64,
    pub connected: u64,
    pub no_isolated: u64,
    pub disconnected_without_isolated: u64,
    pub isolated_sum: u64,
    pub isolated_sq_sum: u128,
    pub group1_isolated_sum: u64,
    /// Trials that were connected yet had an isolated vertex. Always zero.
    pub implication_violations: u64,
}

impl TrialCounts {
    pub fn record(&mut self, stats: &TrialStats) {
        let iso = stats.isolated_count as u64;
        self.trials += 1;
        self.connected += stats.connected as u64;
        self.no_isolated += (iso == 0) as u64;
        self.disconnected_without_isolated += stats.no_isolated_but_disconnected as u64;
        self.isolated_sum += iso;
        self.isolated_sq_sum += u128::from(iso) * u128::from(iso);
        self.group1_isolated_sum += stats.group1_isolated_count as u64;
        self.implication_violations += (stats.connected && iso > 0) as u64;
    }
}

impl Add for TrialCounts {
    type Output = TrialCounts;

    fn add(self, o: TrialCounts) -> TrialCounts {
        TrialCounts {
            trials: self.trials + o.trials,
            connected: self.connected + o.connected,
            no_isolated: self.no_isolated + o.no_isolated,
            disconnected_without_isolated: self.disconnected_without_isolated + o.disconnected_without_isolated,
            isolated_sum: self.isolated_sum + o.isolated_sum,
            isolated_sq_sum: self.isolated_sq_sum + o.isolated_sq_sum,
            group1_isolated_sum: self.group1_isolated_sum + o.group1_isolated_sum,
            implication_violations: self.implication_violations + o.implication_violations,
        }
    }
}

/// Aggregated estimates of one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub connected: EstimateRow,
    pub no_isolated: EstimateRow,
    /// No isolated vertex but disconnected.
    pub disconnected_without_isolated: EstimateRow,
    pub mean_isolated: f64,
    pub stderr_isolated: f64,
    pub mean_group1_isolated: f64,
    pub implication_violations: u64,
}

impl MonteCarloReport {
    pub fn from_counts(c: &TrialCounts) -> Result<Self, Error> {
        let n = c.trials as f64;
        let mean = c.isolated_sum as f64 / n;
        let variance =
            if c.trials > 1 { ((c.isolated_sq_sum as f64 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Ok(MonteCarloReport {
            connected: EstimateRow::new(c.connected, c.trials)?,
            no_isolated: EstimateRow::new(c.no_isolated, c.trials)?,
            disconnected_without_isolated: EstimateRow::new(c.disconnected_without_isolated, c.trials)?,
            mean_isolated: mean,
            stderr_isolated: (variance / n).sqrt(),
            mean_group1_isolated: c.group1_isolated_sum as f64 / n,
            implication_violations: c.implication_violations,
        })
    }
}

fn run_range(params: &ModelParams, master_seed: u64, range: Range<u64>) -> Result<TrialCounts, Error> {
    let mut counts = TrialCounts::default();
    for t in range {
        let sample = sample_graph(params, SeedSpec::new(master_seed, t));
        counts.record(&analyze(&sample)?);
    }
    Ok(counts)
}

/// Raw tallies of `trials` trials spread over at most `threads` workers.
pub fn run_counts(params: &ModelParams, trials: u64, master_seed: u64, threads: usize) -> Result<TrialCounts, Error> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    if params.n() < 2 {
        return Err(rig_core::Error::TooFewVertices { needed: 2, n: params.n() }.into());
    }
    let workers = (threads.max(1) as u64).min(trials);
    if workers == 1 {
        return run_range(params, master_seed, 0..trials);
    }
    let chunk = trials.div_ceil(workers);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(trials)..((w + 1) * chunk).min(trials);
                scope.spawn(move || run_range(params, master_seed, range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trial worker panicked"))
            .try_fold(TrialCounts::default(), |acc, c| Ok(acc + c?))
    })
}

pub fn run_trials(
    params: &ModelParams,
    trials: u64,
    master_seed: u64,
    threads: usize,
) -> Result<MonteCarloReport, Error> {
    MonteCarloReport::from_counts(&run_counts(params, trials, master_seed, threads)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values: statsmodels proportion_confint(method="wilson")
    #[test]
    fn wilson_zero_successes() {
        let (lo, hi) = wilson_interval(0, 100, Z_95).unwrap();
        assert_eq!(lo, 0.0);
        // z^2 / (n + z^2) for p = 0
        let z2 = Z_95 * Z_95;
        assert!((hi - z2 / (100.0 + z2)).abs() < 1e-15);
        assert!((hi - 0.036_993_498_206_985_69).abs() < 1e-12, "{hi}");
    }

    #[test]
    fn wilson_full_and_half() {
        let (lo, hi) = wilson_interval(100, 100, Z_95).unwrap();
        assert_eq!(hi, 1.0);
        assert!((lo - 0.963_006_501_793_014_3).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100, Z_95).unwrap();
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
        assert!((lo - 0.403_831_530_365_995_6).abs() < 1e-12, "{lo}");
    }

    #[test]
    fn wilson_rejects_bad_counts() {
        assert!(wilson_interval(101, 100, Z_95).is_err());
        assert!(wilson_interval(0, 0, Z_95).is_err());
    }

    #[test]
    fn whole_pool_always_connected() {
        let params = ModelParams::new(20, vec![0.5, 0.5], vec![6, 6], 6).unwrap();
        let r = run_trials(&params, 200, 1, 3).unwrap();
        assert_eq!(r.connected.successes, 200);
        assert_eq!(r.connected.point, 1.0);
        assert_eq!(r.connected.ci_high, 1.0);
        assert_eq!(r.mean_isolated, 0.0);
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let params = ModelParams::new(60, vec![0.5, 0.5], vec![1, 2], 90).unwrap();
        let one = run_counts(&params, 301, 77, 1).unwrap();
        for threads in [2, 3, 8, 500] {
            assert_eq!(run_counts(&params, 301, 77, threads).unwrap(), one);
        }
        assert_eq!(one.trials, 301);
        assert_eq!(one.implication_violations, 0);
    }

    #[test]
    fn estimate_invariants() {
        for (s, t) in [(0, 1), (1, 1), (3, 17), (999, 1000)] {
            let e = EstimateRow::new(s, t).unwrap();
            assert!(e.ci_low <= e.point && e.point <= e.ci_high);
            assert!((0.0..=1.0).contains(&e.point));
        }
    }
}
