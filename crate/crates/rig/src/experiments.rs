//! Sweep configuration, per-point evaluation and the frozen CSV schema.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rig_core::model::{group_edge_prob, scaled_key_rings};
use rig_core::regime::DEFAULT_CRITICAL_DELTA;
use rig_core::{classify_regime, diagnostics, solve_k1, AdvisoryBounds, ExactQuantities, ModelParams};
use serde::{Deserialize, Serialize};

use crate::montecarlo::{run_trials, MonteCarloReport};
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// CSV columns, in order. Changing this breaks downstream plotting scripts.
pub const COLUMNS: [&str; 27] = [
    "axis",
    "axis_value",
    "n",
    "P",
    "K",
    "b1",
    "beta",
    "yagan_c",
    "regime",
    "trials",
    "connected",
    "p_connected",
    "p_connected_lo",
    "p_connected_hi",
    "no_isolated",
    "p_no_isolated",
    "p_no_isolated_lo",
    "p_no_isolated_hi",
    "f_event",
    "p_f",
    "p_f_lo",
    "p_f_hi",
    "mean_isolated",
    "stderr_isolated",
    "expected_isolated_closed_form",
    "cross_moment_ratio",
    "regime_flags",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "n")]
    N,
    #[serde(rename = "P")]
    Pool,
    /// Multiplies the base key ring vector, rounding half up.
    #[serde(rename = "K1-scale")]
    K1Scale,
    /// Target `beta`, resolved through `solve_k1`.
    #[serde(rename = "beta-target")]
    BetaTarget,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::N => "n",
            Axis::Pool => "P",
            Axis::K1Scale => "K1-scale",
            Axis::BetaTarget => "beta-target",
        }
    }
}

fn default_delta() -> f64 {
    DEFAULT_CRITICAL_DELTA
}

/// On-disk sweep configuration (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema: u32,
    pub n: usize,
    #[serde(rename = "P")]
    pub pool: u64,
    pub a: Vec<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    pub axis: Axis,
    pub points: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default = "default_delta")]
    pub critical_delta: f64,
    #[serde(default)]
    pub advisory: AdvisoryBounds,
}

/// Validated sweep with every axis point already resolved to parameters.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub points: Vec<(f64, ModelParams)>,
    pub trials: u64,
    pub master_seed: u64,
    pub output_path: PathBuf,
    pub critical_delta: f64,
    pub advisory: AdvisoryBounds,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn as_count(x: f64, what: &str) -> Result<u64, Error> {
    if x.fract() != 0.0 || x < 0.0 || x > u64::MAX as f64 {
        return Err(config_err(format!("{what} axis points must be nonnegative integers (got {x})")));
    }
    Ok(x as u64)
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the schema and resolves every point. Errors from the core
    /// (including an unreachable `beta` target) pass through unchanged.
    pub fn validate(&self) -> Result<SweepSpec, Error> {
        if self.schema != SCHEMA_VERSION {
            return Err(config_err(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        if self.points.is_empty() {
            return Err(config_err("points must be nonempty"));
        }
        if self.points.iter().any(|x| !x.is_finite()) || self.points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("points must be finite and strictly increasing"));
        }
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if !(self.critical_delta >= 0.0) {
            return Err(config_err("critical_delta must be nonnegative"));
        }

        let base_k = match (self.axis, &self.k, &self.ratios) {
            (Axis::BetaTarget, _, Some(ratios)) => scaled_key_rings(1, ratios, self.pool),
            (Axis::BetaTarget, _, None) => return Err(config_err("axis beta-target requires ratios")),
            (_, Some(k), _) => k.clone(),
            (_, None, _) => return Err(config_err("K is required unless axis is beta-target")),
        };
        let base = ModelParams::new(self.n, self.a.clone(), base_k, self.pool)?;

        let mut points = Vec::with_capacity(self.points.len());
        for &x in &self.points {
            let params = match self.axis {
                Axis::N => base.with_n(as_count(x, "n")? as usize)?,
                Axis::Pool => base.with_pool(as_count(x, "P")?)?,
                Axis::K1Scale => {
                    if x <= 0.0 {
                        return Err(config_err("K1-scale points must be positive"));
                    }
                    let k = base
                        .k()
                        .iter()
                        .map(|&ki| ((ki as f64 * x + 0.5).floor() as u64).clamp(1, base.pool()))
                        .collect();
                    base.with_k(k)?
                }
                Axis::BetaTarget => {
                    let ratios = self.ratios.as_deref().expect("checked above");
                    base.with_k(solve_k1(base.n(), base.pool(), base.a(), ratios, x)?)?
                }
            };
            if params.n() < 2 {
                return Err(config_err("every sweep point needs n >= 2"));
            }
            points.push((x, params));
        }
        Ok(SweepSpec {
            axis: self.axis,
            points,
            trials: self.trials,
            master_seed: self.seed,
            output_path: self.output.clone(),
            critical_delta: self.critical_delta,
            advisory: self.advisory,
        })
    }
}

/// One CSV record: closed forms and estimates for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub axis_value: Option<f64>,
    pub n: usize,
    pub pool: u64,
    pub k: Vec<u64>,
    pub b1: f64,
    pub beta: f64,
    pub yagan_c: f64,
    pub regime: String,
    pub trials: u64,
    pub connected: u64,
    pub p_connected: f64,
    pub p_connected_lo: f64,
    pub p_connected_hi: f64,
    pub no_isolated: u64,
    pub p_no_isolated: f64,
    pub p_no_isolated_lo: f64,
    pub p_no_isolated_hi: f64,
    pub f_event: u64,
    pub p_f: f64,
    pub p_f_lo: f64,
    pub p_f_hi: f64,
    pub mean_isolated: f64,
    pub stderr_isolated: f64,
    pub expected_isolated_closed_form: f64,
    pub cross_moment_ratio: Option<f64>,
    pub regime_flags: Vec<String>,
}

/// Evaluation settings shared by every point of a run.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub trials: u64,
    pub master_seed: u64,
    pub threads: usize,
    pub critical_delta: f64,
    pub advisory: AdvisoryBounds,
}

/// Closed forms plus simulation for one point. `axis` is `None` for a
/// stand-alone simulation.
pub fn evaluate_point(
    params: &ModelParams,
    axis: Option<(Axis, f64)>,
    settings: &RunSettings,
) -> Result<(SweepRow, MonteCarloReport), Error> {
    let exact = ExactQuantities::compute(params)?;
    let diag = diagnostics(params, &settings.advisory)?;
    let regime = classify_regime(params, settings.critical_delta)?;
    let mc = run_trials(params, settings.trials, settings.master_seed, settings.threads)?;
    let row = SweepRow {
        axis: axis.map_or("none", |(a, _)| a.name()).to_string(),
        axis_value: axis.map(|(_, x)| x),
        n: params.n(),
        pool: params.pool(),
        k: params.k().to_vec(),
        b1: group_edge_prob(params, 0)?,
        beta: exact.beta,
        yagan_c: diag.yagan_c,
        regime: regime.label().to_string(),
        trials: settings.trials,
        connected: mc.connected.successes,
        p_connected: mc.connected.point,
        p_connected_lo: mc.connected.ci_low,
        p_connected_hi: mc.connected.ci_high,
        no_isolated: mc.no_isolated.successes,
        p_no_isolated: mc.no_isolated.point,
        p_no_isolated_lo: mc.no_isolated.ci_low,
        p_no_isolated_hi: mc.no_isolated.ci_high,
        f_event: mc.disconnected_without_isolated.successes,
        p_f: mc.disconnected_without_isolated.point,
        p_f_lo: mc.disconnected_without_isolated.ci_low,
        p_f_hi: mc.disconnected_without_isolated.ci_high,
        mean_isolated: mc.mean_isolated,
        stderr_isolated: mc.stderr_isolated,
        expected_isolated_closed_form: exact.expected_isolated,
        cross_moment_ratio: exact.cross_moment_ratio,
        regime_flags: diag.flags.iter().map(|f| f.as_str().to_string()).collect(),
    };
    Ok((row, mc))
}

pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<Vec<SweepRow>, Error> {
    let settings = RunSettings {
        trials: spec.trials,
        master_seed: spec.master_seed,
        threads,
        critical_delta: spec.critical_delta,
        advisory: spec.advisory,
    };
    spec.points
        .iter()
        .map(|(x, params)| evaluate_point(params, Some((spec.axis, *x)), &settings).map(|(row, _)| row))
        .collect()
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros removed,
/// scientific notation outside `1e-5 <= |x| < 1e9`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{x:.*}", (8 - exp) as usize);
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

impl SweepRow {
    pub fn to_record(&self) -> Vec<String> {
        let f = format_sig9;
        vec![
            self.axis.clone(),
            self.axis_value.map(f).unwrap_or_default(),
            self.n.to_string(),
            self.pool.to_string(),
            join(&self.k),
            f(self.b1),
            f(self.beta),
            f(self.yagan_c),
            self.regime.clone(),
            self.trials.to_string(),
            self.connected.to_string(),
            f(self.p_connected),
            f(self.p_connected_lo),
            f(self.p_connected_hi),
            self.no_isolated.to_string(),
            f(self.p_no_isolated),
            f(self.p_no_isolated_lo),
            f(self.p_no_isolated_hi),
            self.f_event.to_string(),
            f(self.p_f),
            f(self.p_f_lo),
            f(self.p_f_hi),
            f(self.mean_isolated),
            f(self.stderr_isolated),
            f(self.expected_isolated_closed_form),
            self.cross_moment_ratio.map(f).unwrap_or_default(),
            join(&self.regime_flags),
        ]
    }

    pub fn from_record(record: &csv::StringRecord) -> Result<Self, Error> {
        if record.len() != COLUMNS.len() {
            return Err(Error::Invalid(format!("expected {} columns, got {}", COLUMNS.len(), record.len())));
        }
        let field = |i: usize| &record[i];
        let float = |i: usize| -> Result<f64, Error> {
            field(i).parse().map_err(|_| Error::Invalid(format!("column {}: bad number {:?}", COLUMNS[i], field(i))))
        };
        let int = |i: usize| -> Result<u64, Error> {
            field(i).parse().map_err(|_| Error::Invalid(format!("column {}: bad integer {:?}", COLUMNS[i], field(i))))
        };
        let opt = |i: usize| -> Result<Option<f64>, Error> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                float(i).map(Some)
            }
        };
        let list = |i: usize| -> Vec<&str> { field(i).split(';').filter(|s| !s.is_empty()).collect() };
        let k = list(4)
            .into_iter()
            .map(|s| s.parse::<u64>().map_err(|_| Error::Invalid(format!("column K: bad entry {s:?}"))))
            .collect::<Result<_, _>>()?;
        Ok(SweepRow {
            axis: field(0).to_string(),
            axis_value: opt(1)?,
            n: int(2)? as usize,
            pool: int(3)?,
            k,
            b1: float(5)?,
            beta: float(6)?,
            yagan_c: float(7)?,
            regime: field(8).to_string(),
            trials: int(9)?,
            connected: int(10)?,
            p_connected: float(11)?,
            p_connected_lo: float(12)?,
            p_connected_hi: float(13)?,
            no_isolated: int(14)?,
            p_no_isolated: float(15)?,
            p_no_isolated_lo: float(16)?,
            p_no_isolated_hi: float(17)?,
            f_event: int(18)?,
            p_f: float(19)?,
            p_f_lo: float(20)?,
            p_f_hi: float(21)?,
            mean_isolated: float(22)?,
            stderr_isolated: float(23)?,
            expected_isolated_closed_form: float(24)?,
            cross_moment_ratio: opt(25)?,
            regime_flags: list(26).into_iter().map(str::to_string).collect(),
        })
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed run never leaves a partial file.
pub fn write_csv_atomic(rows: &[SweepRow], path: &Path) -> Result<(), Error> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_csv(rows, tmp.as_file_mut())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>, Error> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Invalid("unexpected CSV header".into()));
    }
    r.records().map(|rec| SweepRow::from_record(&rec?)).collect()
}
