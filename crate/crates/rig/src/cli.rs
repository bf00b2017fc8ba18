use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rig_core::exact::{to_f64, BigRational};
use rig_core::oracle::{enumerate_event_probs, enumerate_pair_prob};
use rig_core::regime::DEFAULT_CRITICAL_DELTA;
use rig_core::{
    classify_regime, diagnostics, sample_graph, solve_k1, AdvisoryBounds, ExactQuantities, ModelParams, SeedSpec,
};
use serde_json::json;

use crate::experiments::{evaluate_point, run_sweep, write_csv_atomic, RunSettings, SweepConfig};
use crate::{worker_threads, Error};

#[derive(Debug, Parser)]
#[command(
    name = "rig",
    version,
    about = "General random intersection graphs: exact probabilities and connectivity experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    /// Object pool size.
    #[arg(long = "P")]
    pub pool: u64,
    /// Group probabilities, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    /// Key ring sizes, comma separated and nondecreasing.
    #[arg(long = "K", value_delimiter = ',', required = true)]
    pub k: Vec<u64>,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        Ok(ModelParams::new(self.n, self.a.clone(), self.k.clone(), self.pool)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form edge and isolation quantities as JSON.
    Prob(ModelArgs),
    /// Smallest key rings reaching a target beta.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long = "P")]
        pool: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        /// K_j / K_1 for every group; the first entry must be 1.
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        target_beta: f64,
    },
    /// Monte Carlo estimate of one parameter point: one-row CSV plus a JSON summary on stdout.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Half-width of the critical window around c = 1.
        #[arg(long, default_value_t = DEFAULT_CRITICAL_DELTA)]
        delta: f64,
        /// Also write the sample of this trial index as JSON (needs --dump).
        #[arg(long, requires = "dump")]
        dump_trial: Option<u64>,
        #[arg(long, requires = "dump_trial")]
        dump: Option<PathBuf>,
    },
    /// Run a sweep described by a JSON config file.
    Sweep {
        config: PathBuf,
        /// Override the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive-enumeration ground truth for tiny instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Regime diagnostics and classification.
    Diag {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_CRITICAL_DELTA)]
        delta: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Probability that a Ki-subset and a Kj-subset of a P-pool intersect.
    Pair {
        #[arg(long = "P")]
        pool: u64,
        #[arg(long)]
        ki: u64,
        #[arg(long)]
        kj: u64,
    },
    /// Exact connectivity, no-isolation and isolated-count expectations.
    Events(ModelArgs),
}

fn exact_json(x: &BigRational) -> serde_json::Value {
    json!({ "exact": x.to_string(), "approx": to_f64(x) })
}

fn print_json<W: Write>(out: &mut W, value: &serde_json::Value) -> Result<(), Error> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<(), Error> {
    match cli.command {
        Command::Prob(model) => {
            let params = model.params()?;
            let q = ExactQuantities::compute(&params)?;
            print_json(out, &json!({ "params": params, "quantities": q }))
        }
        Command::Solve { n, pool, a, ratios, target_beta } => {
            let k = solve_k1(n, pool, &a, &ratios, target_beta)?;
            let params = ModelParams::new(n, a, k.clone(), pool)?;
            let q = ExactQuantities::compute(&params)?;
            print_json(out, &json!({ "K": k, "b1": q.b[0], "beta": q.beta, "target_beta": target_beta }))
        }
        Command::Simulate { model, trials, seed, out: path, delta, dump_trial, dump } => {
            let params = model.params()?;
            if trials == 0 {
                return Err(Error::Invalid("--trials must be at least 1".into()));
            }
            let settings = RunSettings {
                trials,
                master_seed: seed,
                threads: worker_threads(),
                critical_delta: delta,
                advisory: AdvisoryBounds::default(),
            };
            let (row, mc) = evaluate_point(&params, None, &settings)?;
            write_csv_atomic(std::slice::from_ref(&row), &path)?;
            if let (Some(t), Some(dump)) = (dump_trial, dump) {
                let sample = sample_graph(&params, SeedSpec::new(seed, t));
                std::fs::write(dump, serde_json::to_string(&sample)?)?;
            }
            print_json(out, &json!({ "params": params, "row": row, "estimates": mc }))
        }
        Command::Sweep { config, out: override_path } => {
            let mut spec = SweepConfig::load(&config)?.validate()?;
            if let Some(p) = override_path {
                spec.output_path = p;
            }
            let rows = run_sweep(&spec, worker_threads())?;
            write_csv_atomic(&rows, &spec.output_path)?;
            print_json(out, &json!({ "rows": rows.len(), "output": spec.output_path }))
        }
        Command::Oracle(OracleCommand::Pair { pool, ki, kj }) => {
            let p = enumerate_pair_prob(pool, ki, kj)?;
            print_json(out, &json!({ "P": pool, "ki": ki, "kj": kj, "p": exact_json(&p) }))
        }
        Command::Oracle(OracleCommand::Events(model)) => {
            let params = model.params()?;
            let e = enumerate_event_probs(&params)?;
            print_json(
                out,
                &json!({
                    "params": params,
                    "p_connected": exact_json(&e.p_connected),
                    "p_no_isolated": exact_json(&e.p_no_isolated),
                    "expected_isolated": exact_json(&e.expected_isolated),
                }),
            )
        }
        Command::Diag { model, delta } => {
            let params = model.params()?;
            let d = diagnostics(&params, &AdvisoryBounds::default())?;
            let regime = classify_regime(&params, delta)?;
            print_json(out, &json!({ "diagnostics": d, "regime": regime.label() }))
        }
    }
}
