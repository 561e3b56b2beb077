use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use eproc::harness::report::{default_sidecar_path, sidecar_json, to_csv, write_file};
use eproc::harness::{
    lower_bound_j, predict_tau, run_simulation, run_stream, validate_type1, ExperimentConfig, OnError,
};
use eproc::null::{kl_inf_bounded_mean, NullModel};
use eproc::ui::regret_sweep;
use eproc::{Error, Result};

#[derive(Parser)]
#[command(name = "eproc", version, about = "Anytime-valid sequential tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorPolicy {
    Abort,
    Skip,
}

#[derive(Subcommand)]
enum Command {
    /// Stream observations from stdin and print one JSON decision per line.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the smallest alpha in the config grid.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "abort")]
        on_error: ErrorPolicy,
    },
    /// Monte Carlo estimate of the expected stopping time per alpha.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV report; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON sidecar; defaults to the report path with a .json extension.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Rejection rates when the data come from the null itself.
    ValidateType1 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// KL_inf of the configured data against the configured null.
    Klinf {
        #[arg(long)]
        config: PathBuf,
    },
    /// Worst KT regret over random sequences against (m-1)/2 log n + m.
    RegretSweep {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        sequences: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower bound J and a heuristic stopping-time prediction.
    Predict {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        slope: f64,
        #[arg(long, default_value_t = 0.0)]
        constant: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path, workers: Option<usize>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    if workers.is_some() {
        config.workers = workers;
        config.validate()?;
    }
    Ok(config)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            alpha,
            on_error,
        } => {
            let config = load(&config, None)?;
            let policy = match on_error {
                ErrorPolicy::Abort => OnError::Abort,
                ErrorPolicy::Skip => OnError::Skip,
            };
            let stdout = BufWriter::new(io::stdout().lock());
            run_stream(&config, alpha, io::stdin().lock(), stdout, policy, io::stderr())?;
            Ok(())
        }
        Command::Simulate {
            config,
            out,
            sidecar,
            workers,
        } => {
            let config = load(&config, workers)?;
            let start = Instant::now();
            let report = run_simulation(&config)?;
            let elapsed = start.elapsed().as_secs_f64();
            let csv = to_csv(&report.rows)?;
            let out = out.or_else(|| config.output.report.clone());
            match &out {
                Some(path) => write_file(path, &csv)?,
                None => io::stdout().write_all(&csv)?,
            }
            let sidecar = sidecar
                .or_else(|| config.output.sidecar.clone())
                .or_else(|| out.as_deref().map(default_sidecar_path));
            if let Some(path) = sidecar {
                write_file(&path, sidecar_json(&config, &report, elapsed)?.as_bytes())?;
            }
            if !report.failure_messages.is_empty() {
                eprintln!("{} replications failed", report.failure_messages.len());
            }
            Ok(())
        }
        Command::ValidateType1 { config, out, workers } => {
            let config = load(&config, workers)?;
            let rows = validate_type1(&config)?;
            let csv = to_csv(&rows)?;
            match out {
                Some(path) => write_file(&path, &csv)?,
                None => io::stdout().write_all(&csv)?,
            }
            Ok(())
        }
        Command::Klinf { config } => {
            let config = load(&config, None)?;
            let data = config
                .data
                .as_ref()
                .ok_or_else(|| Error::Config("klinf needs a data section".into()))?;
            let result = match (config.null.build()?, data.bounded()) {
                (NullModel::ConvexHull(h), None) => match data {
                    eproc::harness::DataSpec::Categorical { probs } => h.kl_inf(probs)?,
                    _ => unreachable!("validated"),
                },
                (NullModel::BoundedMean(b), Some(dist)) => kl_inf_bounded_mean(&dist, &b, None)?,
                _ => return Err(Error::Config("data and null do not match".into())),
            };
            let j: Vec<_> = config
                .alpha_grid
                .iter()
                .map(|&a| json!({"alpha": a, "j_alpha": lower_bound_j(a, result.gamma_star).ok()}))
                .collect();
            let gamma = result.gamma_star.is_finite().then_some(result.gamma_star);
            print_json(&json!({
                "gamma_star": gamma,
                "gamma_star_infinite": result.gamma_star.is_infinite(),
                "projection": result.projection,
                "dual_certificate": result.dual_certificate,
                "lower_bounds": j,
            }))
        }
        Command::RegretSweep { m, n, sequences, seed } => {
            let sweep = regret_sweep(m, n, sequences, seed)?;
            print_json(&serde_json::to_value(&sweep)?)
        }
        Command::Predict {
            alpha,
            gamma,
            slope,
            constant,
        } => {
            let j = lower_bound_j(alpha, gamma)?;
            let y = predict_tau(alpha, gamma, slope, constant)?;
            print_json(&json!({"alpha": alpha, "gamma_star": gamma, "j_alpha": j, "predicted_tau": y}))
        }
    }
}
