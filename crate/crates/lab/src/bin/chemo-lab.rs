use std::path::PathBuf;
use std::process::ExitCode;

use chemolab::config::{ScenarioConfig, SweepConfig};
use chemolab::report::ReportJson;
use chemolab::scenario::run_scenario;
use chemolab::sweep::run_sweep;
use chemolab::LabError;
use chemolab_core::constants::{Coefficients, ThresholdInputs, ThresholdReport};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chemo-lab", version, about = "Chemotaxis simulations, sweeps and threshold reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its output files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Print the threshold report as JSON.
    Thresholds {
        #[arg(long)]
        ndim: u32,
        /// Exponent for the first threshold; repeat for several.
        #[arg(long = "p", num_args = 1..)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        chi: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        lx: f64,
        #[arg(long, default_value_t = 1.0)]
        ly: f64,
    },
}

fn run(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
                .ok_or_else(|| LabError::Config("no output directory given".into()))?;
            let (outcome, _) = run_scenario(&cfg, &dir)?;
            println!("{} {} t_final={}", outcome.status.as_str(), outcome.reason, outcome.t_final);
        }
        Command::Sweep { config, out, parallel } => {
            let cfg = SweepConfig::load(&config)?;
            let rows = run_sweep(&cfg, &out, parallel)?;
            println!("{} runs written to {}", rows.len(), out.join("sweep.csv").display());
        }
        Command::Thresholds { ndim, p, q, lambda, chi, alpha, beta, r, mu, eta, lx, ly } => {
            let coeffs = Coefficients { chi, r, mu, alpha, beta, lambda };
            let inputs = ThresholdInputs { n_dim: ndim, p_list: p, q, eta, lx, ly };
            let report = ThresholdReport::evaluate(&coeffs, &inputs).map_err(|e| LabError::Config(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&ReportJson::from(&report))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chemo-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
