//! One run: initial data, time loop, diagnostics and output files.
//!
//! Output files in the run directory:
//!
//! - `timeseries.csv`: one row per sample, columns [`TIMESERIES_COLUMNS`];
//!   `energy` is empty when undefined.
//! - `ledger.csv`: one row per ledger entry per sample, columns
//!   [`LEDGER_COLUMNS`].
//! - `summary.json`: [`Summary`].

use std::fs;
use std::path::Path;

use chemolab_core::constants::ThresholdReport;
use chemolab_core::diagnostics::{fit_decay_rate, sample, DiagnosticsSample, SampleContext};
use chemolab_core::stepper::{simulate, RunOutcome};
use chemolab_core::ScalarField;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{LabError, Result};
use crate::init::initial_data;
use crate::report::ReportJson;

pub const TIMESERIES_COLUMNS: [&str; 14] = [
    "t",
    "mass",
    "lp2",
    "lp4",
    "lq",
    "min_u",
    "max_u",
    "min_v",
    "max_v",
    "grad_u_max",
    "grad_v_l2sq",
    "energy",
    "dist_sup",
    "l2sq_dev",
];

pub const LEDGER_COLUMNS: [&str; 6] = ["t", "name", "lhs", "rhs", "slack", "pass"];

/// Fraction of samples, counted from the end, that form the tail.
pub const TAIL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeJson {
    pub status: &'static str,
    pub reason: String,
    pub t_final: f64,
}

impl From<&RunOutcome> for OutcomeJson {
    fn from(o: &RunOutcome) -> Self {
        OutcomeJson { status: o.status.as_str(), reason: o.reason.clone(), t_final: o.t_final }
    }
}

/// Limsup/liminf proxies over the last quarter of the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tail {
    pub mass_min: f64,
    pub lp2_max: f64,
    pub min_v_min: f64,
    pub dist_sup_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub fitted_l2sq: Option<f64>,
    pub fitted_energy: Option<f64>,
    pub predicted_energy: f64,
    pub predicted_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub params: ScenarioConfig,
    pub thresholds: ReportJson,
    pub outcome: OutcomeJson,
    pub tail: Option<Tail>,
    pub rates: Rates,
}

/// Everything a run produced, before anything is written.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub report: ThresholdReport,
    pub outcome: RunOutcome,
    pub initial: ScalarField,
    pub samples: Vec<DiagnosticsSample>,
    pub final_u: ScalarField,
    pub final_v: Option<ScalarField>,
}

impl ScenarioRun {
    pub fn tail_samples(&self) -> &[DiagnosticsSample] {
        let n = self.samples.len();
        let keep = ((n as f64 * TAIL_FRACTION).ceil() as usize).min(n);
        &self.samples[n - keep..]
    }

    pub fn tail(&self) -> Option<Tail> {
        let tail = self.tail_samples();
        let last = tail.last()?;
        Some(Tail {
            mass_min: tail.iter().map(|s| s.mass).fold(f64::INFINITY, f64::min),
            lp2_max: tail.iter().filter_map(|s| s.lp(2.0)).fold(f64::NEG_INFINITY, f64::max),
            min_v_min: tail.iter().map(|s| s.min_v).fold(f64::INFINITY, f64::min),
            dist_sup_final: last.dist_sup,
        })
    }

    /// Decay rates of `∫(u − u*)²` and `E` fitted where they are below 1% of
    /// their largest sample and above `1e−20` times their natural scale.
    pub fn rates(&self) -> Rates {
        let u_star = self.config.r / self.config.mu;
        let area = self.config.lx * self.config.ly;
        let fit = |series: Vec<(f64, f64)>, floor: f64| {
            let top = series.iter().map(|p| p.1).fold(0.0, f64::max);
            fit_decay_rate(&series, floor, 1e-2 * top).ok()
        };
        let l2sq: Vec<(f64, f64)> = self.samples.iter().map(|s| (s.t, s.l2sq_dev)).collect();
        let energy: Vec<(f64, f64)> = self.samples.iter().filter_map(|s| s.energy.map(|e| (s.t, e))).collect();
        Rates {
            fitted_l2sq: fit(l2sq, 1e-20 * u_star * u_star * area),
            fitted_energy: fit(energy, 1e-20 * u_star * area),
            predicted_energy: self.report.rate_energy,
            predicted_sup: self.report.rate_sup,
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            params: self.config.clone(),
            thresholds: (&self.report).into(),
            outcome: (&self.outcome).into(),
            tail: self.tail(),
            rates: self.rates(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<Summary> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        write_timeseries(&dir.join("timeseries.csv"), &self.samples)?;
        write_ledger(&dir.join("ledger.csv"), &self.samples)?;
        let summary = self.summary();
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary)?;
        fs::write(&path, text + "\n").map_err(|e| LabError::io(&path, e))?;
        Ok(summary)
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_timeseries(path: &Path, samples: &[DiagnosticsSample]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TIMESERIES_COLUMNS)?;
    let num = |x: f64| x.to_string();
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for s in samples {
        w.write_record([
            num(s.t),
            num(s.mass),
            opt(s.lp(2.0)),
            opt(s.lp(4.0)),
            num(s.lq),
            num(s.min_u),
            num(s.max_u),
            num(s.min_v),
            num(s.max_v),
            num(s.grad_u_max),
            num(s.grad_v_l2sq),
            opt(s.energy),
            num(s.dist_sup),
            num(s.l2sq_dev),
        ])?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

fn write_ledger(path: &Path, samples: &[DiagnosticsSample]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(LEDGER_COLUMNS)?;
    for s in samples {
        for e in &s.ledger {
            w.write_record([
                s.t.to_string(),
                e.name.to_string(),
                e.lhs.to_string(),
                e.rhs.to_string(),
                e.slack.to_string(),
                e.pass.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Runs a scenario in memory. Failures inside the time loop end up in the
/// outcome; only configuration problems are errors.
pub fn execute(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let params = cfg.params()?;
    let report = ThresholdReport::evaluate(&params.coeffs, &cfg.threshold_inputs())
        .map_err(|e| LabError::Config(e.to_string()))?;
    let u0 = initial_data(cfg)?;
    let mut ctx = SampleContext::new(params.coeffs, &report, u0.integral(), cfg.t_end);
    if let Some(t) = cfg.t_late {
        ctx.t_late = t;
    }
    if let Some(on) = cfg.v_lower {
        ctx.v_lower = on;
    }
    let mut samples = Vec::new();
    let sim = simulate(&u0, &params, |t, u, v| samples.push(sample(t, u, v, &ctx)), cfg.sample_every)?;
    Ok(ScenarioRun {
        config: cfg.clone(),
        report,
        outcome: sim.outcome,
        initial: u0,
        samples,
        final_u: sim.u,
        final_v: sim.v,
    })
}

/// Runs a scenario and writes its three output files into `dir`.
pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path) -> Result<(RunOutcome, Summary)> {
    let run = execute(cfg)?;
    let summary = run.write(dir)?;
    Ok((run.outcome, summary))
}
