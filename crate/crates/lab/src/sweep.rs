//! Cartesian parameter sweeps.
//!
//! Each cell runs as its own scenario in `cell_NNNN/` under the sweep
//! directory. Cells are independent, run on a small thread pool, and a
//! failing or panicking cell only marks its own row.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::config::{ScenarioConfig, SweepConfig};
use crate::error::{LabError, Result};
use crate::scenario::run_scenario;

/// Caps the number of worker threads when set.
pub const THREADS_ENV: &str = "CHEMO_LAB_THREADS";

/// Status used for cells that could not produce an outcome at all.
pub const STATUS_ERROR: &str = "Error";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: String,
    pub mu: f64,
    pub chi: f64,
    pub lambda: f64,
    pub above_mu1: Option<bool>,
    pub above_mu2: Option<bool>,
    pub above_mu3: Option<bool>,
    pub above_mu3_mu4: Option<bool>,
    /// The `above_mu3` flag differs from the previous row's.
    pub regime_change: bool,
    pub status: String,
    pub reason: String,
    pub t_final: Option<f64>,
    pub mass_min: Option<f64>,
    pub lp2_max: Option<f64>,
    pub min_v_min: Option<f64>,
    pub dist_sup_final: Option<f64>,
    pub fitted_l2sq: Option<f64>,
    pub fitted_energy: Option<f64>,
    pub predicted_energy: Option<f64>,
    pub predicted_sup: Option<f64>,
}

impl SweepRow {
    fn failed(cell: String, cfg: &ScenarioConfig, reason: String) -> Self {
        SweepRow {
            cell,
            mu: cfg.mu,
            chi: cfg.chi,
            lambda: cfg.lambda,
            above_mu1: None,
            above_mu2: None,
            above_mu3: None,
            above_mu3_mu4: None,
            regime_change: false,
            status: STATUS_ERROR.into(),
            reason,
            t_final: None,
            mass_min: None,
            lp2_max: None,
            min_v_min: None,
            dist_sup_final: None,
            fitted_l2sq: None,
            fitted_energy: None,
            predicted_energy: None,
            predicted_sup: None,
        }
    }
}

fn run_cell(cell: String, cfg: &ScenarioConfig, dir: &Path) -> SweepRow {
    let attempt = catch_unwind(AssertUnwindSafe(|| run_scenario(cfg, dir)));
    let (outcome, summary) = match attempt {
        Ok(Ok(done)) => done,
        Ok(Err(e)) => return SweepRow::failed(cell, cfg, e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            return SweepRow::failed(cell, cfg, format!("panic: {msg}"));
        }
    };
    let flags = summary.thresholds.flags;
    SweepRow {
        cell,
        mu: cfg.mu,
        chi: cfg.chi,
        lambda: cfg.lambda,
        above_mu1: flags.above_mu1,
        above_mu2: flags.above_mu2,
        above_mu3: flags.above_mu3,
        above_mu3_mu4: flags.above_mu3_mu4,
        regime_change: false,
        status: outcome.status.as_str().into(),
        reason: outcome.reason,
        t_final: Some(outcome.t_final),
        mass_min: summary.tail.map(|t| t.mass_min),
        lp2_max: summary.tail.map(|t| t.lp2_max),
        min_v_min: summary.tail.map(|t| t.min_v_min),
        dist_sup_final: summary.tail.map(|t| t.dist_sup_final),
        fitted_l2sq: summary.rates.fitted_l2sq,
        fitted_energy: summary.rates.fitted_energy,
        predicted_energy: Some(summary.rates.predicted_energy),
        predicted_sup: Some(summary.rates.predicted_sup),
    }
}

/// Worker count: `requested`, capped by [`THREADS_ENV`] and by the number
/// of cells.
pub fn worker_count(requested: usize, cells: usize) -> usize {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    requested.min(cap.unwrap_or(usize::MAX)).min(cells).max(1)
}

/// Runs every cell of the sweep under `dir` and writes `dir/sweep.csv`.
/// Rows are sorted by `(mu, chi, lambda)`.
pub fn run_sweep(cfg: &SweepConfig, dir: &Path, parallel: Option<usize>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let cells = cfg.cells();
    let workers = worker_count(parallel.unwrap_or(cfg.parallelism), cells.len());
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell_cfg) = cells.get(k) else { break };
                let name = format!("cell_{k:04}");
                let row = run_cell(name.clone(), cell_cfg, &dir.join(&name));
                rows.lock().unwrap_or_else(|p| p.into_inner()).push(row);
            });
        }
    });
    let mut rows = rows.into_inner().unwrap_or_else(|p| p.into_inner());
    rows.sort_by(|a, b| {
        (a.mu, a.chi, a.lambda).partial_cmp(&(b.mu, b.chi, b.lambda)).unwrap().then_with(|| a.cell.cmp(&b.cell))
    });
    for k in 1..rows.len() {
        rows[k].regime_change = rows[k].above_mu3 != rows[k - 1].above_mu3;
    }
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_writer(fs::File::create(&path).map_err(|e| LabError::io(&path, e))?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| LabError::io(&path, e))?;
    Ok(rows)
}
