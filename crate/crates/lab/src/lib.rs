//! Scenario runner, parameter sweeps and threshold reports on top of
//! [`chemolab_core`].
//!
//! - [`config`]: JSON scenario and sweep files.
//! - [`init`]: constant, perturbed and seeded random initial data.
//! - [`scenario`]: one run and its `timeseries.csv`, `ledger.csv`,
//!   `summary.json`.
//! - [`sweep`]: Cartesian products of runs and `sweep.csv`.
//! - [`report`]: JSON form of the threshold report.

pub mod config;
mod error;
pub mod init;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use error::{LabError, Result};
