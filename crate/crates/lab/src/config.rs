//! Scenario and sweep configuration files.
//!
//! A scenario is one flat JSON object; every key except the coefficients
//! and `t_end` has a default. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use chemolab_core::constants::{Coefficients, ThresholdInputs};
use chemolab_core::elliptic::EllipticConfig;
use chemolab_core::stepper::Params;
use chemolab_core::Grid;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `u₀ ≡ c`.
    Constant,
    /// `u₀ = c + amplitude·cos(kx π x/lx)·cos(ky π y/ly)`.
    Perturbed,
    /// `u₀ = max(0, c + U[−amplitude, amplitude])`, one draw per cell.
    Random,
}

fn default_n() -> usize {
    64
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_dt_init() -> f64 {
    1e-3
}
fn default_dt_min() -> f64 {
    1e-9
}
fn default_dt_max() -> f64 {
    1e-2
}
fn default_u_cap() -> f64 {
    1e8
}
fn default_v_floor() -> f64 {
    1e-12
}
fn default_rel_tol() -> f64 {
    1e-10
}
fn default_n_dim() -> u32 {
    2
}
fn default_p_list() -> Vec<f64> {
    vec![2.0, 4.0]
}
fn default_sample_every() -> f64 {
    0.1
}
fn default_mode() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub chi: f64,
    pub r: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,

    #[serde(default = "default_n")]
    pub nx: usize,
    #[serde(default = "default_n")]
    pub ny: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,

    pub t_end: f64,
    #[serde(default = "default_dt_init")]
    pub dt_init: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "half")]
    pub cfl_safety: f64,
    #[serde(default = "default_u_cap")]
    pub u_cap: f64,
    #[serde(default = "default_v_floor")]
    pub v_floor: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub max_iter: Option<usize>,

    /// Dimension used by the threshold formulas, not by the grid.
    #[serde(default = "default_n_dim")]
    pub n_dim: u32,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    #[serde(default = "half")]
    pub q: f64,
    #[serde(default = "one")]
    pub eta: f64,

    pub initial: InitialKind,
    /// Base level of the initial data; defaults to `r/μ`.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_mode")]
    pub kx: u32,
    #[serde(default = "default_mode")]
    pub ky: u32,
    #[serde(default)]
    pub seed: Option<u64>,

    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    /// Start of the `V_FLOOR_ETA` checks; defaults to `t_end/2`.
    #[serde(default)]
    pub t_late: Option<f64>,
    /// Forces `V_LOWER` on or off; by default it is on only for `α = β = 1`.
    #[serde(default)]
    pub v_lower: Option<bool>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ScenarioConfig {
    /// A config with the given coefficients, constant data at `r/μ` and
    /// defaults everywhere else.
    pub fn new(coeffs: Coefficients, t_end: f64) -> Self {
        ScenarioConfig {
            chi: coeffs.chi,
            r: coeffs.r,
            mu: coeffs.mu,
            alpha: coeffs.alpha,
            beta: coeffs.beta,
            lambda: coeffs.lambda,
            nx: default_n(),
            ny: default_n(),
            lx: 1.0,
            ly: 1.0,
            t_end,
            dt_init: default_dt_init(),
            dt_min: default_dt_min(),
            dt_max: default_dt_max(),
            cfl_safety: 0.5,
            u_cap: default_u_cap(),
            v_floor: default_v_floor(),
            rel_tol: default_rel_tol(),
            max_iter: None,
            n_dim: default_n_dim(),
            p_list: default_p_list(),
            q: 0.5,
            eta: 1.0,
            initial: InitialKind::Constant,
            c: None,
            amplitude: 0.0,
            kx: 1,
            ky: 1,
            seed: None,
            sample_every: default_sample_every(),
            t_late: None,
            v_lower: None,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients { chi: self.chi, r: self.r, mu: self.mu, alpha: self.alpha, beta: self.beta, lambda: self.lambda }
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(Grid::new(self.nx, self.ny, self.lx, self.ly)?)
    }

    pub fn params(&self) -> Result<Params> {
        Ok(Params {
            coeffs: self.coefficients(),
            grid: self.grid()?,
            dt_init: self.dt_init,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            cfl_safety: self.cfl_safety,
            t_end: self.t_end,
            u_cap: self.u_cap,
            v_floor: self.v_floor,
            solver: EllipticConfig { rel_tol: self.rel_tol, max_iter: self.max_iter },
        })
    }

    pub fn threshold_inputs(&self) -> ThresholdInputs {
        ThresholdInputs {
            n_dim: self.n_dim,
            p_list: self.p_list.clone(),
            q: self.q,
            eta: self.eta,
            lx: self.lx,
            ly: self.ly,
        }
    }

    pub fn base_level(&self) -> f64 {
        self.c.unwrap_or(self.r / self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(LabError::Config(msg));
        self.params()?.validate().map_err(|e| LabError::Config(e.to_string()))?;
        if !(self.sample_every.is_finite() && self.sample_every > 0.0) {
            return fail("sample_every must be positive".into());
        }
        if self.n_dim < 2 {
            return fail("n_dim must be at least 2".into());
        }
        if self.p_list.iter().any(|p| !(p.is_finite() && *p >= 2.0)) {
            return fail("every entry of p_list must be at least 2".into());
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return fail("q must lie in (0, 1)".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return fail("eta must lie in (0, 1]".into());
        }
        let c = self.base_level();
        if !(c.is_finite() && c > 0.0) {
            return fail("c must be positive".into());
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return fail("amplitude must be nonnegative".into());
        }
        match self.initial {
            InitialKind::Constant => {}
            InitialKind::Perturbed => {
                if self.amplitude > c {
                    return fail("perturbed data needs amplitude <= c to stay nonnegative".into());
                }
            }
            InitialKind::Random => {
                if self.seed.is_none() {
                    return fail("random initial data needs a seed".into());
                }
            }
        }
        if let Some(t) = self.t_late {
            if !(t.is_finite() && t >= 0.0) {
                return fail("t_late must be nonnegative".into());
            }
        }
        Ok(())
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Mu,
    Chi,
    Lambda,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Mu => "mu",
            AxisName::Chi => "chi",
            AxisName::Lambda => "lambda",
        }
    }

    pub fn apply(self, cfg: &mut ScenarioConfig, value: f64) {
        match self {
            AxisName::Mu => cfg.mu = value,
            AxisName::Chi => cfg.chi = value,
            AxisName::Lambda => cfg.lambda = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

fn default_parallelism() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ScenarioConfig,
    pub axes: Vec<Axis>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(LabError::Config("parallelism must be at least 1".into()));
        }
        let mut seen = Vec::new();
        for axis in &self.axes {
            if seen.contains(&axis.name) {
                return Err(LabError::Config(format!("axis {} listed twice", axis.name.as_str())));
            }
            seen.push(axis.name);
            if axis.values.is_empty() {
                return Err(LabError::Config(format!("axis {} has no values", axis.name.as_str())));
            }
            for &v in &axis.values {
                let ok = match axis.name {
                    AxisName::Mu => v.is_finite() && v > 0.0,
                    AxisName::Chi => v.is_finite() && v >= 0.0,
                    AxisName::Lambda => v > 0.0 && v < 1.0,
                };
                if !ok {
                    return Err(LabError::Config(format!("axis {} has illegal value {v}", axis.name.as_str())));
                }
            }
        }
        self.base.validate()
    }

    /// Every combination of axis values, first axis varying slowest.
    pub fn cells(&self) -> Vec<ScenarioConfig> {
        let mut out = vec![self.base.clone()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|cfg| {
                    axis.values.iter().map(move |&v| {
                        let mut next = cfg.clone();
                        axis.name.apply(&mut next, v);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"chi": 1, "r": 1, "mu": 2, "alpha": 1, "beta": 1, "lambda": 0.5,
        "t_end": 1, "initial": "constant"}"#;

    #[test]
    fn defaults_fill_the_rest() {
        let cfg = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!((cfg.nx, cfg.ny), (64, 64));
        assert_eq!(cfg.p_list, vec![2.0, 4.0]);
        assert_eq!(cfg.base_level(), 0.5);
        assert_eq!(cfg.params().unwrap().cfl_safety, 0.5);
        let same = ScenarioConfig::new(cfg.coefficients(), 1.0);
        assert_eq!(cfg, same);
    }

    #[test]
    fn schema_violations_are_config_errors() {
        let unknown = MINIMAL.replace("\"t_end\"", "\"bogus\": 3, \"t_end\"");
        assert!(matches!(ScenarioConfig::from_json(&unknown), Err(LabError::Config(_))));
        let missing = MINIMAL.replace("\"chi\": 1,", "");
        assert!(matches!(ScenarioConfig::from_json(&missing), Err(LabError::Config(_))));
        let random = MINIMAL.replace("\"constant\"", "\"random\"");
        assert!(matches!(ScenarioConfig::from_json(&random), Err(LabError::Config(_))));
        let bad_lambda = MINIMAL.replace("0.5", "1.5");
        assert!(matches!(ScenarioConfig::from_json(&bad_lambda), Err(LabError::Config(_))));
    }

    #[test]
    fn sweep_cells_cover_the_product() {
        let sweep = SweepConfig {
            base: ScenarioConfig::from_json(MINIMAL).unwrap(),
            axes: vec![
                Axis { name: AxisName::Mu, values: vec![1.0, 2.0] },
                Axis { name: AxisName::Chi, values: vec![0.5, 1.0, 2.0] },
            ],
            parallelism: 2,
        };
        sweep.validate().unwrap();
        let cells = sweep.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!((cells[0].mu, cells[0].chi), (1.0, 0.5));
        assert_eq!((cells[5].mu, cells[5].chi), (2.0, 2.0));
        let twice = SweepConfig { axes: vec![sweep.axes[0].clone(), sweep.axes[0].clone()], ..sweep.clone() };
        assert!(twice.validate().is_err());
        let illegal = SweepConfig { axes: vec![Axis { name: AxisName::Lambda, values: vec![1.0] }], ..sweep };
        assert!(illegal.validate().is_err());
    }
}
