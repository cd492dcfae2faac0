//! Initial data.

use std::f64::consts::PI;

use chemolab_core::ScalarField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialKind, ScenarioConfig};
use crate::error::{LabError, Result};

pub fn initial_data(cfg: &ScenarioConfig) -> Result<ScalarField> {
    let grid = cfg.grid()?;
    let c = cfg.base_level();
    let a = cfg.amplitude;
    let u0 = match cfg.initial {
        InitialKind::Constant => ScalarField::constant(grid, c)?,
        InitialKind::Perturbed => {
            let (kx, ky) = (cfg.kx as f64 * PI / cfg.lx, cfg.ky as f64 * PI / cfg.ly);
            ScalarField::from_fn(grid, |x, y| (c + a * (kx * x).cos() * (ky * y).cos()).max(0.0))?
        }
        InitialKind::Random => {
            let seed = cfg.seed.ok_or_else(|| LabError::Config("random initial data needs a seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ScalarField::from_fn(grid, |_, _| (c + a * rng.random_range(-1.0..=1.0)).max(0.0))?
        }
    };
    if u0.integral() <= 0.0 {
        return Err(LabError::Config("initial data has no mass".into()));
    }
    Ok(u0)
}
