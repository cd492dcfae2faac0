//! Signal equation `0 = Δv − αv + βu` with homogeneous Neumann data.
//!
//! The discrete operator `αI − Δ_h` is a symmetric M-matrix, so the solve
//! uses preconditioned conjugate gradients and the solution inherits the
//! discrete maximum principle: `u ≥ 0, u ≢ 0` gives `v > 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{laplacian_into, Grid, ScalarField};
use crate::linsolve::{norm, pcg};
use crate::{Error, Result};

/// Entries of `u` at or above this value are clamped to zero before a solve.
pub const NEGATIVE_ROUNDOFF: f64 = -1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticConfig {
    /// Residual target `‖Av − βu‖₂ ≤ rel_tol·(‖β(u − ⟨u⟩)‖₂ + 1e−12·‖βu‖₂)`,
    /// never looser than `rel_tol·‖βu‖₂` up to the `1e−12`.
    pub rel_tol: f64,
    /// Iteration budget; `None` means `10·(nx + ny)`.
    pub max_iter: Option<usize>,
}

impl Default for EllipticConfig {
    fn default() -> Self {
        EllipticConfig { rel_tol: 1e-10, max_iter: None }
    }
}

impl EllipticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::InvalidParams("rel_tol must lie in (0, 1e-2]"));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidParams("max_iter must be at least 1"));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, grid: &Grid) -> usize {
        self.max_iter.unwrap_or(10 * (grid.nx() + grid.ny()))
    }
}

/// Diagonal of `αI − Δ_h`; boundary cells lose the reflected neighbor.
pub(crate) fn helmholtz_diagonal(grid: &Grid, alpha: f64) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let ihx2 = 1.0 / (grid.hx() * grid.hx());
    let ihy2 = 1.0 / (grid.hy() * grid.hy());
    let mut d = vec![0.0; grid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let links_x = (i > 0) as u8 + (i + 1 < nx) as u8;
            let links_y = (j > 0) as u8 + (j + 1 < ny) as u8;
            d[grid.index(i, j)] = alpha + links_x as f64 * ihx2 + links_y as f64 * ihy2;
        }
    }
    d
}

pub(crate) fn helmholtz_into(grid: &Grid, alpha: f64, f: &[f64], out: &mut [f64]) {
    laplacian_into(grid, f, out);
    for (o, &x) in out.iter_mut().zip(f) {
        *o = alpha * x - *o;
    }
}

/// `α f − Δ_h f`.
pub fn apply_helmholtz(f: &ScalarField, alpha: f64) -> ScalarField {
    let mut out = vec![0.0; f.values().len()];
    helmholtz_into(f.grid(), alpha, f.values(), &mut out);
    ScalarField::from_raw(*f.grid(), out)
}

fn check_source(u: &ScalarField, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidInput("alpha and beta must be positive"));
    }
    if u.min() < NEGATIVE_ROUNDOFF {
        return Err(Error::InvalidInput("u is negative"));
    }
    let clamped: Vec<f64> = u.values().iter().map(|&x| x.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidInput("u has no mass"));
    }
    Ok(clamped)
}

/// Solves `(αI − Δ_h) v = β u`, starting from the constant `β⟨u⟩/α`.
pub fn solve_signal(u: &ScalarField, alpha: f64, beta: f64, cfg: &EllipticConfig) -> Result<ScalarField> {
    let mean = u.values().iter().map(|x| x.max(0.0)).sum::<f64>() / u.values().len() as f64;
    let guess = vec![beta * mean / alpha; u.values().len()];
    solve_with_guess(u, alpha, beta, cfg, guess)
}

/// As [`solve_signal`], warm-started from `guess` (typically the previous
/// step's signal).
pub fn solve_signal_from(
    u: &ScalarField,
    alpha: f64,
    beta: f64,
    cfg: &EllipticConfig,
    guess: &ScalarField,
) -> Result<ScalarField> {
    if guess.grid() != u.grid() {
        return Err(Error::InvalidInput("initial guess lives on a different grid"));
    }
    solve_with_guess(u, alpha, beta, cfg, guess.values().to_vec())
}

fn solve_with_guess(
    u: &ScalarField,
    alpha: f64,
    beta: f64,
    cfg: &EllipticConfig,
    guess: Vec<f64>,
) -> Result<ScalarField> {
    cfg.validate()?;
    let grid = *u.grid();
    let source = check_source(u, alpha, beta)?;
    // Constants are eigenvectors, so the mean is solved exactly and CG only
    // sees the fluctuation; the tolerance then scales with the deviation
    // from the mean instead of with the mean itself.
    let mean = source.iter().sum::<f64>() / source.len() as f64;
    let level = beta * mean / alpha;
    let rhs: Vec<f64> = source.iter().map(|x| beta * (x - mean)).collect();
    let mut w: Vec<f64> = guess.iter().map(|g| g - level).collect();
    // the floor keeps an exactly constant source reachable from a noisy guess
    let floor = 1e-12 * beta * norm(&source);
    let target = cfg.rel_tol * (norm(&rhs) + floor);
    let diag = helmholtz_diagonal(&grid, alpha);
    pcg(|x, y| helmholtz_into(&grid, alpha, x, y), &diag, &rhs, &mut w, target, cfg.max_iter_for(&grid))?;
    ScalarField::new(grid, w.into_iter().map(|x| level + x).collect())
}
