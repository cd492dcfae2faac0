//! Time stepping for `u`.
//!
//! One step solves
//!
//! ```text
//! (I + dt μ diag(uⁿ) − dt Δ_h) uⁿ⁺¹ = uⁿ − dt D(uⁿ, w) + dt r uⁿ
//! ```
//!
//! with `D` the conservative first-order upwind divergence of `u w` and
//! `w = χ v^{−λ} ∇v` on cell faces. The matrix is an M-matrix and the right
//! side is nonnegative once `dt` respects the per-cell outflow bound of
//! [`FaceVelocity::dt_limit`], so `uⁿ⁺¹ ≥ 0`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::pow;

use crate::constants::Coefficients;
use crate::elliptic::{solve_signal, solve_signal_from, EllipticConfig, NEGATIVE_ROUNDOFF};
use crate::grid::{laplacian_into, Grid, ScalarField};
use crate::linsolve::{norm, pcg};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub coeffs: Coefficients,
    pub grid: Grid,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub u_cap: f64,
    pub v_floor: f64,
    /// Tolerance and budget shared by the signal solve and the implicit
    /// `u` solve.
    pub solver: EllipticConfig,
}

impl Params {
    /// Defaults: `dt ∈ [1e−9, 1e−2]` starting at `1e−3`, safety 0.5,
    /// `t_end = 1`, sentinels `u_cap = 1e8`, `v_floor = 1e−12`.
    pub fn new(coeffs: Coefficients, grid: Grid) -> Self {
        Params {
            coeffs,
            grid,
            dt_init: 1e-3,
            dt_min: 1e-9,
            dt_max: 1e-2,
            cfl_safety: 0.5,
            t_end: 1.0,
            u_cap: 1e8,
            v_floor: 1e-12,
            solver: EllipticConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.coeffs.validate()?;
        self.solver.validate()?;
        let positive = [self.dt_init, self.dt_min, self.dt_max, self.t_end, self.u_cap, self.v_floor];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidParams("time steps, t_end and sentinels must be positive"));
        }
        if !(self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::InvalidParams("need dt_min <= dt_init <= dt_max"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParams("cfl_safety must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    BlowUpSuspected,
    SolverFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Completed => "Completed",
            Status::BlowUpSuspected => "BlowUpSuspected",
            Status::SolverFailure => "SolverFailure",
        }
    }
}

pub const REASON_U_CAP: &str = "u_cap exceeded";
pub const REASON_V_FLOOR: &str = "v_floor crossed";
pub const REASON_DT_UNDERFLOW: &str = "dt underflow";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: Status,
    /// Empty for completed runs; a sentinel name or the solver error otherwise.
    pub reason: String,
    pub t_final: f64,
    pub steps: usize,
}

/// Normal velocities on the faces of a grid. `x` faces are stored row by
/// row, `nx + 1` per row, face `i` lying west of cell `i`; `y` faces are
/// stored as `ny + 1` rows of `nx`, row `j` lying south of cell row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceVelocity {
    grid: Grid,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl FaceVelocity {
    pub fn zeros(grid: Grid) -> Self {
        FaceVelocity { grid, x: vec![0.0; (grid.nx() + 1) * grid.ny()], y: vec![0.0; grid.nx() * (grid.ny() + 1)] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Velocity through the west face of cell `(i, j)`; `i` runs to `nx`.
    pub fn x_face(&self, i: usize, j: usize) -> f64 {
        self.x[j * (self.grid.nx() + 1) + i]
    }

    /// Velocity through the south face of cell `(i, j)`; `j` runs to `ny`.
    pub fn y_face(&self, i: usize, j: usize) -> f64 {
        self.y[j * self.grid.nx() + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().chain(&self.y).fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Largest over cells of the total outflow rate `Σ_out |w|/h`.
    pub fn max_outflow_rate(&self) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (ihx, ihy) = (1.0 / self.grid.hx(), 1.0 / self.grid.hy());
        let mut worst = 0.0f64;
        for j in 0..ny {
            for i in 0..nx {
                let out = (self.x_face(i + 1, j).max(0.0) - self.x_face(i, j).min(0.0)) * ihx
                    + (self.y_face(i, j + 1).max(0.0) - self.y_face(i, j).min(0.0)) * ihy;
                worst = worst.max(out);
            }
        }
        worst
    }

    /// `cfl_safety / max_outflow_rate`, infinite for a still field.
    pub fn dt_limit(&self, cfl_safety: f64) -> f64 {
        let rate = self.max_outflow_rate();
        if rate > 0.0 {
            cfl_safety / rate
        } else {
            f64::INFINITY
        }
    }

    /// Upwind divergence `D(u, w)` into `out`.
    fn upwind_divergence(&self, u: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (ihx, ihy) = (1.0 / self.grid.hx(), 1.0 / self.grid.hy());
        let flux = |w: f64, lo: f64, hi: f64| w.max(0.0) * lo + w.min(0.0) * hi;
        out.fill(0.0);
        for j in 0..ny {
            for i in 1..nx {
                let (l, r) = (self.grid.index(i - 1, j), self.grid.index(i, j));
                let f = flux(self.x_face(i, j), u[l], u[r]) * ihx;
                out[l] += f;
                out[r] -= f;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let (s, n) = (self.grid.index(i, j - 1), self.grid.index(i, j));
                let f = flux(self.y_face(i, j), u[s], u[n]) * ihy;
                out[s] += f;
                out[n] -= f;
            }
        }
    }
}

/// `w = χ ⟨v⟩^{−λ} ∂v` on interior faces, with `⟨v⟩` the mean of the two
/// adjacent cells and `∂v` their difference quotient. Boundary faces carry
/// zero velocity. `λ = 0` is accepted and gives `χ∇v` exactly.
pub fn chemotactic_velocity(v: &ScalarField, chi: f64, lambda: f64) -> Result<FaceVelocity> {
    if !(chi.is_finite() && chi >= 0.0 && (0.0..1.0).contains(&lambda)) {
        return Err(Error::InvalidInput("need chi >= 0 and lambda in [0, 1)"));
    }
    let min_v = v.min();
    if !(min_v > 0.0) {
        return Err(Error::SingularSensitivity { min_v });
    }
    let grid = *v.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let vals = v.values();
    let face = |a: f64, b: f64, h: f64| {
        let s = pow(0.5 * (a + b), -lambda);
        chi * s * (b - a) / h
    };
    let mut w = FaceVelocity::zeros(grid);
    for j in 0..ny {
        for i in 1..nx {
            w.x[j * (nx + 1) + i] = face(vals[grid.index(i - 1, j)], vals[grid.index(i, j)], grid.hx());
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            w.y[j * nx + i] = face(vals[grid.index(i, j - 1)], vals[grid.index(i, j)], grid.hy());
        }
    }
    Ok(w)
}

/// One step from `(u, v)`; computes the face velocity from `v` first.
pub fn imex_step(u: &ScalarField, v: &ScalarField, p: &Params, dt: f64) -> Result<ScalarField> {
    if u.grid() != v.grid() {
        return Err(Error::InvalidInput("u and v live on different grids"));
    }
    let w = chemotactic_velocity(v, p.coeffs.chi, p.coeffs.lambda)?;
    imex_step_with_velocity(u, &w, p, dt)
}

/// One step with a precomputed face velocity.
///
/// Only `χ, r, μ ≥ 0` is required of the coefficients here, so pure
/// diffusion (`r = μ = χ = 0`) is a valid special case.
pub fn imex_step_with_velocity(u: &ScalarField, w: &FaceVelocity, p: &Params, dt: f64) -> Result<ScalarField> {
    let grid = *u.grid();
    if w.grid() != &grid {
        return Err(Error::InvalidInput("velocity lives on a different grid"));
    }
    let (r, mu) = (p.coeffs.r, p.coeffs.mu);
    if !(r.is_finite() && r >= 0.0 && mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidInput("r and mu must be nonnegative"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive"));
    }
    if u.min() < NEGATIVE_ROUNDOFF {
        return Err(Error::InvalidInput("u is negative"));
    }
    p.solver.validate()?;
    let limit = w.dt_limit(p.cfl_safety);
    if dt > limit {
        return Err(Error::CflViolation { dt, limit });
    }
    if dt * r > 1.0 {
        return Err(Error::CflViolation { dt, limit: 1.0 / r });
    }

    let un: Vec<f64> = u.values().iter().map(|x| x.max(0.0)).collect();
    let n = un.len();
    let mut div = vec![0.0; n];
    w.upwind_divergence(&un, &mut div);
    let rhs: Vec<f64> = un.iter().zip(&div).map(|(&x, &d)| x * (1.0 + dt * r) - dt * d).collect();

    let (ihx2, ihy2) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
    let mut diag = vec![0.0; n];
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let k = grid.index(i, j);
            let links_x = (i > 0) as u8 + (i + 1 < grid.nx()) as u8;
            let links_y = (j > 0) as u8 + (j + 1 < grid.ny()) as u8;
            diag[k] = 1.0 + dt * mu * un[k] + dt * (links_x as f64 * ihx2 + links_y as f64 * ihy2);
        }
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        laplacian_into(&grid, x, y);
        for k in 0..x.len() {
            y[k] = x[k] * (1.0 + dt * mu * un[k]) - dt * y[k];
        }
    };

    // Solving for the increment from a zero guess keeps the solve scale
    // invariant: round-off scales with the increment, not with u. The
    // target is relative to the initial residual, tightened by the mass
    // term so the discrete mass balance holds to rel_tol, and floored at
    // what the operator norm allows in floating point.
    let mut au = vec![0.0; n];
    apply(&un, &mut au);
    let r0: Vec<f64> = rhs.iter().zip(&au).map(|(b, a)| b - a).collect();
    let r0_norm = norm(&r0);
    let mass_scale = dt * r * un.iter().sum::<f64>() / libm::sqrt(n as f64);
    let op_norm = 2.0 * diag.iter().copied().fold(0.0, f64::max);
    let floor = 16.0 * f64::EPSILON * op_norm * r0_norm;
    let target = (p.solver.rel_tol * r0_norm.min(mass_scale)).max(floor);

    let mut delta = vec![0.0; n];
    pcg(apply, &diag, &r0, &mut delta, target, p.solver.max_iter_for(&grid))?;
    let mut x: Vec<f64> = un.iter().zip(&delta).map(|(a, d)| a + d).collect();
    if x.iter().any(|&v| v < NEGATIVE_ROUNDOFF) {
        return Err(Error::DomainViolation("step produced negative u"));
    }
    for v in &mut x {
        *v = v.max(0.0);
    }
    ScalarField::new(grid, x)
}

/// Final state of [`simulate`]. `v` is `None` only when the very first
/// signal solve failed.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub outcome: RunOutcome,
    pub u: ScalarField,
    pub v: Option<ScalarField>,
}

/// Runs from `u0` to `p.t_end`.
///
/// Each pass solves for `v`, hands `(t, u, v)` to `sampler` when `t` is a
/// multiple of `every` (and at `t_end`), checks the sentinels, then takes
/// one step. The step is `min(dt_max, velocity limit, 0.5/r)`, may at most
/// double from one step to the next, starts at `dt_init`, and is shortened
/// to land exactly on sample times and on `t_end`.
pub fn simulate(
    u0: &ScalarField,
    p: &Params,
    mut sampler: impl FnMut(f64, &ScalarField, &ScalarField),
    every: f64,
) -> Result<Simulation> {
    p.validate()?;
    if u0.grid() != &p.grid {
        return Err(Error::InvalidInput("u0 lives on a different grid"));
    }
    if u0.min() < NEGATIVE_ROUNDOFF || u0.integral() <= 0.0 {
        return Err(Error::InvalidInput("u0 must be nonnegative with positive mass"));
    }
    if !(every.is_finite() && every > 0.0) {
        return Err(Error::InvalidInput("sampling interval must be positive"));
    }

    let c = &p.coeffs;
    let growth_limit = 0.5 / c.r;
    let snap = 1e-12 * every.min(p.t_end);
    let mut u = u0.map(|x| x.max(0.0))?;
    let mut v_prev: Option<ScalarField> = None;
    let mut t = 0.0;
    let mut steps = 0;
    let mut next_sample = 0u64;
    let mut dt_cap = p.dt_init;

    let finish = |status: Status, reason: &str, t: f64, steps: usize, u: ScalarField, v: Option<ScalarField>| {
        Ok(Simulation { outcome: RunOutcome { status, reason: reason.into(), t_final: t, steps }, u, v })
    };

    loop {
        let solved = match &v_prev {
            None => solve_signal(&u, c.alpha, c.beta, &p.solver),
            Some(g) => solve_signal_from(&u, c.alpha, c.beta, &p.solver, g),
        };
        let v = match solved {
            Ok(v) => v,
            Err(e) => return finish(Status::SolverFailure, &alloc::format!("{e}"), t, steps, u, v_prev),
        };
        debug_assert!(u.min() >= 0.0 && v.min() > 0.0);

        let done = t >= p.t_end - snap;
        let sample_time = next_sample as f64 * every;
        if t >= sample_time - snap || done {
            sampler(t, &u, &v);
            while next_sample as f64 * every <= t + snap {
                next_sample += 1;
            }
        }

        if u.max() > p.u_cap {
            return finish(Status::BlowUpSuspected, REASON_U_CAP, t, steps, u, Some(v));
        }
        if v.min() < p.v_floor {
            return finish(Status::BlowUpSuspected, REASON_V_FLOOR, t, steps, u, Some(v));
        }
        if done {
            return finish(Status::Completed, "", t, steps, u, Some(v));
        }

        let w = match chemotactic_velocity(&v, c.chi, c.lambda) {
            Ok(w) => w,
            Err(e) => return finish(Status::SolverFailure, &alloc::format!("{e}"), t, steps, u, Some(v)),
        };
        let stable = p.dt_max.min(w.dt_limit(p.cfl_safety)).min(growth_limit);
        if stable < p.dt_min {
            return finish(Status::BlowUpSuspected, REASON_DT_UNDERFLOW, t, steps, u, Some(v));
        }
        let mut dt = stable.min(dt_cap);
        dt_cap = 2.0 * dt;
        let next_stop = (next_sample as f64 * every).min(p.t_end);
        let landing = dt >= next_stop - t - snap;
        if landing {
            dt = next_stop - t;
        }

        match imex_step_with_velocity(&u, &w, p, dt) {
            Ok(next) => u = next,
            Err(e) => return finish(Status::SolverFailure, &alloc::format!("{e}"), t, steps, u, Some(v)),
        }
        t = if landing { next_stop } else { t + dt };
        steps += 1;
        v_prev = Some(v);
    }
}
