//! Per-sample norms, the logarithmic energy, the inequality ledger and
//! decay-rate fitting.
//!
//! Gradient integrals in the ledger use face differences, the same stencil
//! as `Δ_h`, so that discrete summation by parts reproduces the continuum
//! identities they are compared against. `grad_u_max` and the energy
//! derivative use centered differences.

use alloc::vec;
use alloc::vec::Vec;

use libm::{log1p, pow, sqrt};

use crate::constants::{Coefficients, ThresholdReport};
use crate::grid::{gradient_centered, ScalarField};
use crate::{Error, Result};

/// The energy is left undefined when `min u` is at or below this.
pub const ENERGY_MIN_U: f64 = 1e-14;

pub const V_LOWER: &str = "V_LOWER";
pub const MASS_UPPER: &str = "MASS_UPPER";
pub const V_DEV: &str = "V_DEV";
pub const GRAD_V: &str = "GRAD_V";
pub const GRAD_V_REL: &str = "GRAD_V_REL";
pub const ENERGY_SANDWICH_LOWER: &str = "ENERGY_SANDWICH_LOWER";
pub const ENERGY_SANDWICH_UPPER: &str = "ENERGY_SANDWICH_UPPER";
pub const V_FLOOR_ETA: &str = "V_FLOOR_ETA";

/// Name of the `∫v^p ≤ (β/α)^p ∫u^p` entry for `p ∈ {1, 2, 4}`.
pub fn vp_upper_name(p: u32) -> &'static str {
    match p {
        1 => "VP_UPPER_1",
        2 => "VP_UPPER_2",
        4 => "VP_UPPER_4",
        _ => "VP_UPPER",
    }
}

const VP_EXPONENTS: [u32; 3] = [1, 2, 4];

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl LedgerEntry {
    pub fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        LedgerEntry { name, lhs, rhs, slack, pass: passes(lhs, rhs) }
    }
}

/// `rhs − lhs ≥ −(1e−6·|rhs| + 1e−12)`.
pub fn passes(lhs: f64, rhs: f64) -> bool {
    rhs - lhs >= -(1e-6 * rhs.abs() + 1e-12)
}

/// `s − 1 − ln s` at `s = 1 + d`, accurate near `d = 0`.
fn log_excess(d: f64) -> f64 {
    if d.abs() < 0.1 {
        let mut sum = 0.0;
        let mut power = d;
        for k in 2..20 {
            power *= -d;
            sum -= power / k as f64;
        }
        sum
    } else {
        d - log1p(d)
    }
}

/// `E = ∫ [u − u* − u* ln(u/u*)]` with `u* = r/μ`.
pub fn energy(u: &ScalarField, r: f64, mu: f64) -> Result<f64> {
    if !(r > 0.0 && mu > 0.0) {
        return Err(Error::InvalidInput("r and mu must be positive"));
    }
    let min_u = u.min();
    if !(min_u > ENERGY_MIN_U) {
        return Err(Error::UndefinedEnergy { min_u });
    }
    let u_star = r / mu;
    let sum: f64 = u.values().iter().map(|&s| log_excess(s / u_star - 1.0)).sum();
    Ok(u_star * sum * u.grid().cell_area())
}

/// `∫|∇v|²` and `∫|∇v|²/v²` from face differences; the second uses
/// `v_L v_R` for `v²` on each face.
fn face_gradient_integrals(v: &ScalarField) -> (f64, f64) {
    let grid = *v.grid();
    let vals = v.values();
    let (ihx2, ihy2) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
    let (mut plain, mut relative) = (0.0, 0.0);
    let mut add = |a: f64, b: f64, ih2: f64| {
        let d2 = (b - a) * (b - a) * ih2;
        plain += d2;
        relative += d2 / (a * b);
    };
    for j in 0..grid.ny() {
        for i in 1..grid.nx() {
            add(vals[grid.index(i - 1, j)], vals[grid.index(i, j)], ihx2);
        }
    }
    for j in 1..grid.ny() {
        for i in 0..grid.nx() {
            add(vals[grid.index(i, j - 1)], vals[grid.index(i, j)], ihy2);
        }
    }
    (plain * grid.cell_area(), relative * grid.cell_area())
}

fn power_integral(u: &ScalarField, p: f64) -> f64 {
    u.grid().cell_area() * u.values().iter().map(|&x| pow(x.max(0.0), p)).sum::<f64>()
}

/// Everything [`sample`] needs besides the fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleContext {
    pub coeffs: Coefficients,
    pub delta0: f64,
    pub v_floor_eta: f64,
    /// `∫u₀`, for the mass bound.
    pub initial_mass: f64,
    /// Exponents for the `∫u^p` columns.
    pub p_set: Vec<f64>,
    pub q: f64,
    /// `V_FLOOR_ETA` is checked from this time on.
    pub t_late: f64,
    /// Whether `V_LOWER` is checked; on by default only for `α = β = 1`.
    pub v_lower: bool,
}

impl SampleContext {
    pub fn new(coeffs: Coefficients, report: &ThresholdReport, initial_mass: f64, t_end: f64) -> Self {
        SampleContext {
            coeffs,
            delta0: report.delta0,
            v_floor_eta: report.v_floor_eta,
            initial_mass,
            p_set: vec![2.0, 4.0],
            q: report.q,
            t_late: 0.5 * t_end,
            v_lower: coeffs.alpha == 1.0 && coeffs.beta == 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub mass: f64,
    /// `(p, ∫u^p)` for each configured `p`.
    pub lp: Vec<(f64, f64)>,
    pub lq: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_v: f64,
    pub max_v: f64,
    pub grad_u_max: f64,
    pub grad_v_l2sq: f64,
    /// `None` when `min u ≤ 1e−14`.
    pub energy: Option<f64>,
    pub dist_sup: f64,
    pub l2sq_dev: f64,
    pub ledger: Vec<LedgerEntry>,
}

impl DiagnosticsSample {
    pub fn lp(&self, p: f64) -> Option<f64> {
        self.lp.iter().find(|(q, _)| *q == p).map(|&(_, v)| v)
    }

    pub fn entry(&self, name: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.ledger.iter().all(|e| e.pass)
    }
}

pub fn sample(t: f64, u: &ScalarField, v: &ScalarField, ctx: &SampleContext) -> DiagnosticsSample {
    let c = &ctx.coeffs;
    let (u_star, v_star) = (c.u_star(), c.v_star());
    let cell = u.grid().cell_area();
    let area = u.grid().area();
    let mass = u.integral();
    let dev_u = cell * u.values().iter().map(|&x| (x - u_star) * (x - u_star)).sum::<f64>();
    let dev_v = cell * v.values().iter().map(|&x| (x - v_star) * (x - v_star)).sum::<f64>();
    let dist_sup = u.values().iter().fold(0.0f64, |m, &x| m.max((x - u_star).abs()));
    let (gx, gy) = gradient_centered(u);
    let grad_u_max = gx.values().iter().zip(gy.values()).fold(0.0f64, |m, (a, b)| m.max(sqrt(a * a + b * b)));
    let (grad_v_l2sq, grad_v_rel) = face_gradient_integrals(v);
    let energy = energy(u, c.r, c.mu).ok();
    let (min_u, max_u, min_v) = (u.min(), u.max(), v.min());

    let mut ledger = Vec::new();
    if ctx.v_lower {
        ledger.push(LedgerEntry::new(V_LOWER, ctx.delta0 * mass, min_v));
    }
    let ratio = c.beta / c.alpha;
    for p in VP_EXPONENTS {
        let pf = p as f64;
        ledger.push(LedgerEntry::new(vp_upper_name(p), power_integral(v, pf), pow(ratio, pf) * power_integral(u, pf)));
    }
    ledger.push(LedgerEntry::new(MASS_UPPER, mass, ctx.initial_mass.max(u_star * area)));
    ledger.push(LedgerEntry::new(V_DEV, dev_v, ratio * ratio * dev_u));
    ledger.push(LedgerEntry::new(GRAD_V, grad_v_l2sq, c.beta * c.beta / (4.0 * c.alpha) * dev_u));
    ledger.push(LedgerEntry::new(GRAD_V_REL, grad_v_rel, c.beta * c.mu / (4.0 * c.r) / min_v * dev_u));
    if let Some(e) = energy {
        if min_u >= 0.5 * u_star && max_u <= 2.0 * u_star {
            ledger.push(LedgerEntry::new(ENERGY_SANDWICH_LOWER, c.mu / (4.0 * c.r) * dev_u, e));
            ledger.push(LedgerEntry::new(ENERGY_SANDWICH_UPPER, e, c.mu / c.r * dev_u));
        }
    }
    if t >= ctx.t_late {
        ledger.push(LedgerEntry::new(V_FLOOR_ETA, ctx.v_floor_eta, min_v));
    }

    DiagnosticsSample {
        t,
        mass,
        lp: ctx.p_set.iter().map(|&p| (p, power_integral(u, p))).collect(),
        lq: power_integral(u, ctx.q),
        min_u,
        max_u,
        min_v,
        max_v: v.max(),
        grad_u_max,
        grad_v_l2sq,
        energy,
        dist_sup,
        l2sq_dev: dev_u,
        ledger,
    }
}

/// `|(e_curr − e_prev)/dt − Ė|` where
/// `Ė = −u* ∫ |∇u|²/u² + u* χ ∫ ∇u·∇v/(u v^λ) − μ ∫ (u − u*)²`
/// is evaluated at `(u, v)`, the state belonging to `e_prev`.
pub fn energy_derivative_check(
    u: &ScalarField,
    v: &ScalarField,
    coeffs: &Coefficients,
    e_prev: f64,
    e_curr: f64,
    dt: f64,
) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive"));
    }
    let min_u = u.min();
    if !(min_u > ENERGY_MIN_U) {
        return Err(Error::UndefinedEnergy { min_u });
    }
    if !(v.min() > 0.0) {
        return Err(Error::SingularSensitivity { min_v: v.min() });
    }
    let u_star = coeffs.u_star();
    let (ux, uy) = gradient_centered(u);
    let (vx, vy) = gradient_centered(v);
    let mut dissipation = 0.0;
    let mut cross = 0.0;
    let mut sink = 0.0;
    for k in 0..u.values().len() {
        let s = u.values()[k];
        let (ax, ay) = (ux.values()[k], uy.values()[k]);
        dissipation += (ax * ax + ay * ay) / (s * s);
        cross += (ax * vx.values()[k] + ay * vy.values()[k]) / (s * pow(v.values()[k], coeffs.lambda));
        sink += (s - u_star) * (s - u_star);
    }
    let cell = u.grid().cell_area();
    let rhs = cell * (-u_star * dissipation + u_star * coeffs.chi * cross - coeffs.mu * sink);
    Ok(((e_curr - e_prev) / dt - rhs).abs())
}

/// Least-squares slope of `ln y` against `t` over the samples with
/// `lo ≤ y ≤ hi`, negated so that decay is positive.
pub fn fit_decay_rate(series: &[(f64, f64)], lo: f64, hi: f64) -> Result<f64> {
    let window: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, y)| t.is_finite() && *y > 0.0 && *y >= lo && *y <= hi)
        .map(|&(t, y)| (t, libm::log(y)))
        .collect();
    if window.len() < 5 {
        return Err(Error::InsufficientData { points: window.len() });
    }
    let n = window.len() as f64;
    let t_mean = window.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = window.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for &(t, y) in &window {
        sty += (t - t_mean) * (y - y_mean);
        stt += (t - t_mean) * (t - t_mean);
    }
    if !(stt > 0.0) {
        return Err(Error::InsufficientData { points: window.len() });
    }
    Ok(-sty / stt)
}
