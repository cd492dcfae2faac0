//! Closed-form references for tests and acceptance runs.
//!
//! Nothing here calls into the solvers or the quadrature used by
//! [`crate::constants`]; each routine is an independent route to a value
//! the main code computes another way.

use core::f64::consts::PI;

use libm::{cos, cosh, exp, log};

use crate::grid::{Grid, ScalarField};
use crate::{Error, Result};

/// Logistic ODE `u' = r u − μ u²` started from `c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub c0: f64,
    pub r: f64,
    pub mu: f64,
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if [self.c0, self.r, self.mu].iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParams("logistic parameters must be positive"))
        }
    }
}

/// `u*/(1 + ((u* − c0)/c0) e^{−rt})` with `u* = r/μ`. This is the spatially
/// homogeneous solution of the full system, since then `∇v ≡ 0`.
pub fn logistic_exact(p: &LogisticParams, t: f64) -> f64 {
    let u_star = p.r / p.mu;
    u_star / (1.0 + (u_star - p.c0) / p.c0 * exp(-p.r * t))
}

/// Analytic pair `u = c + a cos(kπx/lx)`,
/// `v = βc/α + aβ cos(kπx/lx)/(α + (kπ/lx)²)` solving `Δv − αv + βu = 0`
/// with Neumann data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenmodePair {
    pub k: u32,
    pub amp: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lx: f64,
}

impl EigenmodePair {
    fn wavenumber(&self) -> f64 {
        self.k as f64 * PI / self.lx
    }

    pub fn u(&self, x: f64) -> f64 {
        self.c + self.amp * cos(self.wavenumber() * x)
    }

    pub fn v(&self, x: f64) -> f64 {
        let kk = self.wavenumber();
        self.beta * self.c / self.alpha + self.amp * self.beta * cos(kk * x) / (self.alpha + kk * kk)
    }

    /// `v''(x)`, for checking the equation without finite differences.
    pub fn v_xx(&self, x: f64) -> f64 {
        let kk = self.wavenumber();
        -kk * kk * self.amp * self.beta * cos(kk * x) / (self.alpha + kk * kk)
    }

    /// Amplitude of the cosine in `v`.
    pub fn v_amplitude(&self) -> f64 {
        let kk = self.wavenumber();
        self.amp * self.beta / (self.alpha + kk * kk)
    }

    /// Samples both members at the cell centers of `grid`.
    pub fn project(&self, grid: Grid) -> Result<(ScalarField, ScalarField)> {
        Ok((ScalarField::from_fn(grid, |x, _| self.u(x))?, ScalarField::from_fn(grid, |x, _| self.v(x))?))
    }
}

pub fn eigenmode_signal(k: u32, amp: f64, c: f64, alpha: f64, beta: f64, lx: f64) -> Result<EigenmodePair> {
    if !([c, alpha, beta, lx].iter().all(|x| x.is_finite() && *x > 0.0) && amp.is_finite()) {
        return Err(Error::InvalidParams("c, alpha, beta, lx must be positive"));
    }
    if amp.abs() >= c {
        return Err(Error::InvalidAmplitude);
    }
    Ok(EigenmodePair { k, amp, c, alpha, beta, lx })
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Ascending series `K₀(x) = −(ln(x/2) + γ) I₀(x) + Σ_{k≥1} (x²/4)^k H_k/(k!)²`.
fn bessel_k0_series(x: f64) -> f64 {
    let y = x * x / 4.0;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -(log(x / 2.0) + EULER_GAMMA) * i0 + tail
}

/// `K₀(x) = ∫₀^∞ e^{−x cosh t} dt` by the trapezoidal rule, which converges
/// geometrically for this analytic, rapidly decaying integrand.
fn bessel_k0_integral(x: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5;
    let mut t = h;
    loop {
        let g = exp(-x * (cosh(t) - 1.0));
        sum += g;
        if g < 1e-20 {
            break;
        }
        t += h;
    }
    h * sum * exp(-x)
}

/// Modified Bessel function of the second kind, order zero, for `x > 0`.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= 2.0 {
        bessel_k0_series(x)
    } else {
        bessel_k0_integral(x)
    }
}

/// δ₀ through `∫₀^∞ t^{ν−1} e^{−t−a/t} dt = 2 a^{ν/2} K_ν(2√a)` with
/// `ν = 1 − N/2`, `a = diam²/4`. For `N = 3`, `K_{1/2}` is elementary and
/// δ₀ = e^{−d}/(4πd); for `N = 2`, δ₀ = K₀(d)/(2π).
pub fn delta0_bessel(n_dim: u32, diam: f64) -> Result<f64> {
    if !(diam.is_finite() && diam > 0.0) {
        return Err(Error::InvalidInput("diameter must be positive"));
    }
    match n_dim {
        2 => Ok(bessel_k0(diam) / (2.0 * PI)),
        3 => Ok(exp(-diam) / (4.0 * PI * diam)),
        _ => Err(Error::Unsupported("closed form only for N = 2 and N = 3")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn logistic_fixed_point_and_half_time() {
        let fixed = LogisticParams { c0: 0.5, r: 2.0, mu: 4.0 };
        for t in [0.0, 0.3, 7.0, 100.0] {
            assert_eq!(logistic_exact(&fixed, t), 0.5);
        }
        let p = LogisticParams { c0: 0.1, r: 1.0, mu: 1.0 };
        assert!((logistic_exact(&p, 9.0f64.ln()) - 0.5).abs() < 1e-15);
        assert!((logistic_exact(&p, 40.0) - 1.0).abs() < 1e-12);
        assert_eq!(logistic_exact(&p, 0.0), 0.1);
    }

    #[test]
    fn logistic_satisfies_its_ode() {
        let p = LogisticParams { c0: 0.05, r: 1.5, mu: 3.0 };
        let u_star = p.r / p.mu;
        let dt = 1e-6;
        for k in 0..40 {
            let t = 0.25 * k as f64;
            let du = (logistic_exact(&p, t + dt) - logistic_exact(&p, t - dt)) / (2.0 * dt);
            let u = logistic_exact(&p, t);
            assert!((du - (p.r * u - p.mu * u * u)).abs() <= 1e-10 * p.r * u_star);
        }
        assert!(LogisticParams { c0: 0.0, ..p }.validate().is_err());
    }

    #[test]
    fn eigenmode_pairs() {
        let flat = eigenmode_signal(0, 0.3, 2.0, 0.5, 1.5, 1.0).unwrap();
        for x in [0.0, 0.37, 1.0] {
            assert!((flat.u(x) - 2.3).abs() < 1e-15);
            assert!((flat.v(x) - (6.0 + 0.9)).abs() < 1e-12);
        }
        let one = eigenmode_signal(1, 0.4, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((one.v_amplitude() - 0.4 / (1.0 + PI * PI)).abs() < 1e-16);
        for k in 0..5 {
            let pair = eigenmode_signal(k, -0.7, 1.0, 2.3, 0.6, 1.7).unwrap();
            for i in 0..20 {
                let x = 1.7 * i as f64 / 19.0;
                let res = pair.v_xx(x) - pair.alpha * pair.v(x) + pair.beta * pair.u(x);
                assert!(res.abs() < 1e-13);
            }
        }
        assert_eq!(eigenmode_signal(1, 1.0, 1.0, 1.0, 1.0, 1.0), Err(Error::InvalidAmplitude));
        assert_eq!(eigenmode_signal(1, -2.0, 1.0, 1.0, 1.0, 1.0), Err(Error::InvalidAmplitude));
    }

    #[test]
    fn k0_routes_agree() {
        assert!(rel(bessel_k0(1.0), 0.421_024_438_240_708_3) < 1e-14);
        assert!(rel(bessel_k0(0.1), 2.427_069_024_702_017) < 1e-14);
        assert!(rel(bessel_k0(5.0), 3.691_098_334_042_594e-3) < 1e-12);
        for x in [0.3, 1.0, 1.5, 2.0, 2.5] {
            assert!(rel(bessel_k0_series(x), bessel_k0_integral(x)) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn delta0_closed_forms() {
        assert!(rel(delta0_bessel(3, 1.0).unwrap(), 2.927_491e-2) < 1e-6);
        assert!(rel(delta0_bessel(3, 2.0).unwrap(), (-2.0f64).exp() / (8.0 * PI)) < 1e-15);
        assert!(rel(delta0_bessel(3, 2.0).unwrap(), 5.384_82e-3) < 1e-6);
        assert!(rel(delta0_bessel(2, 1.0).unwrap(), 6.700_812_050_849_714e-2) < 1e-13);
        assert!(matches!(delta0_bessel(4, 1.0), Err(Error::Unsupported(_))));
        assert!(delta0_bessel(2, -1.0).is_err());
    }
}
