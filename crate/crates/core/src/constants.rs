//! Explicit constants: the heat-kernel constant δ₀, the four μ thresholds,
//! the decay coefficient μ̃, and the regime classification built on them.
//!
//! Every threshold is a literal evaluation of its closed form. Where the
//! closed form has no value (a negative base under a fractional power) the
//! evaluation reports [`Error::DomainViolation`] instead of guessing.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, pow, sqrt};

use crate::quadrature::integrate_adaptive;
use crate::{Error, Result};

/// A threshold value, or the reason it is undefined for these arguments.
pub type Threshold = Result<f64>;

/// Model coefficients `χ, r, μ, α, β, λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub chi: f64,
    pub r: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl Coefficients {
    pub fn validate(&self) -> Result<()> {
        let rates = [self.r, self.mu, self.alpha, self.beta];
        if rates.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidParams("r, mu, alpha, beta must be positive and finite"));
        }
        // χ = 0 switches chemotaxis off and leaves the logistic reference problem
        if !(self.chi.is_finite() && self.chi >= 0.0) {
            return Err(Error::InvalidParams("chi must be nonnegative and finite"));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidParams("lambda must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `u* = r/μ`.
    pub fn u_star(&self) -> f64 {
        self.r / self.mu
    }

    /// `v* = (β/α)(r/μ)`.
    pub fn v_star(&self) -> f64 {
        self.beta / self.alpha * self.r / self.mu
    }
}

fn finite(x: f64) -> Threshold {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::DomainViolation("threshold overflows f64"))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("lambda must lie in (0, 1)"))
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if chi.is_finite() && chi >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("chi must be nonnegative"))
    }
}

fn check_positive(values: &[f64]) -> Result<()> {
    if values.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidInput("arguments must be positive and finite"))
    }
}

/// `δ₀ = ∫₀^∞ (4πt)^{−N/2} exp(−(t + diam²/(4t))) dt`.
///
/// After `t = eˢ` the integrand decays double-exponentially in both
/// directions; the interval is cut where it falls below `e^{−80}` of its
/// peak and the rest is handled by adaptive Gauss–Kronrod.
pub fn delta0(n_dim: u32, diam: f64) -> Result<f64> {
    if n_dim < 2 {
        return Err(Error::InvalidInput("spatial dimension must be at least 2"));
    }
    check_positive(&[diam])?;
    let nu = 1.0 - n_dim as f64 / 2.0;
    let a = diam * diam / 4.0;
    let log_integrand = move |s: f64| nu * s - exp(s) - a * exp(-s);

    // h'(s) = ν − eˢ + a e⁻ˢ = 0 is a quadratic in eˢ
    let peak = libm::log((nu + sqrt(nu * nu + 4.0 * a)) / 2.0);
    let top = log_integrand(peak);
    let cutoff = top - 80.0;
    let mut lo = peak - 1.0;
    while log_integrand(lo) > cutoff {
        lo -= 1.0;
    }
    let mut hi = peak + 1.0;
    while log_integrand(hi) > cutoff {
        hi += 1.0;
    }

    // integrate e^{h(s) − h(peak)} and restore the scale afterwards
    let scaled = integrate_adaptive(|s| exp(log_integrand(s) - top), lo, hi, 1e-15);
    let prefactor = pow(4.0 * PI, -(n_dim as f64) / 2.0);
    Ok(prefactor * exp(top) * scaled)
}

/// `μ₁*(p, λ, χ, β)`; needs `p > 1 + λ`.
pub fn mu1_star(p: f64, lambda: f64, chi: f64, beta: f64) -> Threshold {
    check_lambda(lambda)?;
    check_chi(chi)?;
    check_positive(&[p, beta])?;
    if p <= 1.0 + lambda {
        return Err(Error::DomainViolation("mu1* needs p > 1 + lambda"));
    }
    let e = 1.0 / (1.0 - lambda);
    let inner = pow(2.0 * pow(p, 4.0) * (p + lambda) / pow(p - 1.0 - lambda, 3.0), (p + 1.0) / (2.0 * p) * e);
    let bracket = pow(4.0 * lambda, e) * inner + 1.0;
    finite(
        beta * (1.0 - lambda)
            * pow(lambda, lambda * e)
            * pow(chi, e)
            * (p - 1.0)
            * pow(p, (2.0 * lambda - 1.0) * e)
            * pow(2.0, -lambda * e)
            * bracket,
    )
}

/// `μ₂*(N, λ, χ, β)`; needs `N > 2(1 + λ)`, so it is never defined for N = 2.
pub fn mu2_star(n_dim: u32, lambda: f64, chi: f64, beta: f64) -> Threshold {
    check_lambda(lambda)?;
    check_chi(chi)?;
    check_positive(&[beta])?;
    let n = n_dim as f64;
    let base = n - 2.0 * (1.0 + lambda);
    if base <= 0.0 {
        return Err(Error::DomainViolation("mu2* needs N > 2(1 + lambda)"));
    }
    let e = 1.0 / (1.0 - lambda);
    let inner = pow(pow(n, 4.0) * (n + 2.0 * lambda) / (2.0 * pow(base, 3.0)), (n + 2.0) / (2.0 * n) * e);
    let bracket = pow(4.0 * lambda, e) * inner + 1.0;
    finite(
        beta * (1.0 - lambda)
            * pow(lambda, lambda * e)
            * pow(chi, e)
            * (n - 2.0)
            * pow(n, (2.0 * lambda - 1.0) * e)
            * pow(2.0, -2.0 * lambda * e)
            * bracket,
    )
}

/// `μ₃*(N, λ, χ, β)`; defined for every `N ≥ 2`.
pub fn mu3_star(n_dim: u32, lambda: f64, chi: f64, beta: f64) -> Threshold {
    check_lambda(lambda)?;
    check_chi(chi)?;
    check_positive(&[beta])?;
    if n_dim < 2 {
        return Err(Error::DomainViolation("mu3* needs N >= 2"));
    }
    let n = n_dim as f64;
    let e = 1.0 / (1.0 - lambda);
    let inner = pow(
        32.0 * pow(n, 4.0) * (2.0 * n + lambda) / pow(2.0 * n - 1.0 - lambda, 3.0),
        (2.0 * n + 1.0) / (4.0 * n) * e,
    );
    let bracket = pow(4.0 * lambda, e) * inner + 1.0;
    finite(
        0.5 * beta
            * (1.0 - lambda)
            * pow(lambda, lambda * e)
            * pow(chi, e)
            * (2.0 * n - 1.0)
            * pow(n, (2.0 * lambda - 1.0) * e)
            * bracket,
    )
}

/// Which of the two expressions attained a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    First,
    Second,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::First => "first",
            Branch::Second => "second",
        }
    }
}

fn min_branch(first: f64, second: f64) -> (f64, Branch) {
    if first <= second {
        (first, Branch::First)
    } else {
        (second, Branch::Second)
    }
}

fn check_q_eta(q: f64, eta: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput("q must lie in (0, 1)"));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidInput("eta must lie in (0, 1]"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu4 {
    pub value: f64,
    pub branch: Branch,
    pub first: f64,
    pub second: f64,
}

/// `μ₄*(q, λ, χ, α, β, r, η, δ₀, |Ω|)`, the smaller of its two powers.
/// `μ` itself does not enter.
pub fn mu4_star(c: &Coefficients, q: f64, eta: f64, delta0: f64, area: f64) -> Result<Mu4> {
    check_lambda(c.lambda)?;
    check_chi(c.chi)?;
    check_positive(&[c.r, c.alpha, c.beta, delta0, area])?;
    check_q_eta(q, eta)?;
    let l = c.lambda;
    let floor = pow(pow(eta, 1.0 / q) * delta0 * area, -l);
    let rpow = pow(c.r, 1.0 - 2.0 * l);
    let first = pow(c.beta * c.chi / c.alpha * rpow / pow(2.0, 2.0 + l) * floor, 1.0 / (1.0 - l));
    let second = pow(
        pow(c.beta, 2.0 - l) * rpow / pow(c.alpha, 1.0 - l) * c.chi * c.chi / pow(2.0, 4.0 + l) * floor,
        1.0 / (2.0 - 2.0 * l),
    );
    let (value, branch) = min_branch(first, second);
    Ok(Mu4 { value: finite(value)?, branch, first, second })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuTilde {
    pub value: f64,
    pub branch: Branch,
    /// `μ − μ̃`; the energy decays only when this is positive.
    pub margin: f64,
}

impl MuTilde {
    pub fn is_decaying(&self) -> bool {
        self.margin > 0.0
    }
}

/// Asymptotic floor `(2r/μ) η^{1/q} δ₀ |Ω|` for `inf v`.
pub fn persistence_floor(c: &Coefficients, q: f64, eta: f64, delta0: f64, area: f64) -> Result<f64> {
    check_positive(&[c.r, c.mu, delta0, area])?;
    check_q_eta(q, eta)?;
    Ok(2.0 * c.r / c.mu * pow(eta, 1.0 / q) * delta0 * area)
}

/// `μ̃`, the smaller of the two coefficients bounding the cross-diffusion
/// term in the energy identity once `inf v` sits above
/// [`persistence_floor`].
pub fn mu_tilde(c: &Coefficients, q: f64, eta: f64, delta0: f64, area: f64) -> Result<MuTilde> {
    c.validate()?;
    check_positive(&[delta0, area])?;
    check_q_eta(q, eta)?;
    let inv_floor = c.mu / (2.0 * c.r * delta0 * area * pow(eta, 1.0 / q));
    let l = c.lambda;
    let chi2 = c.chi * c.chi;
    let first = c.beta * c.beta * chi2 / (16.0 * c.alpha) * pow(inv_floor, 2.0 * l);
    let second = c.beta * chi2 / 16.0 * pow(c.mu / c.r, l) * pow(c.beta / c.alpha, 1.0 - l) * pow(inv_floor, l);
    let (value, branch) = min_branch(first, second);
    let value = finite(value)?;
    Ok(MuTilde { value, branch, margin: c.mu - value })
}

/// Inputs of the threshold report besides the model coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdInputs {
    /// Spatial dimension entering the constants; independent of the 2-D grid.
    pub n_dim: u32,
    /// Exponents `p` at which `μ₁*` is evaluated.
    pub p_list: Vec<f64>,
    pub q: f64,
    pub eta: f64,
    pub lx: f64,
    pub ly: f64,
}

impl ThresholdInputs {
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn diam(&self) -> f64 {
        sqrt(self.lx * self.lx + self.ly * self.ly)
    }
}

/// Which threshold conditions the coefficients satisfy. `None` means the
/// condition involves an undefined threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    /// `μ > μ₁*(p)` for every listed `p`.
    pub above_mu1: Option<bool>,
    /// `μ > μ₂*`.
    pub above_mu2: Option<bool>,
    /// `μ > μ₃* > μ₂*`; reduces to `μ > μ₃*` when `μ₂*` is undefined.
    pub above_mu3: Option<bool>,
    /// `μ > max{μ₃*, μ₄*}`.
    pub above_mu3_mu4: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub n_dim: u32,
    pub q: f64,
    pub eta: f64,
    pub area: f64,
    pub diam: f64,
    pub delta0: f64,
    pub mu1: Vec<(f64, Threshold)>,
    pub mu2: Threshold,
    pub mu3: Threshold,
    pub mu4: Mu4,
    pub mu_tilde: MuTilde,
    /// Floor for `inf v` implied by `η`, `q` and δ₀.
    pub v_floor_eta: f64,
    /// `r(μ − μ̃)/μ`, guaranteed exponential rate of the energy.
    pub rate_energy: f64,
    /// `rate_energy/(N + 2)`, the rate carried over to the sup norm.
    pub rate_sup: f64,
    pub flags: RegimeFlags,
}

impl ThresholdReport {
    pub fn evaluate(c: &Coefficients, inputs: &ThresholdInputs) -> Result<Self> {
        c.validate()?;
        check_q_eta(inputs.q, inputs.eta)?;
        check_positive(&[inputs.lx, inputs.ly])?;
        if inputs.p_list.iter().any(|p| !(p.is_finite() && *p >= 2.0)) {
            return Err(Error::InvalidInput("every p must be finite and at least 2"));
        }
        let (area, diam) = (inputs.area(), inputs.diam());
        let delta0 = delta0(inputs.n_dim, diam)?;
        let mu1: Vec<(f64, Threshold)> =
            inputs.p_list.iter().map(|&p| (p, mu1_star(p, c.lambda, c.chi, c.beta))).collect();
        let mu2 = mu2_star(inputs.n_dim, c.lambda, c.chi, c.beta);
        let mu3 = mu3_star(inputs.n_dim, c.lambda, c.chi, c.beta);
        let mu4 = mu4_star(c, inputs.q, inputs.eta, delta0, area)?;
        let mu_tilde = mu_tilde(c, inputs.q, inputs.eta, delta0, area)?;
        let v_floor_eta = persistence_floor(c, inputs.q, inputs.eta, delta0, area)?;
        let rate_energy = c.r * mu_tilde.margin / c.mu;
        let rate_sup = rate_energy / (inputs.n_dim as f64 + 2.0);

        let above_mu1 = if mu1.is_empty() {
            None
        } else {
            mu1.iter()
                .map(|(_, t)| t.as_ref().ok().map(|&m| c.mu > m))
                .collect::<Option<Vec<bool>>>()
                .map(|all| all.iter().all(|&b| b))
        };
        let above_mu2 = mu2.as_ref().ok().map(|&m| c.mu > m);
        let above_mu3 = mu3.as_ref().ok().map(|&m3| c.mu > m3 && mu2.as_ref().map_or(true, |&m2| m3 > m2));
        let above_mu3_mu4 = mu3.as_ref().ok().map(|&m3| c.mu > m3.max(mu4.value));

        Ok(ThresholdReport {
            n_dim: inputs.n_dim,
            q: inputs.q,
            eta: inputs.eta,
            area,
            diam,
            delta0,
            mu1,
            mu2,
            mu3,
            mu4,
            mu_tilde,
            v_floor_eta,
            rate_energy,
            rate_sup,
            flags: RegimeFlags { above_mu1, above_mu2, above_mu3, above_mu3_mu4 },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::time::Instant;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn coeffs(mu: f64) -> Coefficients {
        Coefficients { chi: 1.0, r: 1.0, mu, alpha: 1.0, beta: 1.0, lambda: 0.5 }
    }

    #[test]
    fn delta0_closed_forms() {
        // N = 3 reduces to e^{−d}/(4πd)
        assert!(rel(delta0(3, 1.0).unwrap(), (-1.0f64).exp() / (4.0 * PI)) < 1e-12);
        assert!(rel(delta0(3, 1.0).unwrap(), 2.927_491_576_215_958e-2) < 1e-12);
        // N = 2 gives K₀(1)/(2π)
        assert!(rel(delta0(2, 1.0).unwrap(), 6.700_812_050_849_714e-2) < 1e-12);
    }

    #[test]
    fn delta0_is_decreasing_in_diameter() {
        assert!(delta0(2, 2.0).unwrap() < delta0(2, 1.0).unwrap());
        let mut prev = f64::INFINITY;
        for k in 1..30 {
            let d = delta0(4, 0.2 * k as f64).unwrap();
            assert!(d > 0.0 && d < prev);
            prev = d;
        }
    }

    #[test]
    fn delta0_is_fast() {
        let start = Instant::now();
        for _ in 0..10 {
            delta0(2, core::f64::consts::SQRT_2).unwrap();
        }
        assert!(start.elapsed().as_secs_f64() < 0.1);
    }

    #[test]
    fn delta0_rejects_bad_input() {
        assert!(delta0(1, 1.0).is_err());
        assert!(delta0(2, 0.0).is_err());
    }

    #[test]
    fn mu1_reference_and_scalings() {
        let base = mu1_star(2.0, 0.5, 1.0, 1.0).unwrap();
        assert!(rel(base, 8_095.555_810_031_051) < 1e-12);
        assert!(rel(mu1_star(2.0, 0.5, 1.0, 2.0).unwrap(), 2.0 * base) < 1e-14);
        for lambda in [0.2, 0.5, 0.7] {
            let one = mu1_star(3.0, lambda, 1.0, 1.0).unwrap();
            let scaled = mu1_star(3.0, lambda, 2.5, 1.0).unwrap();
            assert!(rel(scaled / one, 2.5f64.powf(1.0 / (1.0 - lambda))) < 1e-13);
        }
        assert!(matches!(mu1_star(1.4, 0.5, 1.0, 1.0), Err(Error::DomainViolation(_))));
        assert!(matches!(mu1_star(1.5, 0.5, 1.0, 1.0), Err(Error::DomainViolation(_))));
        assert!(mu1_star(2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn mu2_mu3_reference_values() {
        assert!(rel(mu2_star(4, 0.5, 1.0, 1.0).unwrap(), 8_095.555_810_031_051) < 1e-12);
        assert!(rel(mu3_star(2, 0.5, 1.0, 1.0).unwrap(), 771.135_269_605_812_9) < 1e-12);
        assert!(matches!(mu2_star(2, 0.5, 1.0, 1.0), Err(Error::DomainViolation(_))));
        assert!(matches!(mu2_star(2, 0.01, 1.0, 1.0), Err(Error::DomainViolation(_))));
        assert!(matches!(mu2_star(3, 0.5, 1.0, 1.0), Err(Error::DomainViolation(_))));
        assert!(mu2_star(3, 0.49, 1.0, 1.0).is_ok());
    }

    #[test]
    fn mu3_exceeds_mu2_on_lattice() {
        let mut checked = 0;
        for n in [6, 7, 8, 10, 12] {
            for lambda in [0.05, 0.25, 0.5, 0.75, 0.9] {
                for chi in [0.1, 1.0, 7.0, 40.0] {
                    let (m2, m3) = (mu2_star(n, lambda, chi, 1.3).unwrap(), mu3_star(n, lambda, chi, 1.3).unwrap());
                    assert!(m3 > m2, "N={n} λ={lambda} χ={chi}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 100);
    }

    #[test]
    fn mu4_reference_and_monotonicity() {
        let c = coeffs(1.0);
        let m = mu4_star(&c, 0.5, 1.0, 0.067, 1.0).unwrap();
        assert_eq!(m.branch, Branch::Second);
        assert!(rel(m.value, 0.170_736_988_971_297_8) < 1e-12);
        assert!(rel(m.first, 0.466_417_910_447_761_2) < 1e-12);
        let lower = mu4_star(&c, 0.5, 0.5, 0.067, 1.0).unwrap();
        assert!(lower.value > m.value);
        for r in [0.01, 3.0, 100.0] {
            let other = mu4_star(&Coefficients { r, ..c }, 0.5, 1.0, 0.067, 1.0).unwrap();
            assert!(rel(other.value, m.value) < 1e-14);
        }
        assert!(mu4_star(&c, 1.0, 1.0, 0.067, 1.0).is_err());
        assert!(mu4_star(&c, 0.5, 0.0, 0.067, 1.0).is_err());
    }

    #[test]
    fn mu_tilde_reference_and_limits() {
        let c = coeffs(1.0);
        let t = mu_tilde(&c, 0.5, 1.0, 0.067, 1.0).unwrap();
        assert!(rel(t.value, 0.170_736_988_971_297_8) < 1e-12);
        assert_eq!(t.branch, Branch::Second);
        assert!(t.is_decaying());
        let tiny = mu_tilde(&Coefficients { chi: 1e-6, ..c }, 0.5, 1.0, 0.067, 1.0).unwrap();
        assert!(tiny.value < 1e-11);
        let mut prev = f64::INFINITY;
        for d in [0.01, 0.03, 0.1, 0.3] {
            let v = mu_tilde(&c, 0.5, 1.0, d, 1.0).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn report_for_the_unit_square() {
        let inputs = ThresholdInputs { n_dim: 2, p_list: vec![2.0, 4.0], q: 0.5, eta: 1.0, lx: 1.0, ly: 1.0 };
        let report = ThresholdReport::evaluate(&coeffs(1000.0), &inputs).unwrap();
        assert!(rel(report.delta0, 0.038_060_664_938_979_49) < 1e-12);
        assert!(report.mu2.is_err());
        assert!(rel(*report.mu3.as_ref().unwrap(), 771.135_269_605_812_9) < 1e-12);
        assert_eq!(report.flags.above_mu1, Some(false));
        assert_eq!(report.flags.above_mu2, None);
        assert_eq!(report.flags.above_mu3, Some(true));
        assert_eq!(report.flags.above_mu3_mu4, Some(true));
        assert!(rel(report.mu_tilde.value, 226.530_578_378_937) < 1e-12);
        assert_eq!(report.rate_sup, report.rate_energy / 4.0);
        assert!(rel(report.v_floor_eta, 2e-3 * report.delta0) < 1e-15);
    }

    #[test]
    fn ordering_clause_fails_in_three_dimensions() {
        // μ₃* < μ₂* at N = 3 for λ < 1/2, so no μ satisfies the condition
        let inputs = ThresholdInputs { n_dim: 3, p_list: vec![], q: 0.5, eta: 1.0, lx: 1.0, ly: 1.0 };
        let c = Coefficients { lambda: 0.2, mu: 1e12, ..coeffs(1.0) };
        let report = ThresholdReport::evaluate(&c, &inputs).unwrap();
        assert!(report.mu3.as_ref().unwrap() < report.mu2.as_ref().unwrap());
        assert_eq!(report.flags.above_mu2, Some(true));
        assert_eq!(report.flags.above_mu3, Some(false));
        assert_eq!(report.flags.above_mu1, None);
    }

    #[test]
    fn report_rejects_out_of_range_inputs() {
        let inputs = ThresholdInputs { n_dim: 2, p_list: vec![1.5], q: 0.5, eta: 1.0, lx: 1.0, ly: 1.0 };
        assert!(ThresholdReport::evaluate(&coeffs(1.0), &inputs).is_err());
        let inputs = ThresholdInputs { p_list: vec![2.0], q: 1.5, ..inputs };
        assert!(ThresholdReport::evaluate(&coeffs(1.0), &inputs).is_err());
    }
}
