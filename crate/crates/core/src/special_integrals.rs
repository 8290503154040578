//! Relativistic kinetic integrals
//!
//! `J_{m,n}(γ) = ∫₀^∞ e^{-γ cosh s} coshⁿ s sinhᵐ s ds` and their
//! internal-energy weighted moments. Every value leaves this module multiplied
//! by `e^{γ}` so that large-γ evaluations never underflow; downstream code only
//! ever forms ratios at a common γ, where the factor cancels.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{self, Tolerance};

/// Controls for every nested quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target relative error of the outermost integral.
    pub rel_tol: f64,
    /// Absolute error floor, guards against chasing underflowed tails.
    pub abs_floor: f64,
    /// Integrands are truncated once they have decayed this many decades below their peak.
    pub s_cut_decades: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_floor: 1e-300,
            s_cut_decades: 40.0,
            max_subdivisions: 400,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return domain(format!("rel_tol must lie in (0, 1e-3], got {}", self.rel_tol));
        }
        if !(self.abs_floor > 0.0) {
            return domain("abs_floor must be positive");
        }
        if !(self.s_cut_decades > 0.0 && self.s_cut_decades.is_finite()) {
            return domain("s_cut_decades must be positive");
        }
        if self.max_subdivisions < 8 {
            return domain("max_subdivisions must be at least 8");
        }
        Ok(())
    }

    fn tolerance(&self, rel: f64) -> Tolerance {
        Tolerance {
            rel,
            abs: self.abs_floor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn cut(&self) -> f64 {
        self.s_cut_decades * LN_10
    }
}

/// Unit system of a gas description. Only natural units (m = c = k_B = 1) exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
}

/// Gas-level constants: internal-energy measure `φ(I) = I^a` and relaxation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    pub a_poly: f64,
    pub tau: f64,
    pub units: Units,
}

impl GasParameters {
    pub fn new(a_poly: f64, tau: f64) -> Result<Self> {
        let gas = Self {
            a_poly,
            tau,
            units: Units::Natural,
        };
        gas.validate()?;
        Ok(gas)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_poly > -1.0) || !self.a_poly.is_finite() {
            return domain(format!("a_poly must exceed -1, got {}", self.a_poly));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return domain(format!("tau must be nonnegative, got {}", self.tau));
        }
        Ok(())
    }
}

/// A value carried as `value = e^{shift} · true_value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub shift: f64,
    pub est_error: f64,
}

impl Scaled {
    /// The true (possibly underflowing) value.
    pub fn unscaled(&self) -> f64 {
        self.value * (-self.shift).exp()
    }
}

/// `e^{γ} ∫₀^∞ J*_{m,n} (1 + I)^p φ(I) dI` with `J* = J(γ(1+I))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMoment {
    pub m: u32,
    pub n: i32,
    pub p_power: u32,
    pub value: f64,
    pub est_error: f64,
}

fn check_indices(m: u32, n: i32) -> Result<()> {
    if n < -1 {
        return domain(format!("n must be at least -1, got {n}"));
    }
    if n == -1 && m < 2 {
        return domain(format!("n = -1 needs m >= 2, got m = {m}"));
    }
    Ok(())
}

/// `ln` of the rescaled integrand `e^{-γ(cosh s - 1)} coshⁿ s sinhᵐ s`.
fn log_integrand_s(m: u32, n: i32, gamma: f64, s: f64) -> f64 {
    let half = (0.5 * s).sinh();
    let cosh_m1 = 2.0 * half * half;
    let mut v = -gamma * cosh_m1 + n as f64 * s.cosh().ln();
    if m > 0 {
        v += m as f64 * s.sinh().ln();
    }
    v
}

/// Truncation point for a log-concave-ish integrand on `[0, ∞)`: scans for the
/// peak, then walks out until the integrand sits `cut` below it.
fn truncation_point(log_f: impl Fn(f64) -> f64, start: f64, cut: f64) -> f64 {
    let samples = 256;
    let mut peak = f64::NEG_INFINITY;
    for i in 1..=samples {
        let v = log_f(start * i as f64 / samples as f64);
        if v.is_finite() {
            peak = peak.max(v);
        }
    }
    let mut end = start;
    for _ in 0..200 {
        let v = log_f(end);
        if v.is_finite() && v < peak - cut && v < log_f(0.9 * end) {
            break;
        }
        let probe = log_f(end);
        if probe.is_finite() {
            peak = peak.max(probe);
        }
        end *= 1.25;
    }
    end
}

/// `e^{γ} J_{m,n}(γ)` by adaptive quadrature in the hyperbolic angle `s`.
pub fn j_mn(m: u32, n: i32, gamma: f64, cfg: &QuadratureConfig) -> Result<Scaled> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    check_indices(m, n)?;
    j_mn_at_tol(m, n, gamma, cfg, cfg.rel_tol)
}

fn j_mn_at_tol(m: u32, n: i32, gamma: f64, cfg: &QuadratureConfig, rel: f64) -> Result<Scaled> {
    let cut = cfg.cut();
    let s0 = (1.0 + cut / gamma).acosh();
    let s_max = truncation_point(|s| log_integrand_s(m, n, gamma, s), s0, cut);
    let est = quadrature::integrate(
        |s| {
            if s <= 0.0 && m > 0 {
                0.0
            } else {
                log_integrand_s(m, n, gamma, s).exp()
            }
        },
        0.0,
        s_max,
        cfg.tolerance(rel),
    )?;
    Ok(Scaled {
        value: est.value,
        shift: gamma,
        est_error: est.error,
    })
}

/// `e^{γ} J_{m,n}(γ)` through the substitution `cosh s = 1 + t²/γ`, which
/// turns the integral into `2 γ^{-(m+1)/2} ∫ e^{-t²} tᵐ (1+t²/γ)ⁿ (2+t²/γ)^{(m-1)/2} dt`.
/// Structurally independent of [`j_mn`]; used as a cross-check and for very large γ.
pub fn j_mn_laplace(m: u32, n: i32, gamma: f64, cfg: &QuadratureConfig) -> Result<Scaled> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    check_indices(m, n)?;
    let half_m1 = (m as f64 - 1.0) / 2.0;
    let log_f = |t: f64| {
        let y = t * t / gamma;
        let mut v = -t * t + n as f64 * y.ln_1p() + half_m1 * (2.0 + y).ln();
        if m > 0 {
            v += m as f64 * t.ln();
        }
        v
    };
    let cut = cfg.cut();
    let t_max = truncation_point(log_f, cut.sqrt(), cut);
    let est = quadrature::integrate(
        |t| if t <= 0.0 && m > 0 { 0.0 } else { log_f(t).exp() },
        0.0,
        t_max,
        cfg.tolerance(cfg.rel_tol),
    )?;
    let pref = 2.0 * gamma.powf(-(m as f64 + 1.0) / 2.0);
    Ok(Scaled {
        value: pref * est.value,
        shift: gamma,
        est_error: pref * est.error,
    })
}

/// Internal-energy weighted moment of `J_{m,n}`.
///
/// With `x = γI` the outer weight becomes `e^{-x} x^a`, and the inner factor is
/// the rescaled `e^{γ*} J_{m,n}(γ*)` at `γ* = γ + x`; the overall `e^{γ}` is kept
/// off the books.
pub fn weighted_j(m: u32, n: i32, p_power: u32, gamma: f64, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<WeightedMoment> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    check_indices(m, n)?;
    gas.validate()?;
    let a = gas.a_poly;
    let inner_rel = 0.05 * cfg.rel_tol;
    let cut = cfg.cut();

    // Bound for the truncation scan; the inner factor only decreases in x.
    let log_bound = |x: f64| -x + a * x.ln() + p_power as f64 * (x / gamma).ln_1p();
    let x_max = truncation_point(log_bound, cut, cut);

    let mut inner_err: f64 = 0.0;
    let mut failure = None;
    let mut integrand = |x: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        match j_mn_at_tol(m, n, gamma + x, cfg, inner_rel) {
            Ok(j) => {
                let w = (-x).exp() * (1.0 + x / gamma).powi(p_power as i32);
                inner_err = inner_err.max(j.est_error / j.value.abs().max(f64::MIN_POSITIVE));
                w * j.value
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };

    let est = if a < 0.0 {
        // u = x^{a+1} removes the integrable endpoint singularity.
        let ap1 = a + 1.0;
        let u_max = x_max.powf(ap1);
        let inv = 1.0 / ap1;
        let r = quadrature::integrate(
            |u| if u <= 0.0 { integrand(0.0) } else { integrand(u.powf(inv)) },
            0.0,
            u_max,
            cfg.tolerance(cfg.rel_tol),
        );
        r.map(|e| quadrature::Estimate {
            value: e.value * inv,
            error: e.error * inv,
            ..e
        })
    } else if a == 0.0 {
        quadrature::integrate(&mut integrand, 0.0, x_max, cfg.tolerance(cfg.rel_tol))
    } else {
        quadrature::integrate(
            |x| if x <= 0.0 { 0.0 } else { x.powf(a) * integrand(x) },
            0.0,
            x_max,
            cfg.tolerance(cfg.rel_tol),
        )
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    let norm = gamma.powf(-a - 1.0);
    let value = norm * est.value;
    let est_error = norm * est.error + value.abs() * inner_err;
    Ok(WeightedMoment {
        m,
        n,
        p_power,
        value,
        est_error,
    })
}

/// Leading coefficients of the large-γ expansion of `J_{2,1}`.
pub const J21_SERIES: [f64; 4] = [1.0 / 4.0, 15.0 / 32.0, 105.0 / 512.0, -315.0 / (32.0 * 128.0)];

/// Leading coefficients of the large-γ expansion of `J_{4,-1}`.
pub const J4M1_SERIES: [f64; 2] = [3.0 / 4.0, -15.0 / 32.0];

const SERIES_GAMMA_FLOOR: f64 = 5.0;

fn series_sum(coeffs: &[f64], gamma: f64, order: usize, first_power: i32) -> f64 {
    coeffs[..order]
        .iter()
        .enumerate()
        .map(|(i, c)| c * gamma.powi(-(first_power + i as i32)))
        .sum()
}

/// Asymptotic series for `e^{γ} J_{2,1}(γ)`, truncated after `order` terms.
pub fn j21_series(gamma: f64, order: usize) -> Result<Scaled> {
    if !(gamma >= SERIES_GAMMA_FLOOR) {
        return domain(format!("asymptotic series needs gamma >= 5, got {gamma}"));
    }
    if !(1..=4).contains(&order) {
        return domain(format!("J21 series order must be 1..=4, got {order}"));
    }
    let pref = 2.0 * (2.0 * PI).sqrt() / gamma.sqrt();
    let value = pref * series_sum(&J21_SERIES, gamma, order, 1);
    let next = if order < 4 {
        (pref * J21_SERIES[order] * gamma.powi(-(order as i32 + 1))).abs()
    } else {
        f64::NAN
    };
    Ok(Scaled {
        value,
        shift: gamma,
        est_error: next,
    })
}

/// Relative size of the first term the four-term `J_{2,1}` series drops.
///
/// `J_{2,1} = K_2(γ)/γ`, and the large-argument expansion of `K_ν` has
/// coefficients `Π_{i=1..k} (4ν² − (2i−1)²) / (k! 8^k)`; for real ν the
/// remainder after `k > ν − 1/2` terms is bounded by the first omitted one.
/// Returned relative to the leading term.
pub fn j21_series_remainder_bound(gamma: f64) -> f64 {
    let nu2x4 = 16.0;
    let k = 4;
    let coeff = (1..=k).fold(1.0, |acc, i| acc * (nu2x4 - ((2 * i - 1) * (2 * i - 1)) as f64) / (i as f64 * 8.0));
    coeff.abs() / gamma.powi(k)
}

/// Asymptotic series for `e^{γ} J_{4,-1}(γ)`, truncated after `order` terms.
pub fn j4m1_series(gamma: f64, order: usize) -> Result<Scaled> {
    if !(gamma >= SERIES_GAMMA_FLOOR) {
        return domain(format!("asymptotic series needs gamma >= 5, got {gamma}"));
    }
    if !(1..=2).contains(&order) {
        return domain(format!("J4,-1 series order must be 1..=2, got {order}"));
    }
    let pref = 2.0 * (2.0 * PI).sqrt() * gamma.powf(-2.5);
    let value = pref * series_sum(&J4M1_SERIES, gamma, order, 0);
    let next = if order < 2 {
        (pref * J4M1_SERIES[order] / gamma).abs()
    } else {
        f64::NAN
    };
    Ok(Scaled {
        value,
        shift: gamma,
        est_error: next,
    })
}
