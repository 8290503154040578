//! Large-γ behavior: the internal-energy average, the expansion of θ*_{1,1},
//! and the approach of all three methods to their common limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compare::{Point, PointSettings};
use crate::error::{domain, Result};
use crate::quadrature::{self, Tolerance};
use crate::special_integrals::{GasParameters, QuadratureConfig};
use crate::thermo::ThermoState;
use crate::transport::Method;

pub const SWEEP_GAMMA_MIN: f64 = 10.0;
pub const SWEEP_GAMMA_MAX: f64 = 1e4;

/// `⟨I/T⟩` under the weight `e^{-I/T} φ(I)`; equals `a + 1` for `φ = I^a`.
pub fn internal_energy_moment(_state: &ThermoState, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<f64> {
    gas.validate()?;
    cfg.validate()?;
    let a = gas.a_poly;
    let cut = cfg.s_cut_decades * std::f64::consts::LN_10;
    // e^{-x} x^{a+1} peaks at x = a+1
    let peak = (a + 1.0) * (a + 1.0).ln() - (a + 1.0);
    let mut x_max = cut.max(2.0 * (a + 1.0));
    while -x_max + (a + 1.0) * x_max.ln() > peak - cut {
        x_max *= 1.5;
    }
    let tol = Tolerance {
        rel: cfg.rel_tol,
        abs: cfg.abs_floor,
        max_subdivisions: cfg.max_subdivisions,
    };
    // u = x^{a+1} absorbs the weight x^a dx into du/(a+1)
    let inv = 1.0 / (a + 1.0);
    let u_max = x_max.powf(a + 1.0);
    let moment = |power: i32| {
        quadrature::integrate(
            |u| {
                if u <= 0.0 {
                    (power == 0) as u8 as f64
                } else {
                    let x = u.powf(inv);
                    (-x).exp() * x.powi(power)
                }
            },
            0.0,
            u_max,
            tol,
        )
    };
    Ok(moment(1)?.value / moment(0)?.value)
}

/// `θ*_{1,1} ≈ 1/γ + (−⟨I/T⟩ − 5/2)/γ²`, truncated after `order` terms.
pub fn theta11_star_expansion(state: &ThermoState, gas: &GasParameters, cfg: &QuadratureConfig, order: usize) -> Result<f64> {
    let g = state.gamma;
    if !(g >= 10.0) {
        return domain(format!("expansion needs gamma >= 10, got {g}"));
    }
    match order {
        1 => Ok(1.0 / g),
        2 => Ok(1.0 / g + (-internal_energy_moment(state, gas, cfg)? - 2.5) / (g * g)),
        _ => domain(format!("order must be 1 or 2, got {order}")),
    }
}

/// Linear extrapolation to `1/γ → 0` through two points.
pub fn richardson_pair(g1: f64, f1: f64, g2: f64, f2: f64) -> f64 {
    let (x1, x2) = (1.0 / g1, 1.0 / g2);
    (x1 * f2 - x2 * f1) / (x1 - x2)
}

/// One Richardson stage on the two largest-γ points. The error is the change
/// from the previous pair, or from the last raw value with only two points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub limit: f64,
    pub error: f64,
}

pub fn extrapolate(gammas: &[f64], values: &[f64]) -> Option<Extrapolated> {
    let n = gammas.len();
    if n < 2 || values.len() != n || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let last = richardson_pair(gammas[n - 2], values[n - 2], gammas[n - 1], values[n - 1]);
    let reference = if n >= 3 {
        richardson_pair(gammas[n - 3], values[n - 3], gammas[n - 2], values[n - 2])
    } else {
        values[n - 1]
    };
    Some(Extrapolated {
        limit: last,
        error: (last - reference).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodValues {
    pub method: Method,
    pub nu_hat: Option<f64>,
    pub chi_hat: Option<f64>,
    pub mu_hat: Option<f64>,
    /// `χ/(τp)`; unlike `chi_hat` it does not carry the factor `T`.
    pub chi_over_tau_p: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub gamma: f64,
    pub methods: Vec<MethodValues>,
    /// `γ² θ*_{2,3} / 3`
    pub theta23_star_scaled: Option<f64>,
    /// `γ(ω − 1)`
    pub energy_excess: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub quantity: String,
    pub method: Option<Method>,
    pub limit: f64,
    pub error: f64,
    /// Same extrapolation with the smallest γ dropped, when enough points remain.
    pub limit_without_first: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub a_poly: f64,
    pub gamma_grid: Vec<f64>,
    pub points: Vec<LimitPoint>,
    pub extrapolations: Vec<Extrapolation>,
}

impl LimitReport {
    pub fn extrapolation(&self, quantity: &str, method: Option<Method>) -> Option<&Extrapolation> {
        self.extrapolations.iter().find(|e| e.quantity == quantity && e.method == method)
    }

    /// Values of one per-method quantity along the grid.
    pub fn series(&self, method: Method, quantity: &str) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| {
                let m = p.methods.iter().find(|m| m.method == method)?;
                match quantity {
                    "nu_hat" => m.nu_hat,
                    "chi_hat" => m.chi_hat,
                    "mu_hat" => m.mu_hat,
                    "chi_over_tau_p" => m.chi_over_tau_p,
                    _ => None,
                }
            })
            .collect()
    }

    /// `|x_a − x_b| / |x_b|` along the grid for two methods.
    pub fn relative_gaps(&self, quantity: &str, a: Method, b: Method) -> Vec<Option<f64>> {
        self.series(a, quantity)
            .into_iter()
            .zip(self.series(b, quantity))
            .map(|(x, y)| Some(((x? - y?) / y?).abs()))
            .collect()
    }

    /// `chi_hat` at each grid point over its value at the previous point.
    pub fn chi_hat_ratios(&self, method: Method) -> Vec<Option<f64>> {
        let s = self.series(method, "chi_hat");
        s.windows(2).map(|w| Some(w[1]? / w[0]?)).collect()
    }
}

fn point_values(gamma: f64, gas: &GasParameters, settings: &PointSettings) -> LimitPoint {
    let point = match Point::new(gamma, gas, settings) {
        Ok(p) => p,
        Err(e) => {
            return LimitPoint {
                gamma,
                methods: Vec::new(),
                theta23_star_scaled: None,
                energy_excess: None,
                error: Some(e.to_string()),
            }
        }
    };
    let methods = Method::ALL
        .iter()
        .map(|&method| match point.transport(method, gas, settings) {
            Ok(r) => MethodValues {
                method,
                nu_hat: Some(r.nondimensional.nu_hat),
                chi_hat: Some(r.nondimensional.chi_hat),
                mu_hat: Some(r.nondimensional.mu_hat),
                chi_over_tau_p: Some(r.nondimensional.chi_hat * gamma),
                error: None,
            },
            Err(e) => MethodValues {
                method,
                nu_hat: None,
                chi_hat: None,
                mu_hat: None,
                chi_over_tau_p: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    LimitPoint {
        gamma,
        methods,
        theta23_star_scaled: point.table.theta_star(2, 3).ok().map(|t| gamma * gamma * t / 3.0),
        energy_excess: Some(gamma * (point.state.omega - 1.0)),
        error: None,
    }
}

fn extrapolation(quantity: &str, method: Option<Method>, gammas: &[f64], values: &[Option<f64>]) -> Option<Extrapolation> {
    let values: Option<Vec<f64>> = values.iter().copied().collect();
    let values = values?;
    let full = extrapolate(gammas, &values)?;
    let without_first = if gammas.len() > 2 {
        extrapolate(&gammas[1..], &values[1..]).map(|e| e.limit)
    } else {
        None
    };
    Some(Extrapolation {
        quantity: quantity.into(),
        method,
        limit: full.limit,
        error: full.error,
        limit_without_first: without_first,
    })
}

/// Evaluates every method on the grid (in parallel) and extrapolates the
/// nondimensional coefficients, `γ²θ*_{2,3}/3` and `γ(ω − 1)` to `γ → ∞`.
/// Points that fail keep their error message and leave their quantities out
/// of the extrapolations.
pub fn convergence_sweep(gamma_grid: &[f64], gas: &GasParameters, settings: &PointSettings) -> Result<LimitReport> {
    gas.validate()?;
    settings.cfg.validate()?;
    if gamma_grid.len() < 2 {
        return domain("convergence sweep needs at least two grid points");
    }
    if gamma_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("gamma grid must be strictly increasing");
    }
    if gamma_grid.iter().any(|g| !(SWEEP_GAMMA_MIN..=SWEEP_GAMMA_MAX).contains(g)) {
        return domain(format!("gamma grid must lie in [{SWEEP_GAMMA_MIN}, {SWEEP_GAMMA_MAX}]"));
    }
    let points: Vec<LimitPoint> = gamma_grid.par_iter().map(|&g| point_values(g, gas, settings)).collect();
    let mut report = LimitReport {
        a_poly: gas.a_poly,
        gamma_grid: gamma_grid.to_vec(),
        points,
        extrapolations: Vec::new(),
    };

    let mut ex = Vec::new();
    for method in Method::ALL {
        for q in ["nu_hat", "chi_hat", "mu_hat", "chi_over_tau_p"] {
            ex.extend(extrapolation(q, Some(method), gamma_grid, &report.series(method, q)));
        }
    }
    let t23: Vec<_> = report.points.iter().map(|p| p.theta23_star_scaled).collect();
    ex.extend(extrapolation("theta23_star_scaled", None, gamma_grid, &t23));
    let excess: Vec<_> = report.points.iter().map(|p| p.energy_excess).collect();
    ex.extend(extrapolation("energy_excess", None, gamma_grid, &excess));
    report.extrapolations = ex;
    Ok(report)
}
