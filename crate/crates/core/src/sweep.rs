//! Parameter sweeps over (γ, a, method) and their tabular rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compare::{Point, PointSettings};
use crate::error::{Error, Result};
use crate::maxwellian::EntryVariant;
use crate::special_integrals::{GasParameters, QuadratureConfig};
use crate::thermo::{GAMMA_MAX, GAMMA_MIN};
use crate::transport::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub a_values: Vec<f64>,
    /// Always kept in the canonical order mi2, mi3, cem.
    pub methods: Vec<Method>,
    pub tau: f64,
    pub n_density: f64,
    pub entry_variant: EntryVariant,
    pub output_format: OutputFormat,
    pub rel_tol: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            gamma_min: 1.0,
            gamma_max: 1000.0,
            points: 4,
            spacing: Spacing::Log,
            a_values: vec![0.0],
            methods: Method::ALL.to_vec(),
            tau: 1.0,
            n_density: 1.0,
            entry_variant: EntryVariant::default(),
            output_format: OutputFormat::Csv,
            rel_tol: 1e-10,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !(self.gamma_min > 0.0 && self.gamma_max.is_finite()) || !(self.gamma_min < self.gamma_max) {
            return bad(format!(
                "need 0 < gamma_min < gamma_max, got {} and {}",
                self.gamma_min, self.gamma_max
            ));
        }
        if self.gamma_min < GAMMA_MIN || self.gamma_max > GAMMA_MAX {
            return bad(format!("gamma range must lie in [{GAMMA_MIN}, {GAMMA_MAX}]"));
        }
        if self.points < 2 {
            return bad(format!("points must be at least 2, got {}", self.points));
        }
        if self.a_values.is_empty() {
            return bad("a_values must not be empty".into());
        }
        if let Some(a) = self.a_values.iter().find(|a| !(**a > -1.0) || !a.is_finite()) {
            return bad(format!("every a must exceed -1, got {a}"));
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return bad(format!("tau must be nonnegative, got {}", self.tau));
        }
        if !(self.n_density > 0.0) || !self.n_density.is_finite() {
            return bad(format!("n_density must be positive, got {}", self.n_density));
        }
        self.quadrature().validate()
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig::with_rel_tol(self.rel_tol)
    }

    /// Grid points, endpoints exact.
    pub fn gamma_grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.gamma_min;
                }
                if i == n - 1 {
                    return self.gamma_max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Log => self.gamma_min * (self.gamma_max / self.gamma_min).powf(t),
                    Spacing::Linear => self.gamma_min + (self.gamma_max - self.gamma_min) * t,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Singular,
    Nonconverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Singular => "singular",
            Status::Nonconverged => "nonconverged",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Status::Ok),
            "singular" => Some(Status::Singular),
            "nonconverged" => Some(Status::Nonconverged),
            _ => None,
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::SingularSystem { .. } => Status::Singular,
            _ => Status::Nonconverged,
        }
    }
}

/// One output line. The hatted values are per unit τ (`ν/(τp)`, `χT/(τp)`,
/// `μ/(τp)`), so they stay defined at τ = 0; every value is absent unless the
/// status is ok.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub gamma: f64,
    pub a: f64,
    pub method: Method,
    pub nu: Option<f64>,
    pub chi: Option<f64>,
    pub mu: Option<f64>,
    pub nu_hat: Option<f64>,
    pub chi_hat: Option<f64>,
    pub mu_hat: Option<f64>,
    pub diag_min_pivot: Option<f64>,
    pub status: Status,
}

impl OutputRow {
    fn failed(gamma: f64, a: f64, method: Method, status: Status) -> Self {
        Self {
            gamma,
            a,
            method,
            nu: None,
            chi: None,
            mu: None,
            nu_hat: None,
            chi_hat: None,
            mu_hat: None,
            diag_min_pivot: None,
            status,
        }
    }
}

/// Rows plus the error text behind each failed row, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<OutputRow>,
    pub failures: Vec<(usize, String)>,
}

impl SweepOutput {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Ok)
    }
}

fn point_rows(gamma: f64, a: f64, spec: &SweepSpec) -> Vec<(OutputRow, Option<String>)> {
    let gas = match GasParameters::new(a, spec.tau) {
        Ok(g) => g,
        Err(e) => {
            return spec
                .methods
                .iter()
                .map(|&m| (OutputRow::failed(gamma, a, m, Status::from_error(&e)), Some(e.to_string())))
                .collect()
        }
    };
    let settings = PointSettings {
        n_density: spec.n_density,
        variant: spec.entry_variant,
        cfg: spec.quadrature(),
        ..Default::default()
    };
    let point = match Point::new(gamma, &gas, &settings) {
        Ok(p) => p,
        Err(e) => {
            return spec
                .methods
                .iter()
                .map(|&m| (OutputRow::failed(gamma, a, m, Status::from_error(&e)), Some(e.to_string())))
                .collect()
        }
    };
    spec.methods
        .iter()
        .map(|&method| match point.transport(method, &gas, &settings) {
            Ok(r) => (
                OutputRow {
                    gamma,
                    a,
                    method,
                    nu: Some(r.nu),
                    chi: Some(r.chi),
                    mu: Some(r.mu),
                    nu_hat: Some(r.nondimensional.nu_hat),
                    chi_hat: Some(r.nondimensional.chi_hat),
                    mu_hat: Some(r.nondimensional.mu_hat),
                    diag_min_pivot: Some(r.diagnostics.min_pivot()),
                    status: Status::Ok,
                },
                None,
            ),
            Err(e) => (OutputRow::failed(gamma, a, method, Status::from_error(&e)), Some(e.to_string())),
        })
        .collect()
}

/// Runs the sweep on the rayon pool. Rows come back γ outer, a middle,
/// method inner, whatever order the points finish in.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let grid = spec.gamma_grid();
    let pairs: Vec<(f64, f64)> = grid.iter().flat_map(|&g| spec.a_values.iter().map(move |&a| (g, a))).collect();
    let per_point: Vec<Vec<(OutputRow, Option<String>)>> = pairs.par_iter().map(|&(g, a)| point_rows(g, a, spec)).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (row, err) in per_point.into_iter().flatten() {
        if let Some(e) = err {
            failures.push((rows.len(), e));
        }
        rows.push(row);
    }
    Ok(SweepOutput { rows, failures })
}
