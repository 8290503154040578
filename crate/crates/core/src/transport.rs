//! Transport coefficients tagged with the method that produced them.

use serde::{Deserialize, Serialize};

use crate::thermo::ThermoState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mi2,
    Mi3,
    Cem,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Mi2, Method::Mi3, Method::Cem];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mi2 => "mi2",
            Method::Mi3 => "mi3",
            Method::Cem => "cem",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s.trim() {
            "mi2" => Some(Method::Mi2),
            "mi3" => Some(Method::Mi3),
            "cem" => Some(Method::Cem),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `ν/(τp)`, `χT/(τpc²)`, `μ/(τp)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nondimensional {
    pub nu_hat: f64,
    pub chi_hat: f64,
    pub mu_hat: f64,
}

/// Coefficients per unit relaxation time; everything else is derived from these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerTau {
    pub nu: f64,
    pub chi: f64,
    pub mu: f64,
}

impl PerTau {
    pub fn nondimensional(&self, state: &ThermoState) -> Nondimensional {
        let p = state.p;
        Nondimensional {
            nu_hat: self.nu / p,
            chi_hat: self.chi / (state.gamma * p),
            mu_hat: self.mu / p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub nu: f64,
    pub chi: f64,
    pub mu: f64,
    pub method: Method,
    pub nondimensional: Nondimensional,
    pub diagnostics: Diagnostics,
}

impl TransportResult {
    pub fn new(per_tau: PerTau, tau: f64, state: &ThermoState, method: Method, diagnostics: Diagnostics) -> Self {
        Self {
            nu: per_tau.nu * tau,
            chi: per_tau.chi * tau,
            mu: per_tau.mu * tau,
            method,
            nondimensional: per_tau.nondimensional(state),
            diagnostics,
        }
    }
}

/// Conditioning record for one extracted coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    /// Cofactor ratios `D_i / D_last` for the rows with known right-hand side.
    pub cofactor_ratios: Vec<f64>,
    /// `D_last`, the determinant of the square coefficient block.
    pub denominator: f64,
    pub min_pivot: f64,
    /// Augmented determinant with the solved entry inserted, relative to its largest term.
    pub rouche_capelli_residual: f64,
    /// Unknowns `X^j` per unit τ and unit driving gradient.
    pub unknowns: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub bulk: Option<SolveDiagnostics>,
    pub heat: Option<SolveDiagnostics>,
    pub shear: Option<SolveDiagnostics>,
    /// Gram determinant of the time-derivative elimination.
    pub gram_determinant: f64,
}

impl Diagnostics {
    /// Smallest pivot across all solves; the Gram determinant stands in when no solve ran.
    pub fn min_pivot(&self) -> f64 {
        [&self.bulk, &self.heat, &self.shear]
            .into_iter()
            .flatten()
            .map(|d| d.min_pivot)
            .fold(self.gram_determinant.abs(), f64::min)
    }
}
