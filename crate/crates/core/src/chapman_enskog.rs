//! Chapman–Enskog coefficients. None of them depends on the number of moments,
//! so nothing here takes one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_integrals::GasParameters;
use crate::thermo::{gradient_ratios_from, GradientRatios, ThermoState, ThetaTable};
use crate::transport::{Diagnostics, Method, PerTau, TransportResult};

/// Tolerance on the identities checked by [`cem_identity_checks`].
pub const IDENTITY_TOL: f64 = 1e-8;

/// The only scalars the closed forms read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CemInputs {
    pub state: ThermoState,
    pub theta02: f64,
    pub theta12: f64,
    pub theta11_star: f64,
    pub theta12_star: f64,
    pub theta13_star: f64,
    pub theta23_star: f64,
}

impl CemInputs {
    pub fn from_table(table: &ThetaTable) -> Result<Self> {
        Ok(Self {
            state: table.state,
            theta02: table.theta(0, 2)?,
            theta12: table.theta(1, 2)?,
            theta11_star: table.theta_star(1, 1)?,
            theta12_star: table.theta_star(1, 2)?,
            theta13_star: table.theta_star(1, 3)?,
            theta23_star: table.theta_star(2, 3)?,
        })
    }

    pub fn ratios(&self) -> Result<GradientRatios> {
        gradient_ratios_from(&self.state, self.theta02, self.theta12)
    }
}

/// `χ = −(τγ²/9)(ρ²/p) θ_{1,2} (θ*_{1,2} − γ θ_{1,2} θ*_{1,1})`.
pub fn cem_heat_conductivity(inp: &CemInputs, gas: &GasParameters) -> f64 {
    gas.tau * heat_per_tau(inp)
}

fn heat_per_tau(inp: &CemInputs) -> f64 {
    let s = &inp.state;
    let g = s.gamma;
    let rho = s.rho();
    -(g * g / 9.0) * rho * rho / s.p * inp.theta12 * (inp.theta12_star - g * inp.theta12 * inp.theta11_star)
}

/// Bulk viscosity, `ν = τγ ρ [5/9 θ*_{2,3} + 1/3 θ*_{1,2} r_t + 1/6 θ*_{1,3} r_tu]`
/// with `r_t`, `r_tu` the time-derivative elimination ratios.
pub fn cem_bulk_viscosity(inp: &CemInputs, gas: &GasParameters) -> Result<f64> {
    Ok(gas.tau * bulk_per_tau(inp, &inp.ratios()?))
}

fn bulk_per_tau(inp: &CemInputs, r: &GradientRatios) -> f64 {
    let s = &inp.state;
    s.gamma
        * s.rho()
        * (5.0 / 9.0 * inp.theta23_star + inp.theta12_star / 3.0 * r.r_time_lambda + inp.theta13_star / 6.0 * r.r_time_lambda_u)
}

/// The bulk viscosity as typeset, without the `1/T` that the trace of the
/// stress deviation carries (off from [`cem_bulk_viscosity`] by exactly `γ`).
pub fn printed_bulk_viscosity(inp: &CemInputs, gas: &GasParameters) -> Result<f64> {
    let r = inp.ratios()?;
    Ok(gas.tau * bulk_per_tau(inp, &r) / inp.state.gamma)
}

/// `μ = (1/3) τ γ ρ θ*_{2,3}`.
pub fn cem_shear_viscosity(inp: &CemInputs, gas: &GasParameters) -> f64 {
    gas.tau * shear_per_tau(inp)
}

fn shear_per_tau(inp: &CemInputs) -> f64 {
    inp.state.gamma * inp.state.rho() * inp.theta23_star / 3.0
}

pub fn cem_transport(inp: &CemInputs, gas: &GasParameters) -> Result<TransportResult> {
    gas.validate()?;
    let r = inp.ratios()?;
    let per_tau = PerTau {
        nu: bulk_per_tau(inp, &r),
        chi: heat_per_tau(inp),
        mu: shear_per_tau(inp),
    };
    let diag = Diagnostics {
        gram_determinant: r.gram_determinant,
        ..Default::default()
    };
    Ok(TransportResult::new(per_tau, gas.tau, &inp.state, Method::Cem, diag))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub residual: f64,
}

/// Residuals, relative to the largest term, of the scalar combinations that
/// must cancel once the time derivatives are eliminated.
pub fn identity_residuals(inp: &CemInputs) -> Result<Vec<IdentityResidual>> {
    Ok(identity_residuals_with(inp, &inp.ratios()?))
}

/// Same residuals with the elimination supplied separately.
pub fn identity_residuals_with(inp: &CemInputs, r: &GradientRatios) -> Vec<IdentityResidual> {
    let s = &inp.state;
    let rho = s.rho();
    let e = s.energy();
    let rel = |terms: &[f64]| {
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        if scale == 0.0 {
            0.0
        } else {
            terms.iter().sum::<f64>().abs() / scale
        }
    };
    vec![
        IdentityResidual {
            name: "heat-flux cancellation".into(),
            residual: rel(&[s.p * r.r_space_lambda, 2.0 / 3.0 * rho * inp.theta12]),
        },
        IdentityResidual {
            name: "mass balance".into(),
            residual: rel(&[rho * r.r_time_lambda, e * r.r_time_lambda_u, s.p]),
        },
        IdentityResidual {
            name: "energy balance".into(),
            residual: rel(&[e * r.r_time_lambda, rho * inp.theta02 * r.r_time_lambda_u, rho * inp.theta12 / 3.0]),
        },
    ]
}

/// Fails with `IdentityViolation` on the first residual above [`IDENTITY_TOL`].
pub fn cem_identity_checks(inp: &CemInputs) -> Result<Vec<IdentityResidual>> {
    check_residuals(identity_residuals(inp)?)
}

/// [`cem_identity_checks`] against an elimination computed elsewhere.
pub fn cem_identity_checks_with(inp: &CemInputs, ratios: &GradientRatios) -> Result<Vec<IdentityResidual>> {
    check_residuals(identity_residuals_with(inp, ratios))
}

fn check_residuals(res: Vec<IdentityResidual>) -> Result<Vec<IdentityResidual>> {
    if let Some(bad) = res.iter().find(|r| !(r.residual <= IDENTITY_TOL)) {
        return Err(Error::IdentityViolation {
            name: bad.name.clone(),
            residual: bad.residual,
        });
    }
    Ok(res)
}
