//! All three methods at one equilibrium state, sharing one θ table.

use crate::chapman_enskog::{cem_transport, CemInputs};
use crate::error::Result;
use crate::maxwellian::{mi_transport, EntryVariant, Moments, J_MAX_N3};
use crate::special_integrals::{GasParameters, QuadratureConfig};
use crate::thermo::{build_theta_table, make_state, TableOptions, ThermoState, ThetaTable};
use crate::transport::{Method, TransportResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSettings {
    pub n_density: f64,
    pub variant: EntryVariant,
    pub cfg: QuadratureConfig,
    pub table: TableOptions,
}

impl Default for PointSettings {
    fn default() -> Self {
        Self {
            n_density: 1.0,
            variant: EntryVariant::default(),
            cfg: QuadratureConfig::default(),
            table: TableOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Point {
    pub state: ThermoState,
    pub table: ThetaTable,
}

impl Point {
    pub fn new(gamma: f64, gas: &GasParameters, settings: &PointSettings) -> Result<Self> {
        let state = make_state(gamma, settings.n_density, gas, &settings.cfg)?;
        let table = build_theta_table(&state, gas, &settings.cfg, J_MAX_N3, settings.table)?;
        Ok(Self { state, table })
    }

    pub fn transport(&self, method: Method, gas: &GasParameters, settings: &PointSettings) -> Result<TransportResult> {
        let floor = settings.cfg.abs_floor;
        match method {
            Method::Mi2 => mi_transport(&self.state, &self.table, Moments::N2, gas, settings.variant, floor),
            Method::Mi3 => mi_transport(&self.state, &self.table, Moments::N3, gas, settings.variant, floor),
            Method::Cem => cem_transport(&CemInputs::from_table(&self.table)?, gas),
        }
    }
}

/// Convenience for a single method at a single γ.
pub fn transport_at(gamma: f64, gas: &GasParameters, method: Method, settings: &PointSettings) -> Result<TransportResult> {
    Point::new(gamma, gas, settings)?.transport(method, gas, settings)
}
