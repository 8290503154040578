//! Equilibrium scalars of the relativistic polyatomic gas.
//!
//! The moments `θ_{k,j}` (coefficients of the equilibrium tensors in the
//! `h^{..}U^{..}` basis) and their `1/(U·p)`-weighted analogues `θ*_{k,n}` are
//! available through two independent routes: direct quadrature of the weighted
//! `J` integrals, and the recurrence that builds every `θ_{k,j}` from `ω(γ)`.
//! All quantities are in natural units (`m = c = k_B = 1`, `ρ = n`, `T = 1/γ`).

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special_integrals::{weighted_j, GasParameters, QuadratureConfig};

pub const GAMMA_MIN: f64 = 0.05;
pub const GAMMA_MAX: f64 = 1e4;

/// Relative step of the central differences taken in γ.
pub const FD_REL_STEP: f64 = 1e-3;

/// Relative tolerance between recurrence and quadrature values of `θ_{k,j}`.
pub const RECURRENCE_TOL: f64 = 1e-6;

/// One equilibrium point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub gamma: f64,
    pub n_density: f64,
    /// `e / (ρc²)`
    pub omega: f64,
    pub p: f64,
    /// `(e − ρc² + p) / ρ`
    pub g1: f64,
}

impl ThermoState {
    pub fn rho(&self) -> f64 {
        self.n_density
    }

    pub fn energy(&self) -> f64 {
        self.omega * self.rho()
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.gamma
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(GAMMA_MIN..=GAMMA_MAX).contains(&gamma) {
        return domain(format!("gamma must lie in [{GAMMA_MIN}, {GAMMA_MAX}], got {gamma}"));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Quadrature-backed evaluator at a fixed γ; caches the common denominator
/// `∫ J*_{2,1} φ dI`.
#[derive(Debug, Clone)]
pub struct MomentEvaluator {
    gamma: f64,
    gas: GasParameters,
    cfg: QuadratureConfig,
    denominator: f64,
}

impl MomentEvaluator {
    pub fn new(gamma: f64, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        gas.validate()?;
        let denominator = weighted_j(2, 1, 0, gamma, gas, cfg)?.value;
        Ok(Self {
            gamma,
            gas: *gas,
            cfg: *cfg,
            denominator,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> Result<f64> {
        Ok(weighted_j(2, 2, 1, self.gamma, &self.gas, &self.cfg)?.value / self.denominator)
    }

    /// `θ_{k,j}` straight from its integral definition.
    pub fn theta(&self, k: usize, j: usize) -> Result<f64> {
        if 2 * k > j + 1 {
            return domain(format!("theta[{k},{j}] needs 2k <= j+1"));
        }
        if k == 0 && j == 0 {
            return Ok(1.0);
        }
        let num = weighted_j(
            (2 * k + 2) as u32,
            (j + 1 - 2 * k) as i32,
            j as u32,
            self.gamma,
            &self.gas,
            &self.cfg,
        )?;
        Ok(binomial(j + 1, 2 * k) / (2 * k + 1) as f64 * num.value / self.denominator)
    }

    /// `θ*_{k,n}` straight from its integral definition (any `2k <= n+1`, `n >= 1`).
    pub fn theta_star(&self, k: usize, n: usize) -> Result<f64> {
        if 2 * k > n + 1 || n == 0 {
            return domain(format!("theta*[{k},{n}] needs 2k <= n+1 and n >= 1"));
        }
        let num = weighted_j(
            (2 * k + 2) as u32,
            n as i32 - 2 * k as i32,
            (n - 1) as u32,
            self.gamma,
            &self.gas,
            &self.cfg,
        )?;
        Ok(binomial(n + 1, 2 * k) / (2 * k + 1) as f64 * num.value / self.denominator)
    }
}

/// Builds an equilibrium state; ω comes from the weighted energy integral.
pub fn make_state(gamma: f64, n_density: f64, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<ThermoState> {
    check_gamma(gamma)?;
    if !(n_density > 0.0) || !n_density.is_finite() {
        return domain(format!("n_density must be positive, got {n_density}"));
    }
    let eval = MomentEvaluator::new(gamma, gas, cfg)?;
    let omega = eval.omega()?;
    Ok(state_from_omega(gamma, n_density, omega))
}

pub(crate) fn state_from_omega(gamma: f64, n_density: f64, omega: f64) -> ThermoState {
    let p = n_density / gamma;
    let g1 = (omega - 1.0) + p / n_density;
    ThermoState {
        gamma,
        n_density,
        omega,
        p,
        g1,
    }
}

/// `θ_{k,j}` by direct quadrature.
pub fn theta_direct(k: usize, j: usize, state: &ThermoState, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<f64> {
    MomentEvaluator::new(state.gamma, gas, cfg)?.theta(k, j)
}

/// `θ*_{k,2k-1}` (k = 1 or 2) by direct quadrature of the `J_{2k+2,-1}` moment.
pub fn theta_star_quadrature(k: usize, state: &ThermoState, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<f64> {
    if !(1..=2).contains(&k) {
        return domain(format!("theta*_(k,2k-1) is only provided for k in {{1, 2}}, got {k}"));
    }
    let eval = MomentEvaluator::new(state.gamma, gas, cfg)?;
    theta_star_odd(&eval, k)
}

fn theta_star_odd(eval: &MomentEvaluator, k: usize) -> Result<f64> {
    let num = weighted_j((2 * k + 2) as u32, -1, (2 * k - 2) as u32, eval.gamma, &eval.gas, &eval.cfg)?;
    Ok(num.value / eval.denominator / (2 * k + 1) as f64)
}

/// Central difference with one Richardson stage (steps `h` and `h/2`).
pub fn richardson_derivative(mut f: impl FnMut(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d_h = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let d_h2 = (f(x + 0.5 * h)? - f(x - 0.5 * h)?) / h;
    Ok((4.0 * d_h2 - d_h) / 3.0)
}

/// Where the values stored in a [`ThetaTable`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaSource {
    Quadrature,
    Recurrence,
}

/// How much of a recurrence-built table is re-checked against quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    None,
    /// Two pseudo-randomly chosen entries (seeded from the state, so reproducible).
    Spot,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableOptions {
    pub source: ThetaSource,
    pub validation: Validation,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            source: ThetaSource::Recurrence,
            validation: Validation::Spot,
        }
    }
}

/// Memoized `θ_{k,j}` and `θ*_{k,n}` at one state. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    pub state: ThermoState,
    pub j_max: usize,
    pub source: ThetaSource,
    theta: BTreeMap<(usize, usize), f64>,
    theta_star: BTreeMap<(usize, usize), f64>,
}

impl ThetaTable {
    pub fn theta(&self, k: usize, j: usize) -> Result<f64> {
        self.theta.get(&(k, j)).copied().ok_or(Error::MissingTheta { k, j })
    }

    pub fn theta_star(&self, k: usize, n: usize) -> Result<f64> {
        self.theta_star.get(&(k, n)).copied().ok_or(Error::MissingTheta { k, j: n })
    }

    pub fn theta_entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.theta.iter().map(|(k, v)| (*k, *v))
    }

    pub fn theta_star_entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.theta_star.iter().map(|(k, v)| (*k, *v))
    }

    /// Overwrites an entry; exists so self-tests can feed a corrupted table to the checks.
    pub fn set_theta_star(&mut self, k: usize, n: usize, value: f64) {
        self.theta_star.insert((k, n), value);
    }

    pub fn set_theta(&mut self, k: usize, j: usize, value: f64) {
        self.theta.insert((k, j), value);
    }
}

/// All `(k, j)` index pairs with `2k <= j+1`, `j <= j_max`.
pub fn theta_indices(j_max: usize) -> Vec<(usize, usize)> {
    (0..=j_max).flat_map(|j| (0..=(j + 1) / 2).map(move |k| (k, j))).collect()
}

/// `θ_{0,j}` for `j = 0..=j_max` and the higher-k recurrence branches, given
/// a way to evaluate `θ_{0,j}` at shifted γ for the derivative term.
fn recurrence_theta(
    gamma: f64,
    omega: f64,
    j_max: usize,
    mut theta0_at: impl FnMut(usize, f64) -> Result<f64>,
) -> Result<BTreeMap<(usize, usize), f64>> {
    let mut t = BTreeMap::new();
    t.insert((0, 0), 1.0);
    let h = FD_REL_STEP * gamma;
    for j in 0..j_max {
        // zero-order branch
        let prev = t[&(0, j)];
        let deriv = if j == 0 {
            0.0
        } else {
            richardson_derivative(|g| theta0_at(j, g), gamma, h)?
        };
        t.insert((0, j + 1), omega * prev - deriv);
        // middle branches, h = 1..=floor((j+1)/2)
        for hh in 1..=(j + 1) / 2 {
            let upper = t.get(&(hh, j)).copied().unwrap_or(0.0);
            let lower = t[&(hh - 1, j)];
            let coeff = (j + 3 - 2 * hh) as f64 / (2 * hh) as f64;
            t.insert((hh, j + 1), (j + 2) as f64 / gamma * (upper + coeff * lower));
        }
        // top branch for even j
        if j % 2 == 0 {
            let top = t[&(j / 2, j)];
            t.insert(((j + 2) / 2, j + 1), top / gamma);
        }
    }
    Ok(t)
}

/// Builds the table to `j_max` (at least 2; MI at N = 3 needs 6).
pub fn build_theta_table(
    state: &ThermoState,
    gas: &GasParameters,
    cfg: &QuadratureConfig,
    j_max: usize,
    opts: TableOptions,
) -> Result<ThetaTable> {
    if j_max < 2 {
        return domain(format!("j_max must be at least 2, got {j_max}"));
    }
    check_gamma(state.gamma)?;
    let eval = MomentEvaluator::new(state.gamma, gas, cfg)?;

    let theta = match opts.source {
        ThetaSource::Quadrature => {
            let mut t = BTreeMap::new();
            for (k, j) in theta_indices(j_max) {
                t.insert((k, j), eval.theta(k, j)?);
            }
            t
        }
        ThetaSource::Recurrence => {
            let t = recurrence_theta(state.gamma, state.omega, j_max, |j, g| {
                MomentEvaluator::new(g, gas, cfg)?.theta(0, j)
            })?;
            let checked: Vec<(usize, usize)> = match opts.validation {
                Validation::None => Vec::new(),
                Validation::Strict => theta_indices(j_max),
                Validation::Spot => {
                    let all: Vec<_> = theta_indices(j_max).into_iter().filter(|&(k, j)| !(k == 0 && j == 0)).collect();
                    let seed = state.gamma.to_bits() ^ gas.a_poly.to_bits().rotate_left(17) ^ j_max as u64;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    sample(&mut rng, all.len(), 2.min(all.len())).into_iter().map(|i| all[i]).collect()
                }
            };
            for (k, j) in checked {
                let direct = eval.theta(k, j)?;
                let rec = t[&(k, j)];
                let gap = ((rec - direct) / direct).abs();
                if !(gap <= RECURRENCE_TOL) {
                    return Err(Error::RecurrenceMismatch {
                        k,
                        j,
                        recurrence: rec,
                        direct,
                        gap,
                    });
                }
            }
            t
        }
    };

    let mut theta_star = BTreeMap::new();
    for n in 1..=j_max + 1 {
        for k in 0..=n / 2 {
            if n + 1 > 2 * k {
                if let Some(v) = theta.get(&(k, n - 1)) {
                    theta_star.insert((k, n), (n + 1) as f64 / (n + 1 - 2 * k) as f64 * v);
                }
            }
        }
    }
    theta_star.insert((1, 1), theta_star_odd(&eval, 1)?);
    theta_star.insert((2, 3), theta_star_odd(&eval, 2)?);

    let table = ThetaTable {
        state: *state,
        j_max,
        source: opts.source,
        theta,
        theta_star,
    };
    if let Some(((k, j), v)) = table
        .theta_entries()
        .chain(table.theta_star_entries())
        .find(|(_, v)| !(v.is_finite() && *v > 0.0))
    {
        return Err(Error::Domain(format!("non-positive or non-finite table entry ({k},{j}) = {v}")));
    }
    Ok(table)
}

/// Coefficients of `(2c)`/`(3c)`-type eliminations of the time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientRatios {
    /// `U^α ∂_α λ` per unit `h^{αδ} ∂_α λ_δ`.
    pub r_time_lambda: f64,
    /// `U^α U^β ∂_α λ_β` per unit `h^{αδ} ∂_α λ_δ`.
    pub r_time_lambda_u: f64,
    /// `h^{αθ} ∂_α λ` per unit `h^{θ(α} U^{δ)} ∂_α λ_δ`.
    pub r_space_lambda: f64,
    /// `ρ²θ_{0,2} − e²` (positive for any admissible state).
    pub gram_determinant: f64,
    pub det_time_lambda: f64,
    pub det_time_lambda_u: f64,
}

pub fn gradient_ratios(state: &ThermoState, table: &ThetaTable) -> Result<GradientRatios> {
    gradient_ratios_from(state, table.theta(0, 2)?, table.theta(1, 2)?)
}

/// Same as [`gradient_ratios`] from the two scalars it reads.
pub fn gradient_ratios_from(state: &ThermoState, theta02: f64, theta12: f64) -> Result<GradientRatios> {
    let rho = state.rho();
    let e = state.energy();
    let p = state.p;
    let gram = det2(rho, e, e, rho * theta02);
    if !(gram > 0.0) {
        return Err(Error::SingularSystem {
            context: "moment Gram determinant".into(),
            magnitude: gram,
        });
    }
    let det_time_lambda = det2(p, e, rho * theta12 / 3.0, rho * theta02);
    let det_time_lambda_u = det2(rho, p, e, rho * theta12 / 3.0);
    Ok(GradientRatios {
        r_time_lambda: -det_time_lambda / gram,
        r_time_lambda_u: -det_time_lambda_u / gram,
        r_space_lambda: -2.0 / 3.0 * rho / p * theta12,
        gram_determinant: gram,
        det_time_lambda,
        det_time_lambda_u,
    })
}

fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// Residual of `ω = 1/(γθ*_{1,1}) + ∂_γ ln θ*_{1,1}`.
pub fn check_log_derivative_identity(state: &ThermoState, gas: &GasParameters, cfg: &QuadratureConfig) -> Result<f64> {
    let theta11 = |g: f64| -> Result<f64> { theta_star_odd(&MomentEvaluator::new(g, gas, cfg)?, 1) };
    log_derivative_residual_with(state, theta11)
}

/// Same residual with a caller-supplied `θ*_{1,1}(γ)`.
pub fn log_derivative_residual_with(state: &ThermoState, mut theta11_star: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let g = state.gamma;
    let t = theta11_star(g)?;
    let dlog = richardson_derivative(|x| Ok(theta11_star(x)?.ln()), g, FD_REL_STEP * g)?;
    Ok((state.omega - 1.0 / (g * t) - dlog).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(gamma: f64, a: f64) -> (ThermoState, GasParameters, QuadratureConfig) {
        let gas = GasParameters::new(a, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        (make_state(gamma, 1.0, &gas, &cfg).unwrap(), gas, cfg)
    }

    #[test]
    fn pressure_is_n_over_gamma() {
        let (s, _, _) = setup(3.0, 0.5);
        assert_eq!(s.p * s.gamma, s.n_density);
        let gas = GasParameters::new(0.0, 1.0).unwrap();
        let s = make_state(7.0, 2.5, &gas, &QuadratureConfig::default()).unwrap();
        assert_eq!(s.p * 7.0, 2.5);
    }

    #[test]
    fn gamma_range_enforced() {
        let gas = GasParameters::new(0.0, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        assert!(make_state(0.01, 1.0, &gas, &cfg).is_err());
        assert!(make_state(2e4, 1.0, &gas, &cfg).is_err());
        assert!(make_state(1.0, 0.0, &gas, &cfg).is_err());
    }

    #[test]
    fn theta_index_rules() {
        let (s, gas, cfg) = setup(1.0, 0.0);
        assert!(theta_direct(2, 2, &s, &gas, &cfg).is_err());
        assert_eq!(theta_direct(0, 0, &s, &gas, &cfg).unwrap(), 1.0);
        assert!(theta_star_quadrature(3, &s, &gas, &cfg).is_err());
        assert!(theta_star_quadrature(0, &s, &gas, &cfg).is_err());
    }

    #[test]
    fn theta11_and_theta12_closed_forms() {
        for &(g, a) in &[(1.0, 0.0), (10.0, 1.0), (0.3, 0.5)] {
            let (s, gas, cfg) = setup(g, a);
            let t11 = theta_direct(1, 1, &s, &gas, &cfg).unwrap();
            assert!((t11 * g - 1.0).abs() < 1e-9, "gamma {g}: {t11}");
            let t12 = theta_direct(1, 2, &s, &gas, &cfg).unwrap();
            let expect = 3.0 / g * (s.omega + 1.0 / g);
            assert!(((t12 - expect) / expect).abs() < 1e-9);
        }
    }

    #[test]
    fn recurrence_first_steps() {
        let (s, gas, cfg) = setup(2.0, 0.0);
        let t = build_theta_table(
            &s,
            &gas,
            &cfg,
            2,
            TableOptions {
                source: ThetaSource::Recurrence,
                validation: Validation::None,
            },
        )
        .unwrap();
        assert_eq!(t.theta(0, 0).unwrap(), 1.0);
        assert_eq!(t.theta(0, 1).unwrap(), s.omega);
        assert_eq!(t.theta(1, 1).unwrap(), 0.5);
        let expect = 3.0 / 2.0 * (t.theta(1, 1).unwrap() + t.theta(0, 1).unwrap());
        assert_eq!(t.theta(1, 2).unwrap(), expect);
    }

    #[test]
    fn theta_star_index_shift() {
        let (s, gas, cfg) = setup(1.5, 0.0);
        let t = build_theta_table(&s, &gas, &cfg, 6, TableOptions::default()).unwrap();
        assert_eq!(t.theta_star(1, 2).unwrap(), 3.0 * t.theta(1, 1).unwrap());
        assert_eq!(t.theta_star(1, 3).unwrap(), 2.0 * t.theta(1, 2).unwrap());
        assert!(t.theta_star(2, 3).unwrap() > 0.0);
        assert!(t.theta(3, 6).is_ok());
        assert!(matches!(t.theta(4, 7), Err(Error::MissingTheta { .. })));
    }

    #[test]
    fn j_max_floor() {
        let (s, gas, cfg) = setup(1.0, 0.0);
        assert!(build_theta_table(&s, &gas, &cfg, 1, TableOptions::default()).is_err());
    }

    #[test]
    fn gradient_ratio_identity() {
        let (s, gas, cfg) = setup(1.0, 0.0);
        let t = build_theta_table(&s, &gas, &cfg, 2, TableOptions::default()).unwrap();
        let r = gradient_ratios(&s, &t).unwrap();
        let theta12 = t.theta(1, 2).unwrap();
        assert!((s.p * r.r_space_lambda + 2.0 / 3.0 * s.rho() * theta12).abs() < 1e-15);
        assert!(r.r_time_lambda.is_finite() && r.r_time_lambda_u.is_finite());
        assert!(r.gram_determinant > 0.0);
    }

    #[test]
    fn log_derivative_negative_control() {
        let (s, _, _) = setup(1.0, 0.0);
        let r = log_derivative_residual_with(&s, |_| Ok(0.7)).unwrap();
        assert!((r - (s.omega - 1.0 / 0.7).abs()).abs() < 1e-12);
        assert!(r > 1e-3);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(binomial(7, 2), 21.0);
        assert_eq!(binomial(7, 6), 7.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
