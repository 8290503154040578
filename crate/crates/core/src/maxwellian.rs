//! Maxwellian-iteration systems for N = 2 and N = 3 moments.
//!
//! Each transport coefficient comes from an overdetermined system: the rows
//! whose right-hand side is known fix the multipliers `X^j`, and the final row
//! (the projection of `T^{αβ} − T^{αβ}_E`) must then be compatible. Its
//! right-hand side follows from the vanishing augmented determinant,
//! `b_last = −Σ b_i D_i / D_last`, with `D_i` the cofactor of `(i, last column)`.
//!
//! Natural units, and all right-hand sides are per unit τ and per unit
//! driving gradient (`h^{αμ}∂_αλ_μ`, `h^{θα}U^μ∂_(αλ_μ)`, `∂_<θ λ_ψ>`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::special_integrals::GasParameters;
use crate::thermo::{gradient_ratios, GradientRatios, ThermoState, ThetaTable};
use crate::transport::{Diagnostics, Method, PerTau, SolveDiagnostics, TransportResult};

/// Largest θ index the N = 3 systems read.
pub const J_MAX_N3: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bulk,
    Heat,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Moments {
    N2,
    N3,
}

impl Moments {
    pub fn method(self) -> Method {
        match self {
            Moments::N2 => Method::Mi2,
            Moments::N3 => Method::Mi3,
        }
    }
}

/// Selects between the entries as printed and the entries obtained by
/// contracting the equilibrium tensors directly.
///
/// The contracted reading differs in: bulk `a_31` (θ_{1,2}), `a_32` (θ_{1,3}/2),
/// `a_34` (θ_{1,5}/5), `a_41`, `a_42` (θ_{1,4} in the correction), `a_75`
/// (θ_{2,3}) and the spatial part of `b_2` (θ_{1,4}/10); heat column 1 of
/// rows 1 to 3 (zero, since shifting the momentum multiplier produces nothing),
/// `b_32` (2θ_{2,5}/9) and the `h^{θα}∂_αλ` part of `b_3^θ` (5θ_{2,3}/3);
/// shear `c_22` (2θ_{2,6}/35). Only the contracted systems are compatible with
/// the Chapman–Enskog values in the nonrelativistic limit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryVariant {
    #[default]
    AsPrinted,
    PatternConsistent,
}

impl EntryVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryVariant::AsPrinted => "as-printed",
            EntryVariant::PatternConsistent => "pattern-consistent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().replace('_', "-").as_str() {
            "as-printed" => Some(EntryVariant::AsPrinted),
            "pattern-consistent" => Some(EntryVariant::PatternConsistent),
            _ => None,
        }
    }
}

/// One assembled MI subproblem. The last row is the transport row; its
/// right-hand side is the unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiSystem {
    pub kind: Kind,
    pub n_moments: Moments,
    pub coeff: Matrix,
    /// Per known row, coefficients of the gradient basis elements in [`MiSystem::basis`].
    pub rhs_decomp: Vec<Vec<f64>>,
    pub basis: Vec<String>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// 1-based row and column indices of the N = 3 system kept at N = 2.
pub fn n2_kept(kind: Kind) -> (Vec<usize>, Vec<usize>) {
    match kind {
        Kind::Bulk => (vec![1, 3, 5, 6, 7], vec![1, 2, 3, 5]),
        Kind::Heat => (vec![1, 4, 5], vec![1, 2]),
        Kind::Shear => (vec![1, 3], vec![1]),
    }
}

/// 0-based rows and columns deleted from the N = 3 system to reach N = 2.
pub fn n2_deleted(kind: Kind) -> (Vec<usize>, Vec<usize>) {
    match kind {
        Kind::Bulk => (vec![1, 3], vec![3, 5]),
        Kind::Heat => (vec![1, 2], vec![2, 3]),
        Kind::Shear => (vec![1], vec![1]),
    }
}

fn shape(kind: Kind) -> (usize, usize) {
    match kind {
        Kind::Bulk => (7, 6),
        Kind::Heat => (5, 4),
        Kind::Shear => (3, 2),
    }
}

struct Th<'a>(&'a ThetaTable);

impl Th<'_> {
    fn t(&self, k: usize, j: usize) -> Result<f64> {
        self.0.theta(k, j)
    }
}

/// Bulk entry `a_ij` (1-based).
fn bulk_entry(th: &Th, i: usize, j: usize, variant: EntryVariant) -> Result<f64> {
    let t = |k, j| th.t(k, j);
    let t12 = t(1, 2)?;
    let pc = variant == EntryVariant::PatternConsistent;
    Ok(match (i, j) {
        (1, 1..=4) => t(0, j + 1)? + 3.0 * t(0, 3)? / t12 * t(0, j)?,
        (1, 5) => t(1, 4)? / 10.0 + 0.5 * t(0, 3)? * t(1, 3)? / t12,
        (1, 6) => t(1, 5)? / 5.0 + 0.9 * t(0, 3)? * t(1, 4)? / t12,
        (2, 1..=4) => t(0, j + 2)? + 3.0 * t(0, 4)? / t12 * t(0, j)?,
        (2, 5) => t(1, 5)? / 15.0 + 0.5 * t(0, 4)? * t(1, 3)? / t12,
        (2, 6) => t(1, 6)? / 7.0 + 0.9 * t(0, 4)? * t(1, 4)? / t12,
        (3, 1) => (if pc { t12 } else { t(1, 1)? }) + 1.5 * t(0, 1)? * t(1, 3)? / t12,
        (3, 2) => t(1, 3)? / if pc { 2.0 } else { 3.0 } + 1.5 * t(0, 2)? * t(1, 3)? / t12,
        (3, 3) => 0.3 * t(1, 4)? + 1.5 * t(0, 3)? * t(1, 3)? / t12,
        (3, 4) => (if pc { 0.2 } else { 4.0 / 15.0 }) * t(1, 5)? + 1.5 * t(0, 4)? * t(1, 3)? / t12,
        (3, 5) => t(2, 4)? / 3.0 + 0.25 * t(1, 3)?.powi(2) / t12,
        (3, 6) => t(2, 5)? / 3.0 + 0.45 * t(1, 4)? * t(1, 3)? / t12,
        (4, 1) => 0.5 * t(1, 3)? + 0.9 * t(0, 1)? * if pc { t(1, 4)? } else { t(0, 4)? } / t12,
        (4, 2) => 0.3 * t(1, 4)? + 0.9 * t(0, 2)? * if pc { t(1, 4)? } else { t(0, 4)? } / t12,
        (4, 3) => t(1, 5)? / 5.0 + 0.9 * t(0, 3)? * t(1, 4)? / t12,
        (4, 4) => t(1, 6)? / 7.0 + 0.9 * t(0, 4)? * t(1, 4)? / t12,
        (4, 5) => t(2, 5)? / 9.0 + 0.15 * t(1, 3)? * t(1, 4)? / t12,
        (4, 6) => t(2, 6)? / 7.0 + 0.27 * t(1, 4)?.powi(2) / t12,
        (5, 1..=4) => t(0, j - 1)?,
        (5, 5) => t12 / 3.0,
        (5, 6) => 0.5 * t(1, 3)?,
        (6, 1..=4) => t(0, j)?,
        (6, 5) => t(1, 3)? / 6.0,
        (6, 6) => 0.3 * t(1, 4)?,
        (7, 1) => 3.0 * t(1, 1)?,
        (7, 2) => t12,
        (7, 3) => 0.5 * t(1, 3)?,
        (7, 4) => 0.3 * t(1, 4)?,
        (7, 5) => 5.0 / 3.0 * if pc { t(2, 3)? } else { t(2, 5)? },
        (7, 6) => t(2, 4)?,
        _ => unreachable!("bulk entry ({i},{j})"),
    })
}

/// Bulk right-hand side of row `i` as coefficients of
/// `(U^α∂_αλ, U^αU^μ∂_(αλ_μ), h^{αμ}∂_(αλ_μ))`, per unit τ.
fn bulk_rhs(th: &Th, i: usize, variant: EntryVariant) -> Result<Vec<f64>> {
    let t = |k, j| th.t(k, j);
    let pc = variant == EntryVariant::PatternConsistent;
    let row = match i {
        1 => [t(0, 2)?, t(0, 3)?, t(1, 3)? / 6.0],
        2 => [t(0, 3)?, t(0, 4)?, if pc { 0.1 } else { 0.3 } * t(1, 4)?],
        3 => [t(1, 2)?, 0.5 * t(1, 3)?, 5.0 / 3.0 * t(2, 3)?],
        4 => [0.5 * t(1, 3)?, 0.3 * t(1, 4)?, t(2, 4)? / 3.0],
        _ => [0.0; 3],
    };
    Ok(row.iter().map(|v| -v).collect())
}

fn heat_entry(th: &Th, i: usize, j: usize, variant: EntryVariant) -> Result<f64> {
    let t = |k, j| th.t(k, j);
    let t12 = t(1, 2)?;
    let pc = variant == EntryVariant::PatternConsistent;
    Ok(match (i, j) {
        (1..=3, 1) if pc => 0.0,
        (1, 1) => -t(1, 3)? / 3.0,
        (1, 2) => -t(1, 4)? / 5.0 + t(1, 3)?.powi(2) / (6.0 * t12),
        (1, 3) => -t(1, 5)? / 5.0 + 0.15 * t(1, 3)? * t(1, 4)? / t12,
        (1, 4) => -t(2, 5)? / 15.0 + 0.1 * t(1, 3)? * t(2, 4)? / t12,
        (2, 1) => -t(1, 4)? / 5.0,
        (2, 2) => -2.0 / 15.0 * t(1, 5)? + 0.1 * t(1, 4)? * t(1, 3)? / t12,
        (2, 3) => -t(1, 6)? / 7.0 + 0.09 * t(1, 4)?.powi(2) / t12,
        (2, 4) => -t(2, 6)? / 35.0 + 0.06 * t(1, 4)? * t(2, 4)? / t12,
        (3, 1) => -2.0 / 3.0 * t(2, 4)?,
        (3, 2) => -if pc { 2.0 / 9.0 } else { 4.0 / 15.0 } * t(2, 5)? + t(2, 4)? * t(1, 3)? / (3.0 * t12),
        (3, 3) => -t(2, 6)? / 7.0 + 0.3 * t(1, 4)? * t(2, 4)? / t12,
        (3, 4) => -t(3, 6)? / 5.0 + 0.2 * t(2, 4)?.powi(2) / t12,
        (4, 1) => t(1, 1)?,
        (4, 2) => 2.0 / 3.0 * t12,
        (4, 3) => 0.5 * t(1, 3)?,
        (4, 4) => t(2, 3)?,
        (5, 1) => t12 / 3.0,
        (5, 2) => t(1, 3)? / 3.0,
        (5, 3) => 0.3 * t(1, 4)?,
        (5, 4) => t(2, 4)? / 5.0,
        _ => unreachable!("heat entry ({i},{j})"),
    })
}

/// Heat right-hand side as coefficients of `(h^{θα}∂_αλ, h^{θα}U^μ∂_(αλ_μ))`, per unit τ.
fn heat_rhs(th: &Th, i: usize, variant: EntryVariant) -> Result<Vec<f64>> {
    let t = |k, j| th.t(k, j);
    let pc = variant == EntryVariant::PatternConsistent;
    Ok(match i {
        1 => vec![t(1, 2)? / 3.0, t(1, 3)? / 3.0],
        2 => vec![t(1, 3)? / 6.0, t(1, 4)? / 5.0],
        3 => vec![if pc { 5.0 / 3.0 } else { 1.0 } * t(2, 3)?, 2.0 / 3.0 * t(2, 4)?],
        _ => vec![0.0, 0.0],
    })
}

fn shear_entry(th: &Th, i: usize, j: usize, variant: EntryVariant) -> Result<f64> {
    let t = |k, j| th.t(k, j);
    let pc = variant == EntryVariant::PatternConsistent;
    Ok(match (i, j) {
        (1, 1) => 2.0 / 15.0 * t(2, 4)?,
        (1, 2) => 2.0 / 15.0 * t(2, 5)?,
        (2, 1) => 2.0 / 45.0 * t(2, 5)?,
        (2, 2) => (if pc { 2.0 } else { 1.0 }) * t(2, 6)? / 35.0,
        (3, 1) => 2.0 / 3.0 * t(2, 3)?,
        (3, 2) => 0.4 * t(2, 4)?,
        _ => unreachable!("shear entry ({i},{j})"),
    })
}

/// Shear right-hand side as the coefficient of `∂_<θ λ_ψ>`, per unit τ.
fn shear_rhs(th: &Th, i: usize) -> Result<Vec<f64>> {
    Ok(match i {
        1 => vec![-2.0 / 3.0 * th.t(2, 3)?],
        2 => vec![-2.0 / 15.0 * th.t(2, 4)?],
        _ => vec![0.0],
    })
}

fn row_label(kind: Kind, i: usize) -> String {
    let name = match (kind, i) {
        (Kind::Bulk, 1) => "n=2 balance, U U",
        (Kind::Bulk, 2) => "n=3 balance, U U U",
        (Kind::Bulk, 3) => "n=2 balance, h",
        (Kind::Bulk, 4) => "n=3 balance, h U",
        (Kind::Bulk, 5) => "mass flux unchanged, U",
        (Kind::Bulk, 6) => "energy unchanged, U U",
        (Kind::Bulk, 7) => "trace of T - T_E, h",
        (Kind::Heat, 1) => "n=2 balance, h U",
        (Kind::Heat, 2) => "n=3 balance, h U U",
        (Kind::Heat, 3) => "n=3 balance, h h",
        (Kind::Heat, 4) => "mass flux unchanged, h",
        (Kind::Heat, 5) => "T - T_E, h U",
        (Kind::Shear, 1) => "n=2 balance, <h h>",
        (Kind::Shear, 2) => "n=3 balance, <h h> U",
        (Kind::Shear, 3) => "T - T_E, <h h>",
        _ => "?",
    };
    format!("{i}: {name}")
}

fn col_label(kind: Kind, j: usize) -> String {
    let name = match (kind, j) {
        (Kind::Bulk, 1) => "lambda - lambda_E",
        (Kind::Bulk, 2) => "U.(lambda_1 - lambda_1E)",
        (Kind::Bulk, 3) => "U U.lambda_2",
        (Kind::Bulk, 4) => "U U U.lambda_3",
        (Kind::Bulk, 5) => "h.lambda_2",
        (Kind::Bulk, 6) => "h U.lambda_3",
        (Kind::Heat, 1) => "h.(lambda_1 - lambda_1E)",
        (Kind::Heat, 2) => "h U.lambda_2",
        (Kind::Heat, 3) => "h U U.lambda_3",
        (Kind::Heat, 4) => "h h h.lambda_3",
        (Kind::Shear, 1) => "<h h>.lambda_2",
        (Kind::Shear, 2) => "<h h> U.lambda_3",
        _ => "?",
    };
    format!("X{j}: {name}")
}

/// Builds the augmented system for one coefficient. The N = 2 system reads
/// the N = 3 entries at the kept indices only, so it needs a smaller table.
pub fn assemble(kind: Kind, n_moments: Moments, table: &ThetaTable, variant: EntryVariant) -> Result<MiSystem> {
    let th = Th(table);
    let (rows, cols): (Vec<usize>, Vec<usize>) = match n_moments {
        Moments::N3 => {
            let (r, c) = shape(kind);
            ((1..=r).collect(), (1..=c).collect())
        }
        Moments::N2 => n2_kept(kind),
    };
    let mut coeff = Matrix::zeros(rows.len(), cols.len());
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            let v = match kind {
                Kind::Bulk => bulk_entry(&th, i, j, variant)?,
                Kind::Heat => heat_entry(&th, i, j, variant)?,
                Kind::Shear => shear_entry(&th, i, j, variant)?,
            };
            coeff.set(a, b, v);
        }
    }
    let rhs_decomp = rows[..rows.len() - 1]
        .iter()
        .map(|&i| match kind {
            Kind::Bulk => bulk_rhs(&th, i, variant),
            Kind::Heat => heat_rhs(&th, i, variant),
            Kind::Shear => shear_rhs(&th, i),
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = match kind {
        Kind::Bulk => vec!["U.d lambda", "U U.d lambda_mu", "h.d lambda_mu"],
        Kind::Heat => vec!["h.d lambda", "h U.d lambda_mu"],
        Kind::Shear => vec!["<d lambda_mu>"],
    }
    .into_iter()
    .map(String::from)
    .collect();
    let sys = MiSystem {
        kind,
        n_moments,
        coeff,
        rhs_decomp,
        basis,
        row_labels: rows.iter().map(|&i| row_label(kind, i)).collect(),
        col_labels: cols.iter().map(|&j| col_label(kind, j)).collect(),
    };
    if let Some(v) = sys.coeff.to_rows().concat().into_iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite {kind:?} matrix entry {v}")));
    }
    Ok(sys)
}

/// Values of the basis elements per unit driving gradient.
pub fn drive(kind: Kind, ratios: &GradientRatios) -> Vec<f64> {
    match kind {
        Kind::Bulk => vec![ratios.r_time_lambda, ratios.r_time_lambda_u, 1.0],
        Kind::Heat => vec![ratios.r_space_lambda, 1.0],
        Kind::Shear => vec![1.0],
    }
}

impl MiSystem {
    /// Known right-hand sides per unit τ and unit driving gradient.
    pub fn rhs(&self, drive: &[f64]) -> Vec<f64> {
        self.rhs_decomp
            .iter()
            .map(|row| row.iter().zip(drive).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Augmented matrix `[coeff | b]` with `b_last` set to `last_rhs`.
    pub fn augmented(&self, drive: &[f64], last_rhs: f64) -> Matrix {
        let mut b = self.rhs(drive);
        b.push(last_rhs);
        let (r, c) = (self.coeff.rows(), self.coeff.cols());
        let mut m = Matrix::zeros(r, c + 1);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, self.coeff.get(i, j));
            }
            m.set(i, c, b[i]);
        }
        m
    }
}

/// Result of the compatibility extraction for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub last_rhs: f64,
    pub diagnostics: SolveDiagnostics,
}

/// `b_last = −Σ b_i D_i / D_last` from the cofactors of the augmented matrix.
///
/// At large γ the entries span many decades and the scalar rows become nearly
/// dependent: minors fall tens of decades below the entries. The cofactors and
/// the compatibility determinant are therefore exact for the stored entries,
/// on a copy rescaled by powers of two so the diagnostics are comparable.
pub fn extract(sys: &MiSystem, drive: &[f64], abs_floor: f64) -> Result<Extraction> {
    let last = sys.coeff.rows() - 1;
    let col = sys.coeff.cols();
    let (rs, mut cs) = sys.augmented(drive, 0.0).equilibration();
    let aug = sys.augmented(drive, 0.0).scaled(&rs, &cs);
    let c_rhs = cs.pop().unwrap_or(1.0);
    let b: Vec<f64> = (0..last).map(|i| aug.get(i, col)).collect();

    let square = aug.without(&[last], &[col]);
    let det = square.determinant();
    // cofactor of (last, last column) is det(square) since last + col = 2·last is even
    let d_last_s = aug.cofactor_exact(last, col);
    let unscale: f64 = rs[..last].iter().chain(&cs).product();
    let d_last = d_last_s / unscale;
    if !(d_last.abs() >= abs_floor) || !d_last.is_finite() {
        return Err(Error::SingularSystem {
            context: format!("{:?} {:?} denominator cofactor", sys.kind, sys.n_moments),
            magnitude: d_last,
        });
    }
    let cof: Vec<f64> = (0..last).map(|i| aug.cofactor_exact(i, col)).collect();
    let terms: Vec<f64> = b.iter().zip(&cof).map(|(bi, di)| bi * di).collect();
    let last_rhs_s = -terms.iter().sum::<f64>() / d_last_s;

    let mut filled = aug.clone();
    filled.set(last, col, last_rhs_s);
    let scale = terms.iter().map(|t| t.abs()).fold((last_rhs_s * d_last_s).abs(), f64::max);
    let residual = if scale > 0.0 {
        filled.determinant_exact().abs() / scale
    } else {
        0.0
    };

    let unknowns = square
        .solve(&b)
        .map(|y| y.iter().zip(&cs).map(|(yj, cj)| yj * cj / c_rhs).collect())
        .unwrap_or_default();
    Ok(Extraction {
        last_rhs: last_rhs_s / (rs[last] * c_rhs),
        diagnostics: SolveDiagnostics {
            cofactor_ratios: cof.iter().zip(&rs).map(|(d, r)| d / d_last_s * r / rs[last]).collect(),
            denominator: d_last,
            min_pivot: det.min_pivot,
            rouche_capelli_residual: residual,
            unknowns,
        },
    })
}

/// Converts the transport-row right-hand side into the coefficient, per unit τ.
pub fn coefficient_from_rhs(kind: Kind, last_rhs: f64, state: &ThermoState) -> f64 {
    let rho = state.rho();
    let g = state.gamma;
    match kind {
        Kind::Bulk => -rho * g * last_rhs / 3.0,
        Kind::Heat => -rho * g * g * last_rhs / 2.0,
        Kind::Shear => -rho * g * last_rhs / 2.0,
    }
}

/// ν, χ, μ by Maxwellian iteration at the given number of moments.
pub fn mi_transport(
    state: &ThermoState,
    table: &ThetaTable,
    n_moments: Moments,
    gas: &GasParameters,
    variant: EntryVariant,
    abs_floor: f64,
) -> Result<TransportResult> {
    gas.validate()?;
    let ratios = gradient_ratios(state, table)?;
    let mut diag = Diagnostics {
        gram_determinant: ratios.gram_determinant,
        ..Default::default()
    };
    let mut solve = |kind: Kind| -> Result<f64> {
        let sys = assemble(kind, n_moments, table, variant)?;
        let ex = extract(&sys, &drive(kind, &ratios), abs_floor)?;
        let value = coefficient_from_rhs(kind, ex.last_rhs, state);
        let slot = match kind {
            Kind::Bulk => &mut diag.bulk,
            Kind::Heat => &mut diag.heat,
            Kind::Shear => &mut diag.shear,
        };
        *slot = Some(ex.diagnostics);
        Ok(value)
    };
    let per_tau = PerTau {
        nu: solve(Kind::Bulk)?,
        chi: solve(Kind::Heat)?,
        mu: solve(Kind::Shear)?,
    };
    Ok(TransportResult::new(per_tau, gas.tau, state, n_moments.method(), diag))
}

/// Closed forms exactly as typeset for the coefficients, kept for comparison
/// with the cofactor extraction. Per unit τ.
pub mod printed {
    use super::*;

    fn ratio_a(state: &ThermoState, t02: f64, t12: f64) -> f64 {
        let w = state.omega;
        (t02 / state.gamma - w * t12) / (t02 - w * w)
    }

    fn ratio_b(state: &ThermoState, t12: f64) -> f64 {
        t12 - state.omega / state.gamma
    }

    fn last_column_ratios(sys: &MiSystem) -> Vec<f64> {
        let last = sys.coeff.rows() - 1;
        let col = sys.coeff.cols();
        let aug = sys.augmented(&vec![0.0; sys.basis.len()], 0.0);
        let d_last = aug.cofactor(last, col);
        (0..last).map(|i| aug.cofactor(i, col) / d_last).collect()
    }

    /// Bulk viscosity per unit τ as typeset for N = 3 and N = 2.
    pub fn bulk(state: &ThermoState, table: &ThetaTable, n: Moments, variant: EntryVariant) -> Result<f64> {
        let t = |k, j| table.theta(k, j);
        let sys = assemble(Kind::Bulk, n, table, variant)?;
        let d = last_column_ratios(&sys);
        let (t02, t12) = (t(0, 2)?, t(1, 2)?);
        let den = t02 - state.omega * state.omega;
        let ra = ratio_a(state, t02, t12);
        let rb = ratio_b(state, t12) / den;
        let bracket = match n {
            Moments::N3 => {
                let g1 = d[0] * t02 + d[1] * t(0, 3)? + d[2] * t12 + 0.5 * t(1, 3)?;
                let g2 = d[0] * t(1, 3)? / 6.0 + d[1] * 0.3 * t(1, 4)? + d[2] * 5.0 / 3.0 * t(2, 3)? + d[3] * t(2, 4)? / 3.0;
                let g3 = d[0] * t(0, 3)? + d[1] * t(0, 4)? + d[3] * 0.3 * t(1, 4)?;
                g1 * ra + g2 + g3 * rb
            }
            Moments::N2 => {
                let g1 = t02 * d[0] + t12 * d[1];
                let g2 = t(1, 3)? / 6.0 * d[0] + 5.0 / 3.0 * t(2, 3)? * d[1];
                let g3 = t(0, 3)? * d[0] + 0.5 * t(1, 3)? * d[1];
                g1 * ra + g2 + g3 * rb
            }
        };
        Ok(state.rho() * state.gamma / 3.0 * bracket)
    }

    /// Heat conductivity per unit τ as typeset for N = 3 and N = 2.
    pub fn heat(state: &ThermoState, table: &ThetaTable, n: Moments) -> Result<f64> {
        let t = |k, j| table.theta(k, j);
        let sys = assemble(Kind::Heat, n, table, EntryVariant::AsPrinted)?;
        let m = last_column_ratios(&sys);
        let g = state.gamma;
        let t12 = t(1, 2)?;
        let bracket = match n {
            Moments::N3 => {
                m[0] * (-2.0 / 3.0 * g * t12 * t12 + t(1, 3)? / 3.0)
                    + m[1] * (-g * t12 * t(1, 3)? / 3.0 + t(1, 4)? / 5.0)
                    + m[2] * (-2.0 * g * t12 * t(2, 3)? + 2.0 / 3.0 * t(2, 4)?)
            }
            Moments::N2 => m[0] * (-2.0 / 3.0 * g * t12 * t12 + t(1, 3)? / 3.0),
        };
        Ok(state.rho() * g * g / 2.0 * bracket)
    }

    /// Shear viscosity per unit τ as typeset for N = 3 and N = 2.
    pub fn shear(state: &ThermoState, table: &ThetaTable, n: Moments) -> Result<f64> {
        let t = |k, j| table.theta(k, j);
        let rho_g = state.rho() * state.gamma;
        match n {
            Moments::N3 => {
                let sys = assemble(Kind::Shear, n, table, EntryVariant::AsPrinted)?;
                let num = sys.augmented(&[1.0], 0.0).determinant().value;
                let den = sys.coeff.without(&[2], &[]).determinant().value;
                Ok(-rho_g / 2.0 * num / den)
            }
            Moments::N2 => Ok(5.0 / 3.0 * rho_g * t(2, 3)?.powi(2) / t(2, 4)?),
        }
    }
}
