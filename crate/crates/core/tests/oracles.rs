use std::sync::OnceLock;

use rtc_core::compare::{Point, PointSettings};
use rtc_core::maxwellian::EntryVariant;
use rtc_core::nonrel::{convergence_sweep, LimitReport};
use rtc_core::special_integrals::{j_mn, j_mn_laplace, GasParameters, QuadratureConfig};
use rtc_core::thermo::{build_theta_table, make_state, MomentEvaluator, TableOptions, ThetaSource, Validation};
use rtc_core::transport::Method;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn pc() -> PointSettings {
    PointSettings {
        variant: EntryVariant::PatternConsistent,
        ..Default::default()
    }
}

fn gas(a: f64) -> GasParameters {
    GasParameters::new(a, 1.0).unwrap()
}

fn limit_report() -> &'static LimitReport {
    static REPORT: OnceLock<LimitReport> = OnceLock::new();
    REPORT.get_or_init(|| convergence_sweep(&[100.0, 300.0, 1000.0, 3000.0], &gas(0.0), &pc()).unwrap())
}

#[test]
fn hyperbolic_and_gaussian_substitutions_agree() {
    let cfg = QuadratureConfig::default();
    for m in 0..=4u32 {
        for n in -1..=3i32 {
            if n == -1 && m < 2 {
                continue;
            }
            for g in [0.05, 0.5, 1.0, 10.0, 100.0, 1e3, 1e4] {
                let a = j_mn(m, n, g, &cfg).unwrap();
                let b = j_mn_laplace(m, n, g, &cfg).unwrap();
                assert_eq!(a.shift, b.shift);
                assert!(rel(a.value, b.value) < 1e-8, "J[{m},{n}] at γ={g}: {} vs {}", a.value, b.value);
            }
        }
    }
}

#[test]
fn theta11_is_inverse_gamma_on_both_paths() {
    let cfg = QuadratureConfig::default();
    for g in [0.1, 1.0, 10.0, 100.0] {
        for a in [0.0, 1.0] {
            let gas = gas(a);
            let state = make_state(g, 1.0, &gas, &cfg).unwrap();
            let opts = TableOptions {
                source: ThetaSource::Recurrence,
                validation: Validation::None,
            };
            let rec = build_theta_table(&state, &gas, &cfg, 2, opts).unwrap();
            let quad = MomentEvaluator::new(g, &gas, &cfg).unwrap();
            assert!(rel(rec.theta(1, 1).unwrap(), 1.0 / g) < 1e-10);
            assert!(rel(quad.theta(1, 1).unwrap(), 1.0 / g) < 1e-10);
        }
    }
}

/// Adjacent points differ by a factor 1.0975 in γ. The coefficients behave
/// like γ^{±1} at both ends, so smooth behaviour stays under a 10% step.
#[test]
fn moment_coefficients_are_continuous_in_gamma() {
    let s = pc();
    let g0 = gas(0.0);
    let grid: Vec<f64> = (0..100).map(|i| 0.1 * 1e4f64.powf(i as f64 / 99.0)).collect();
    let values: Vec<Vec<[f64; 3]>> = grid
        .iter()
        .map(|&g| {
            let p = Point::new(g, &g0, &s).unwrap();
            Method::ALL
                .iter()
                .map(|&m| {
                    let r = p.transport(m, &g0, &s).unwrap();
                    [r.nu, r.chi, r.mu]
                })
                .collect()
        })
        .collect();
    for (i, w) in values.windows(2).enumerate() {
        for m in 0..3 {
            for q in 0..3 {
                let (x, y) = (w[0][m][q], w[1][m][q]);
                assert!(
                    rel(y, x) < 0.1,
                    "jump in {:?} quantity {q} between γ={} and γ={}",
                    Method::ALL[m],
                    grid[i],
                    grid[i + 1]
                );
            }
        }
    }
}

#[test]
fn moment_number_gap_is_positive_and_shrinks() {
    let s = pc();
    let g0 = gas(0.0);
    let gaps = |g: f64| -> [f64; 3] {
        let p = Point::new(g, &g0, &s).unwrap();
        let n2 = p.transport(Method::Mi2, &g0, &s).unwrap();
        let n3 = p.transport(Method::Mi3, &g0, &s).unwrap();
        [rel(n2.nu, n3.nu), rel(n2.chi, n3.chi), rel(n2.mu, n3.mu)]
    };
    for g in [0.1, 1.0, 3.0, 10.0] {
        assert!(gaps(g).iter().all(|&x| x > 0.0), "γ={g}");
    }
    let along: Vec<[f64; 3]> = [10.0, 100.0, 1000.0].map(gaps).to_vec();
    for q in 0..3 {
        assert!(along[1][q] < along[0][q] && along[2][q] < along[1][q], "quantity {q}: {along:?}");
    }
}

#[test]
fn shear_and_star_moment_limits_are_approached_monotonically() {
    let report = limit_report();
    let mu: Vec<f64> = report.series(Method::Cem, "mu_hat").into_iter().map(Option::unwrap).collect();
    let t23: Vec<f64> = report.points.iter().map(|p| p.theta23_star_scaled.unwrap()).collect();
    for s in [&mu, &t23] {
        let dist: Vec<f64> = s.iter().map(|v| (v - 1.0).abs()).collect();
        assert!(dist.windows(2).all(|w| w[1] < w[0]), "{s:?}");
    }
}

#[test]
fn energy_excess_remainder_is_first_order() {
    let cfg = QuadratureConfig::default();
    for a in [0.0, 1.0, 2.5] {
        let r = |g: f64| {
            let state = make_state(g, 1.0, &gas(a), &cfg).unwrap();
            g * (state.omega - 1.0) - (a + 2.5)
        };
        let ratio = r(100.0) / r(1000.0);
        assert!((8.0..12.0).contains(&ratio), "a={a}: ratio {ratio}");
    }
}

#[test]
fn extrapolations_do_not_depend_on_the_first_point() {
    let report = limit_report();
    for e in &report.extrapolations {
        if e.quantity == "chi_hat" {
            continue;
        }
        let dropped = e.limit_without_first.unwrap();
        assert!(
            rel(dropped, e.limit) < 1e-4,
            "{} {:?}: {} vs {}",
            e.quantity,
            e.method,
            e.limit,
            dropped
        );
    }
}

/// Pairwise relative gaps of (μ̂, χ̂) at one γ, from a table built by the
/// recurrence and from one built by direct quadrature.
fn gaps_by_path(gamma: f64) -> Vec<[(f64, f64); 2]> {
    let g0 = gas(0.0);
    let recurrence = pc();
    let quadrature = PointSettings {
        table: TableOptions {
            source: ThetaSource::Quadrature,
            validation: Validation::None,
        },
        ..pc()
    };
    let values = |s: &PointSettings| -> Vec<(f64, f64)> {
        let p = Point::new(gamma, &g0, s).unwrap();
        Method::ALL
            .iter()
            .map(|&m| {
                let nd = p.transport(m, &g0, s).unwrap().nondimensional;
                (nd.mu_hat, nd.chi_hat)
            })
            .collect()
    };
    let (r, q) = (values(&recurrence), values(&quadrature));
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| {
            [
                (rel(r[i].0, r[j].0), rel(q[i].0, q[j].0)),
                (rel(r[i].1, r[j].1), rel(q[i].1, q[j].1)),
            ]
        })
        .collect()
}

/// A gap is only known to within the disagreement between the two θ paths;
/// monotonicity is asserted wherever the gap clears twice that.
#[test]
fn cross_method_gaps_shrink_along_the_limit_grid() {
    let grid = [100.0, 300.0, 1000.0, 3000.0];
    let per_gamma: Vec<Vec<[(f64, f64); 2]>> = grid.iter().map(|&g| gaps_by_path(g)).collect();
    let mut resolved_steps = 0;
    for pair in 0..3 {
        for q in 0..2 {
            let gaps: Vec<f64> = per_gamma.iter().map(|p| p[pair][q].0).collect();
            let spread: Vec<f64> = per_gamma.iter().map(|p| (p[pair][q].0 - p[pair][q].1).abs()).collect();
            for i in 1..grid.len() {
                if gaps[i] > 2.0 * spread[i] {
                    resolved_steps += 1;
                    assert!(gaps[i] < gaps[i - 1], "pair {pair} quantity {q}: {gaps:?} ± {spread:?}");
                }
            }
            assert!(gaps[grid.len() - 1] < 1e-5, "pair {pair} quantity {q}: {gaps:?}");
        }
    }
    assert!(resolved_steps >= 12, "only {resolved_steps} resolved steps");
}
