//! Independent solvers for the full dispatch problem, used to certify the
//! closed-form policy and to handle configurations outside its assumptions.
//!
//! Two deliberately different routes:
//!
//! * [`solve_grid`] — assumption-free brute force over a dense lattice, with
//!   an explicit Lipschitz error bound. Trustworthy and slow; also the only
//!   solver that supports a binding demand floor.
//! * [`solve_zonewise`] — exact concave maximization obtained by splitting
//!   the problem at the tariff kink z = 0 and solving each zone by
//!   first-order-condition inversion plus projection.
//!
//! Certification requires the policy and both oracles to agree.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    dispatch_from_waters, profit, validate_config, DispatchPoint, ModelError, PlantConfig, Tariff,
    ThermalCost, ValidationReport,
};
use crate::policy::{compute_thresholds, foc_water_level, optimal_dispatch, ThresholdSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleMethod {
    Grid,
    Zonewise,
}

/// A solver result: the argmax point, its profit, and the solver's accuracy
/// guarantee. For the grid, `profit ≥ true optimum − error_bound` with
/// `error_bound = lipschitz · diagonal`; the zonewise solver is exact for the
/// shipped quadratic cost.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSolution {
    pub point: DispatchPoint,
    pub profit: f64,
    pub method: OracleMethod,
    /// Lattice step along the TDP axis (m³/h); zero for the zonewise solver.
    pub resolution: f64,
    /// Lattice cell diagonal (m³/h); zero for the zonewise solver.
    pub diagonal: f64,
    /// Lipschitz bound on the profit over the box ($ per m³/h).
    pub lipschitz: f64,
    /// Worst-case shortfall from the true optimum ($).
    pub error_bound: f64,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("n_steps must be at least 2, got {0}")]
    BadSteps(usize),
    #[error("invalid configuration:\n{0}")]
    InvalidConfig(ValidationReport),
    #[error(
        "empty feasible lattice: demand floor {demand_floor} excludes every point of the \
         flowrate box"
    )]
    InfeasibleLattice { demand_floor: f64 },
    #[error("no feasible zone: the flowrate box is empty or inconsistent")]
    InfeasibleZones,
    #[error(transparent)]
    Model(#[from] ModelError),
}

// Lipschitz bound on |∂Π/∂(w_h, w_r)| over the box, from the tariff and the
// cost curvature at the fuel ceiling.
fn lipschitz_bound(config: &PlantConfig, tariff: &Tariff) -> f64 {
    let tdp = &config.tdp;
    let price = tariff.pi_buy.max(tariff.pi_sell);
    let marginal_at_cap = if tdp.alpha_h > 0.0 {
        tdp.cost.marginal(tdp.w_max_h / tdp.alpha_h).abs() / tdp.alpha_h
    } else {
        0.0
    };
    let slope_h = tariff.pi_water + price / tdp.eta_h + marginal_at_cap;
    let slope_r = tariff.pi_water + price / config.rodp.alpha_r;
    (slope_h * slope_h + slope_r * slope_r).sqrt()
}

fn axis_value(lo: f64, hi: f64, index: usize, n_steps: usize) -> f64 {
    if n_steps == 1 || lo == hi {
        lo
    } else {
        lo + (hi - lo) * index as f64 / (n_steps - 1) as f64
    }
}

/// Exhaustive search over an `n_steps × n_steps` lattice spanning the
/// flowrate box, discarding points that violate the demand floor.
///
/// Ties resolve to the first point found scanning `w_h`-major ascending, so
/// results do not depend on the parallelism degree. This is the only solver
/// that supports a binding demand floor; it needs no convexity assumptions.
pub fn solve_grid(
    g: f64,
    config: &PlantConfig,
    tariff: &Tariff,
    n_steps: usize,
) -> Result<OracleSolution, OracleError> {
    if n_steps < 2 {
        return Err(OracleError::BadSteps(n_steps));
    }
    let tdp = &config.tdp;
    let rodp = &config.rodp;

    // With a disabled thermal unit the w_h axis collapses to its floor.
    let (h_lo, h_hi, h_steps) = if tdp.alpha_h == 0.0 {
        (tdp.w_min_h, tdp.w_min_h, 1)
    } else {
        (tdp.w_min_h, tdp.w_max_h, n_steps)
    };

    let step_h = if h_steps > 1 {
        (h_hi - h_lo) / (h_steps - 1) as f64
    } else {
        0.0
    };
    let step_r = (rodp.w_max_r - rodp.w_min_r) / (n_steps - 1) as f64;

    let row_best = (0..h_steps)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, DispatchPoint)>, OracleError> {
            let w_h = axis_value(h_lo, h_hi, i, h_steps);
            let mut best: Option<(f64, DispatchPoint)> = None;
            for j in 0..n_steps {
                let w_r = axis_value(rodp.w_min_r, rodp.w_max_r, j, n_steps);
                if w_h + w_r < config.demand_floor {
                    continue;
                }
                let point = dispatch_from_waters(w_h, w_r, g, config)?;
                let value = profit(&point, config, tariff);
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, point));
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Sequential reduction in row order keeps the first-found tie rule.
    let mut best: Option<(f64, DispatchPoint)> = None;
    for candidate in row_best.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| candidate.0 > *b) {
            best = Some(candidate);
        }
    }
    let (value, point) = best.ok_or(OracleError::InfeasibleLattice {
        demand_floor: config.demand_floor,
    })?;

    let diagonal = (step_h * step_h + step_r * step_r).sqrt();
    let lipschitz = lipschitz_bound(config, tariff);
    Ok(OracleSolution {
        point,
        profit: value,
        method: OracleMethod::Grid,
        resolution: step_h.max(step_r),
        diagonal,
        lipschitz,
        error_bound: lipschitz * diagonal,
    })
}

// One zone candidate: profit plus the point, tagged islanded for tie
// preference.
struct Candidate {
    value: f64,
    point: DispatchPoint,
    islanded: bool,
}

/// Exact maximization by decomposing at the tariff kink: (i) the import zone
/// priced at `pi_buy`, (ii) the export zone priced at `pi_sell`, (iii) the
/// net-zero manifold. Each piece is concave with a separable objective, so
/// FOC inversion plus projection onto the piece's polytope is exact. Requires
/// a validated configuration (in particular a slack demand floor).
///
/// When the RODP profit term is exactly flat (water value equal to a price),
/// ties resolve toward islanded operation.
pub fn solve_zonewise(
    g: f64,
    config: &PlantConfig,
    tariff: &Tariff,
) -> Result<OracleSolution, OracleError> {
    validate_config(config, tariff).map_err(OracleError::InvalidConfig)?;

    let tdp = &config.tdp;
    let rodp = &config.rodp;
    let mut candidates: Vec<Candidate> = Vec::with_capacity(3);

    // (i) Import zone, z >= 0: water term maximized at foc(pi_buy), linear
    // RODP term with slope pi_water - pi_buy/alpha_r.
    {
        let w_h = foc_water_level(tariff.pi_buy, config, tariff);
        let q_h = w_h / tdp.eta_h;
        let coefficient = tariff.pi_water - tariff.pi_buy / rodp.alpha_r;
        let w_r = if coefficient > 0.0 {
            rodp.w_max_r
        } else if coefficient < 0.0 {
            rodp.w_min_r
        } else {
            // Flat: stay as close to islanded as the zone allows.
            (rodp.alpha_r * (q_h + g)).clamp(rodp.w_min_r, rodp.w_max_r)
        };
        let point = dispatch_from_waters(w_h, w_r, g, config)?;
        if point.z >= 0.0 {
            candidates.push(Candidate {
                value: profit(&point, config, tariff),
                point,
                islanded: false,
            });
        }
        // Otherwise the zone's maximum sits on z = 0, covered by (iii).
    }

    // (ii) Export zone, z <= 0: water term maximized at foc(pi_sell), linear
    // RODP term with slope pi_water - pi_sell/alpha_r.
    {
        let w_h = foc_water_level(tariff.pi_sell, config, tariff);
        let q_h = w_h / tdp.eta_h;
        let coefficient = tariff.pi_water - tariff.pi_sell / rodp.alpha_r;
        let w_r = if coefficient > 0.0 {
            rodp.w_max_r
        } else if coefficient < 0.0 {
            rodp.w_min_r
        } else {
            (rodp.alpha_r * (q_h + g)).clamp(rodp.w_min_r, rodp.w_max_r)
        };
        let point = dispatch_from_waters(w_h, w_r, g, config)?;
        if point.z <= 0.0 {
            candidates.push(Candidate {
                value: profit(&point, config, tariff),
                point,
                islanded: false,
            });
        }
    }

    // (iii) Net-zero manifold: w_r is tied to w_h, leaving a one-dimensional
    // concave problem over the interval where both boxes are respected.
    {
        let lo = tdp.w_min_h.max(tdp.eta_h * (rodp.w_min_r / rodp.alpha_r - g));
        let hi = tdp.w_max_h.min(tdp.eta_h * (rodp.w_max_r / rodp.alpha_r - g));
        if lo <= hi {
            let w_h = if tdp.alpha_h == 0.0 {
                // Disabled unit: only its floor is admissible on the manifold.
                if lo > tdp.w_min_h {
                    f64::NAN
                } else {
                    tdp.w_min_h
                }
            } else {
                let marginal_value = tdp.alpha_h * tariff.pi_water
                    + tdp.beta_h * (rodp.alpha_r * tariff.pi_water);
                let fuel = tdp.cost.inverse_marginal(
                    marginal_value,
                    lo / tdp.alpha_h,
                    hi / tdp.alpha_h,
                );
                (tdp.alpha_h * fuel).clamp(lo, hi)
            };
            if w_h.is_finite() {
                let q_h = w_h / tdp.eta_h;
                let q_r = q_h + g;
                let point = DispatchPoint {
                    w_h,
                    w_r: rodp.alpha_r * q_r,
                    q_h,
                    q_r,
                    p_h: if w_h == 0.0 { 0.0 } else { w_h / tdp.alpha_h },
                    g,
                    z: 0.0,
                };
                candidates.push(Candidate {
                    value: profit(&point, config, tariff),
                    point,
                    islanded: true,
                });
            }
        }
    }

    let best = candidates
        .into_iter()
        .reduce(|best, next| {
            // Strictly better wins; exact ties prefer islanded operation.
            if next.value > best.value || (next.value == best.value && next.islanded) {
                next
            } else {
                best
            }
        })
        .ok_or(OracleError::InfeasibleZones)?;

    Ok(OracleSolution {
        point: best.point,
        profit: best.value,
        method: OracleMethod::Zonewise,
        resolution: 0.0,
        diagonal: 0.0,
        lipschitz: lipschitz_bound(config, tariff),
        error_bound: 0.0,
    })
}

/// One certification sample: the policy profit against both oracles at a
/// given generation level.
#[derive(Debug, Clone, Serialize)]
pub struct CertSample {
    pub g: f64,
    pub policy_profit: f64,
    pub zonewise_profit: f64,
    pub grid_profit: f64,
    /// Worst shortfall of the policy, after discounting the grid's own error
    /// bound: `max(zonewise − policy, grid − policy − grid_error_bound)`.
    pub gap: f64,
    pub pass: bool,
}

/// Certification verdict over a set of generation samples.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub pass: bool,
    pub status: String,
    pub tolerance: f64,
    pub grid_steps: usize,
    pub grid_error_bound: f64,
    pub worst_gap: f64,
    pub worst_g: f64,
    pub samples: Vec<CertSample>,
}

impl CertificationReport {
    fn invalid(reason: String, tolerance: f64, grid_steps: usize) -> Self {
        CertificationReport {
            pass: false,
            status: format!("invalid configuration: {reason}"),
            tolerance,
            grid_steps,
            grid_error_bound: 0.0,
            worst_gap: 0.0,
            worst_g: 0.0,
            samples: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Certify the closed-form policy against both oracles on the given
/// generation samples. Failures are report entries, never errors; an invalid
/// configuration yields a report that says so.
pub fn certify_policy(
    config: &PlantConfig,
    tariff: &Tariff,
    g_samples: &[f64],
    tolerance: f64,
    grid_steps: usize,
) -> CertificationReport {
    let thresholds = match compute_thresholds(config, tariff) {
        Ok(t) => t,
        Err(e) => return CertificationReport::invalid(e.to_string(), tolerance, grid_steps),
    };
    certify_with_thresholds(config, tariff, &thresholds, g_samples, tolerance, grid_steps)
}

/// Certification against explicitly supplied thresholds; lets tests feed a
/// corrupted policy and watch it fail.
pub fn certify_with_thresholds(
    config: &PlantConfig,
    tariff: &Tariff,
    thresholds: &ThresholdSet,
    g_samples: &[f64],
    tolerance: f64,
    grid_steps: usize,
) -> CertificationReport {
    if g_samples.is_empty() {
        return CertificationReport::invalid("no generation samples".into(), tolerance, grid_steps);
    }
    if let Err(report) = validate_config(config, tariff) {
        return CertificationReport::invalid(report.to_string(), tolerance, grid_steps);
    }

    let samples: Vec<CertSample> = g_samples
        .par_iter()
        .map(|&g| {
            let policy_point =
                optimal_dispatch(g, thresholds, config).expect("validated config dispatches");
            let policy_profit = profit(&policy_point, config, tariff);
            let zonewise = solve_zonewise(g, config, tariff).expect("validated config solves");
            let grid =
                solve_grid(g, config, tariff, grid_steps).expect("validated config solves");
            let gap = (zonewise.profit - policy_profit)
                .max(grid.profit - policy_profit - grid.error_bound);
            CertSample {
                g,
                policy_profit,
                zonewise_profit: zonewise.profit,
                grid_profit: grid.profit,
                gap,
                pass: gap <= tolerance,
            }
        })
        .collect();

    let grid_error_bound = solve_grid(g_samples[0], config, tariff, grid_steps)
        .map(|s| s.error_bound)
        .unwrap_or(0.0);
    let worst = samples
        .iter()
        .max_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("nonempty samples");
    let pass = samples.iter().all(|s| s.pass);
    CertificationReport {
        pass,
        status: if pass { "PASS".into() } else { "FAIL".into() },
        tolerance,
        grid_steps,
        grid_error_bound,
        worst_gap: worst.gap,
        worst_g: worst.g,
        samples,
    }
}
