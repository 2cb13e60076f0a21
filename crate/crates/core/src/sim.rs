//! Day-level and Monte Carlo simulation.
//!
//! The dispatch problem is single-period, so a day is just 24 independent
//! hourly solves against the same precomputed thresholds; the per-day framing
//! is presentation. Monte Carlo runs are parallel across sampled profiles
//! with order-independent aggregation, so summaries are a pure function of
//! `(stats, n, seed, config, tariff)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{profit, DispatchPoint, ModelError, PlantConfig, Tariff};
use crate::policy::{compute_thresholds, optimal_dispatch, zone_of, ThresholdSet, Zone};
use crate::scenario::{sample_profiles, HourlyProfile, HourlyStats, HOURS};

/// One simulated day: 24 operating points, their profits and zones.
#[derive(Debug, Clone, Serialize)]
pub struct DaySchedule {
    pub hours: Vec<DispatchPoint>,
    pub hourly_profit: Vec<f64>,
    pub total_profit: f64,
    pub zone_labels: Vec<Zone>,
}

impl DaySchedule {
    /// CSV rows in the documented column order
    /// `hour,g,w_h,w_r,q_h,q_r,z,profit,zone`, one row per hour.
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::from("hour,g,w_h,w_r,q_h,q_r,z,profit,zone\n");
        for (hour, point) in self.hours.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                hour,
                point.g,
                point.w_h,
                point.w_r,
                point.q_h,
                point.q_r,
                point.z,
                self.hourly_profit[hour],
                self.zone_labels[hour],
            ));
        }
        out
    }
}

/// Per-hour p5/p50/p95 bands of one dispatch quantity across Monte Carlo runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HourlyQuantiles {
    pub p5: [f64; HOURS],
    pub p50: [f64; HOURS],
    pub p95: [f64; HOURS],
}

/// Monte Carlo aggregate: profit moments and per-hour dispatch bands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub runs: usize,
    pub profit_mean: f64,
    pub profit_std: f64,
    pub w_h: HourlyQuantiles,
    pub w_r: HourlyQuantiles,
    pub z: HourlyQuantiles,
}

impl McSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// One entry of a water-price sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub pi_water: f64,
    pub thresholds: ThresholdSet,
    pub schedule: DaySchedule,
}

/// Apply the policy hour by hour to one generation profile.
pub fn run_day(
    profile: &HourlyProfile,
    thresholds: &ThresholdSet,
    config: &PlantConfig,
    tariff: &Tariff,
) -> Result<DaySchedule, ModelError> {
    let mut hours = Vec::with_capacity(HOURS);
    let mut hourly_profit = Vec::with_capacity(HOURS);
    let mut zone_labels = Vec::with_capacity(HOURS);
    for hour in 0..HOURS {
        let g = profile.get(hour);
        let point = optimal_dispatch(g, thresholds, config)?;
        hourly_profit.push(profit(&point, config, tariff));
        zone_labels.push(zone_of(g, thresholds));
        hours.push(point);
    }
    let total_profit = hourly_profit.iter().sum();
    Ok(DaySchedule {
        hours,
        hourly_profit,
        total_profit,
        zone_labels,
    })
}

// Linear-interpolation quantile on a sorted slice (the common "type 7" rule).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let position = q * (n - 1) as f64;
    let lo = position.floor() as usize;
    let hi = position.ceil() as usize;
    let fraction = position - lo as f64;
    sorted[lo] + fraction * (sorted[hi] - sorted[lo])
}

/// Sample `n` profiles from the fitted statistics, dispatch each day, and
/// aggregate. Deterministic given the seed.
pub fn run_monte_carlo(
    stats: &HourlyStats,
    n: usize,
    seed: u64,
    config: &PlantConfig,
    tariff: &Tariff,
) -> Result<McSummary, ModelError> {
    let thresholds = compute_thresholds(config, tariff)?;
    let profiles = sample_profiles(stats, n.max(1), seed);
    let days: Vec<DaySchedule> = profiles
        .par_iter()
        .map(|profile| run_day(profile, &thresholds, config, tariff))
        .collect::<Result<_, _>>()?;

    let runs = days.len();
    let profit_mean = days.iter().map(|d| d.total_profit).sum::<f64>() / runs as f64;
    let profit_std = if runs > 1 {
        (days
            .iter()
            .map(|d| {
                let e = d.total_profit - profit_mean;
                e * e
            })
            .sum::<f64>()
            / (runs - 1) as f64)
            .sqrt()
    } else {
        0.0
    };

    let mut bands = [(); 3].map(|_| HourlyQuantiles {
        p5: [0.0; HOURS],
        p50: [0.0; HOURS],
        p95: [0.0; HOURS],
    });
    for hour in 0..HOURS {
        for (slot, extract) in [
            |p: &DispatchPoint| p.w_h,
            |p: &DispatchPoint| p.w_r,
            |p: &DispatchPoint| p.z,
        ]
        .iter()
        .enumerate()
        {
            let mut column: Vec<f64> = days.iter().map(|d| extract(&d.hours[hour])).collect();
            column.sort_by(f64::total_cmp);
            bands[slot].p5[hour] = quantile_sorted(&column, 0.05);
            bands[slot].p50[hour] = quantile_sorted(&column, 0.50);
            bands[slot].p95[hour] = quantile_sorted(&column, 0.95);
        }
    }
    let [w_h, w_r, z] = bands;
    Ok(McSummary {
        runs,
        profit_mean,
        profit_std,
        w_h,
        w_r,
        z,
    })
}

/// Recompute thresholds for each water price (everything else fixed) and run
/// the same day under each.
pub fn sweep_price(
    prices: &[f64],
    profile: &HourlyProfile,
    config: &PlantConfig,
    base_tariff: &Tariff,
) -> Result<Vec<SweepEntry>, ModelError> {
    prices
        .iter()
        .map(|&pi_water| {
            let tariff = Tariff {
                pi_water,
                ..*base_tariff
            };
            let thresholds = compute_thresholds(config, &tariff)?;
            let schedule = run_day(profile, &thresholds, config, &tariff)?;
            Ok(SweepEntry {
                pi_water,
                thresholds,
                schedule,
            })
        })
        .collect()
}
