//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture` to
//! see them). Tolerances are pinned here, not configurable.

mod common;

use std::io::BufReader;
use std::time::Instant;

use common::{ensemble, g_span};
use desal_core::model::{profit, Tariff};
use desal_core::oracle::{solve_grid, solve_zonewise};
use desal_core::policy::{compute_thresholds, optimal_dispatch, zone_of, Regime, Zone};
use desal_core::scenario::{fit_hourly_stats, load_profiles, sample_profiles, HOURS};
use desal_core::sim::run_monte_carlo;

fn report(criterion: &str, pass: bool, detail: String) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

fn reference_plant() -> desal_core::PlantConfig {
    let json = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/reference_plant.json"
    ))
    .expect("reference config readable");
    desal_core::ConfigFile::from_json(&json).expect("reference config valid").plant
}

fn reference_tariff(pi_water: f64) -> Tariff {
    Tariff {
        pi_water,
        pi_buy: 0.4,
        pi_sell: 0.1,
    }
}

fn rel_close(actual: f64, expected: f64) -> bool {
    (actual - expected).abs() <= 1e-9 * expected.abs().max(1e-9)
}

const ENSEMBLE_SIZE: usize = 1000;
const ENSEMBLE_SEED: u64 = 0x5eed_0001;

/// Criterion 1 — policy/oracle equivalence over the randomized ensemble.
///
/// Zonewise comparison covers all 1000 configurations × 64 generation
/// samples; the grid oracle (n_steps = 2000, ~4e6 evaluations per solve) runs
/// on a deterministic subsample (every 25th configuration, every 8th sample)
/// to stay inside the five-minute budget.
#[test]
fn criterion_1_policy_oracle_equivalence() {
    let start = Instant::now();
    let cases = ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let mut worst_zonewise_gap: f64 = 0.0;
    let mut worst_grid_excess: f64 = f64::NEG_INFINITY;

    for (index, (config, tariff)) in cases.iter().enumerate() {
        let thresholds = compute_thresholds(config, tariff).expect("valid case");
        let span = g_span(&thresholds, config);
        for step in 0..64 {
            let g = span * step as f64 / 63.0;
            let point = optimal_dispatch(g, &thresholds, config).expect("dispatch");
            let policy_profit = profit(&point, config, tariff);

            let zonewise = solve_zonewise(g, config, tariff).expect("zonewise");
            let gap = (zonewise.profit - policy_profit).abs();
            worst_zonewise_gap = worst_zonewise_gap.max(gap);
            assert!(
                gap <= 1e-6,
                "config {index} g={g}: |zonewise - policy| = {gap} > 1e-6 \
                 (policy {policy_profit}, zonewise {})",
                zonewise.profit
            );

            if index % 25 == 0 && step % 8 == 0 {
                let grid = solve_grid(g, config, tariff, 2000).expect("grid");
                let excess = grid.profit - policy_profit - grid.error_bound;
                worst_grid_excess = worst_grid_excess.max(excess);
                assert!(
                    grid.profit - policy_profit <= grid.error_bound,
                    "config {index} g={g}: grid beat the policy beyond its error bound"
                );
            }
        }
    }

    let elapsed = start.elapsed();
    report(
        "criterion 1 (policy-oracle equivalence)",
        elapsed.as_secs_f64() < 300.0,
        format!(
            "worst zonewise gap {worst_zonewise_gap:.3e} $, worst grid excess \
             {worst_grid_excess:.3e} $, elapsed {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 2 — TDP water nonincreasing and RODP water nondecreasing in g
/// across a 10,000-point sweep of every ensemble configuration. Comparisons
/// use the module-wide 1e-9 relative tolerance.
#[test]
fn criterion_2_monotonicity() {
    let cases = ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let mut violations = 0usize;
    for (config, tariff) in &cases {
        let thresholds = compute_thresholds(config, tariff).expect("valid case");
        let span = g_span(&thresholds, config);
        let mut previous: Option<(f64, f64)> = None;
        for step in 0..10_000 {
            let g = span * step as f64 / 9_999.0;
            let point = optimal_dispatch(g, &thresholds, config).expect("dispatch");
            if let Some((w_h_prev, w_r_prev)) = previous {
                if point.w_h > w_h_prev + 1e-9 * w_h_prev.abs().max(1.0) {
                    violations += 1;
                }
                if point.w_r < w_r_prev - 1e-9 * w_r_prev.abs().max(1.0) {
                    violations += 1;
                }
            }
            previous = Some((point.w_h, point.w_r));
        }
    }
    report(
        "criterion 2 (monotonicity in g)",
        violations == 0,
        format!(
            "{violations} violations across {} configs x 10000 samples",
            cases.len()
        ),
    );
}

/// Criterion 3 — threshold ordering and zone/sign agreement, |z| ≤ 1e-9 in
/// net-zero zones, on every ensemble configuration.
#[test]
fn criterion_3_threshold_structure() {
    let cases = ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let mut checked = 0usize;
    for (index, (config, tariff)) in cases.iter().enumerate() {
        let t = compute_thresholds(config, tariff).expect("valid case");
        assert!(
            t.gamma_im <= t.g_lo && t.g_lo <= t.g_hi && t.g_hi <= t.gamma_ex,
            "config {index}: breakpoints out of order: {} {} {} {}",
            t.gamma_im,
            t.g_lo,
            t.g_hi,
            t.gamma_ex
        );
        let span = g_span(&t, config);
        for step in 0..256 {
            let g = span * step as f64 / 255.0;
            let point = optimal_dispatch(g, &t, config).expect("dispatch");
            match zone_of(g, &t) {
                Zone::Import => assert!(
                    point.z > -1e-9,
                    "config {index} g={g}: import zone with z = {}",
                    point.z
                ),
                Zone::Export => assert!(
                    point.z < 1e-9,
                    "config {index} g={g}: export zone with z = {}",
                    point.z
                ),
                _ => assert!(
                    point.z.abs() <= 1e-9,
                    "config {index} g={g}: net-zero zone with |z| = {}",
                    point.z.abs()
                ),
            }
            checked += 1;
        }
    }
    report(
        "criterion 3 (threshold structure and zone signs)",
        true,
        format!("{checked} dispatches across {} configs", cases.len()),
    );
}

/// Criterion 4 — intermediate water price on the reference plant: thresholds
/// (−250, −237.5, 33094.5, 33232) and TDP levels (25, 23.75, 10) to 1e-9
/// relative, and z(g) ≤ 0 for all g ≥ 0.
#[test]
fn criterion_4_reference_interior_price() {
    let config = reference_plant();
    let tariff = reference_tariff(1.5);
    let t = compute_thresholds(&config, &tariff).expect("valid case");

    let mut pass = t.regime == Regime::Interior;
    for (actual, expected) in [
        (t.gamma_im, -250.0),
        (t.g_lo, -237.5),
        (t.g_hi, 33_094.5),
        (t.gamma_ex, 33_232.0),
        (t.w_h_im, 25.0),
        (t.w_h_nz, 23.75),
        (t.w_h_ex, 10.0),
    ] {
        pass &= rel_close(actual, expected);
    }

    let mut max_z: f64 = f64::NEG_INFINITY;
    for step in 0..=50_000 {
        let g = step as f64;
        let point = optimal_dispatch(g, &t, &config).expect("dispatch");
        max_z = max_z.max(point.z);
    }
    pass &= max_z <= 1e-9;

    report(
        "criterion 4 (reference interior price)",
        pass,
        format!(
            "thresholds ({}, {}, {}, {}), levels ({}, {}, {}), max z over g-sweep {max_z:.3e}",
            t.gamma_im, t.g_lo, t.g_hi, t.gamma_ex, t.w_h_im, t.w_h_nz, t.w_h_ex
        ),
    );
}

/// Criterion 5 — high water price on the reference plant: RODP pinned at
/// 8333 for every g, and the slope of w_h(g) changes discontinuously at both
/// gamma_im and gamma_ex.
#[test]
fn criterion_5_reference_high_price() {
    let config = reference_plant();
    let tariff = reference_tariff(5.0);
    let t = compute_thresholds(&config, &tariff).expect("valid case");
    let mut pass = t.regime == Regime::High;

    for step in 0..=40_000 {
        let g = step as f64 * 1.25;
        let point = optimal_dispatch(g, &t, &config).expect("dispatch");
        if point.w_r != 8333.0 {
            pass = false;
            break;
        }
    }

    // Slopes straddling each breakpoint; eta_h = 0.1 inside the band, 0 outside.
    let mut kinks = Vec::new();
    for edge in [t.gamma_im, t.gamma_ex] {
        let h = 1.0;
        let w = |g: f64| {
            optimal_dispatch(g, &t, &config)
                .expect("dispatch")
                .w_h
        };
        let slope_left = (w(edge) - w(edge - h)) / h;
        let slope_right = (w(edge + h) - w(edge)) / h;
        kinks.push((slope_left, slope_right));
        pass &= (slope_left - slope_right).abs() > 0.5 * config.tdp.eta_h;
    }

    report(
        "criterion 5 (reference high price)",
        pass,
        format!(
            "w_r pinned at 8333; slope pairs at breakpoints: {:?}",
            kinks
        ),
    );
}

/// Criterion 6 — low water price on the reference plant: RODP at zero and
/// constant TDP output for every g ≥ 0 (full renewable export).
#[test]
fn criterion_6_reference_low_price() {
    let config = reference_plant();
    let tariff = reference_tariff(0.2);
    let t = compute_thresholds(&config, &tariff).expect("valid case");
    let mut pass = t.regime == Regime::Low;

    let baseline = optimal_dispatch(0.0, &t, &config).expect("dispatch");
    pass &= rel_close(baseline.w_h, 3.5);
    for step in 0..=40_000 {
        let g = step as f64 * 1.25;
        let point = optimal_dispatch(g, &t, &config).expect("dispatch");
        pass &= point.w_r == 0.0 && point.w_h == baseline.w_h;
        if !pass {
            break;
        }
    }
    report(
        "criterion 6 (reference low price)",
        pass,
        format!("w_h constant at {}, w_r constant at 0", baseline.w_h),
    );
}

/// Criterion 7 — export-priority: wherever water beats the export price, no
/// dispatched point exports with spare RODP capacity.
#[test]
fn criterion_7_export_priority() {
    let cases = ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let mut restricted = 0usize;
    for (index, (config, tariff)) in cases.iter().enumerate() {
        if config.rodp.alpha_r * tariff.pi_water <= tariff.pi_sell {
            continue;
        }
        restricted += 1;
        let t = compute_thresholds(config, tariff).expect("valid case");
        let span = g_span(&t, config);
        for step in 0..256 {
            let g = span * step as f64 / 255.0;
            let point = optimal_dispatch(g, &t, config).expect("dispatch");
            if point.z < -1e-9 {
                assert!(
                    (point.w_r - config.rodp.w_max_r).abs()
                        <= 1e-9 * config.rodp.w_max_r.max(1.0),
                    "config {index} g={g}: exporting (z={}) with w_r={} < w_max_r={}",
                    point.z,
                    point.w_r,
                    config.rodp.w_max_r
                );
            }
        }
    }
    report(
        "criterion 7 (export priority)",
        restricted > 0,
        format!("{restricted} configurations in the restricted ensemble"),
    );
}

/// Criterion 8 — Monte Carlo statistical acceptance on the shipped fixture:
/// per-hour sample means within 3·std/√n of the fitted means at n = 10,000,
/// all samples nonnegative, and identical seeds reproduce a byte-identical
/// summary, in under a minute.
#[test]
fn criterion_8_monte_carlo_acceptance() {
    let start = Instant::now();
    let file = std::fs::File::open(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/pv_fixture_365d.csv"
    ))
    .expect("fixture readable");
    let profiles = load_profiles(BufReader::new(file)).expect("fixture parses");
    assert_eq!(profiles.len(), 365);
    let stats = fit_hourly_stats(&profiles).expect("fixture stats");

    // Fixture shape: dark hours identically zero, peak at hour 13.
    assert_eq!(stats.mean[0], 0.0);
    assert_eq!(stats.std[0], 0.0);
    let peak_hour = (0..HOURS).max_by(|&a, &b| stats.mean[a].total_cmp(&stats.mean[b]));
    assert_eq!(peak_hour, Some(13));

    let n = 10_000;
    let seed = 7;
    let samples = sample_profiles(&stats, n, seed);
    let mut worst_sigma = 0.0f64;
    let mut pass = true;
    for hour in 0..HOURS {
        let mean: f64 = samples.iter().map(|p| p.get(hour)).sum::<f64>() / n as f64;
        if stats.std[hour] == 0.0 {
            pass &= mean == stats.mean[hour];
            continue;
        }
        let band = 3.0 * stats.std[hour] / (n as f64).sqrt();
        let sigmas = (mean - stats.mean[hour]).abs() / (stats.std[hour] / (n as f64).sqrt());
        worst_sigma = worst_sigma.max(sigmas);
        pass &= (mean - stats.mean[hour]).abs() <= band;
    }
    pass &= samples
        .iter()
        .all(|p| p.values().iter().all(|&v| v >= 0.0));

    let config = reference_plant();
    let tariff = reference_tariff(1.5);
    let first = run_monte_carlo(&stats, n, seed, &config, &tariff).expect("mc");
    let second = run_monte_carlo(&stats, n, seed, &config, &tariff).expect("mc");
    pass &= first.to_json() == second.to_json();

    // At the intermediate price the plant is never a median importer.
    for hour in 0..HOURS {
        pass &= first.z.p50[hour] <= 0.0;
        pass &= first.z.p5[hour] <= first.z.p50[hour] && first.z.p50[hour] <= first.z.p95[hour];
    }

    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 60.0;
    report(
        "criterion 8 (Monte Carlo statistical acceptance)",
        pass,
        format!(
            "worst hourly deviation {worst_sigma:.2} sigma, {} runs, elapsed {:.1}s",
            n,
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 9 — continuity: between adjacent samples of a 10,000-point
/// sweep with step δ, |Δw_h| ≤ eta_h·δ + 1e-6 and |Δw_r| ≤ alpha_r·δ + 1e-6,
/// including across zone boundaries.
#[test]
fn criterion_9_continuity() {
    let cases = ensemble(ENSEMBLE_SIZE, ENSEMBLE_SEED);
    let mut worst_ratio = 0.0f64;
    for (index, (config, tariff)) in cases.iter().enumerate() {
        let t = compute_thresholds(config, tariff).expect("valid case");
        let span = g_span(&t, config);
        let delta = span / 9_999.0;
        let bound_h = config.tdp.eta_h * delta + 1e-6;
        let bound_r = config.rodp.alpha_r * delta + 1e-6;
        let mut previous: Option<(f64, f64)> = None;
        for step in 0..10_000 {
            let g = span * step as f64 / 9_999.0;
            let point = optimal_dispatch(g, &t, config).expect("dispatch");
            if let Some((w_h_prev, w_r_prev)) = previous {
                let dh = (point.w_h - w_h_prev).abs();
                let dr = (point.w_r - w_r_prev).abs();
                worst_ratio = worst_ratio.max(dh / bound_h).max(dr / bound_r);
                assert!(
                    dh <= bound_h,
                    "config {index} g={g}: |dw_h| = {dh} > {bound_h}"
                );
                assert!(
                    dr <= bound_r,
                    "config {index} g={g}: |dw_r| = {dr} > {bound_r}"
                );
            }
            previous = Some((point.w_h, point.w_r));
        }
    }
    report(
        "criterion 9 (continuity)",
        worst_ratio <= 1.0,
        format!("worst |Δw|/bound ratio {worst_ratio:.3}"),
    );
}
