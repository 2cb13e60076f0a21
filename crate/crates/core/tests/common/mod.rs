//! Shared test support: the randomized configuration ensemble used by the
//! acceptance suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use desal_core::model::{CostParams, PlantConfig, RodpParams, Tariff, TdpParams};
use desal_core::policy::ThresholdSet;

/// Randomization ranges for the valid-configuration ensemble:
///
/// | parameter   | distribution                         |
/// |-------------|--------------------------------------|
/// | alpha_h     | log-uniform [0.02, 1.0] m³/BTU       |
/// | eta_h       | log-uniform [0.02, 1.0] m³/kWh       |
/// | alpha_r     | log-uniform [0.05, 2.0] m³/kWh       |
/// | cost a      | log-uniform [1e-3, 1.0] $/BTU        |
/// | cost b      | log-uniform [1e-6, 1e-2] $/BTU²      |
/// | pi_water    | log-uniform [0.05, 10] $/m³          |
/// | prices      | two log-uniform [0.01, 1.0] $/kWh, ordered so pi_buy ≥ pi_sell |
/// | w_max_h/r   | log-uniform [10, 20000] m³/h         |
/// | w_min_h/r   | uniform [0, 0.2 · w_max] m³/h        |
/// | demand floor| uniform [0, w_min_h + w_min_r] m³/h  |
///
/// Every drawn case satisfies `validate_config`.
pub fn ensemble(n: usize, seed: u64) -> Vec<(PlantConfig, Tariff)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        rng.random_range(lo.ln()..hi.ln()).exp()
    }

    (0..n)
        .map(|_| {
            let alpha_h = log_uniform(&mut rng, 0.02, 1.0);
            let eta_h = log_uniform(&mut rng, 0.02, 1.0);
            let alpha_r = log_uniform(&mut rng, 0.05, 2.0);
            let a = log_uniform(&mut rng, 1e-3, 1.0);
            let b = log_uniform(&mut rng, 1e-6, 1e-2);
            let pi_water = log_uniform(&mut rng, 0.05, 10.0);
            let p1 = log_uniform(&mut rng, 0.01, 1.0);
            let p2 = log_uniform(&mut rng, 0.01, 1.0);
            let w_max_h = log_uniform(&mut rng, 10.0, 20_000.0);
            let w_min_h = rng.random_range(0.0..0.2) * w_max_h;
            let w_max_r = log_uniform(&mut rng, 10.0, 20_000.0);
            let w_min_r = rng.random_range(0.0..0.2) * w_max_r;
            let demand_floor = rng.random_range(0.0..1.0) * (w_min_h + w_min_r);

            let config = PlantConfig {
                tdp: TdpParams::new(alpha_h, eta_h, w_min_h, w_max_h, CostParams { a, b }),
                rodp: RodpParams {
                    alpha_r,
                    w_min_r,
                    w_max_r,
                },
                demand_floor,
            };
            let tariff = Tariff {
                pi_water,
                pi_buy: p1.max(p2),
                pi_sell: p1.min(p2),
            };
            desal_core::validate_config(&config, &tariff).expect("ensemble draws are valid");
            (config, tariff)
        })
        .collect()
}

/// Generation span covering every zone of a threshold set: import (when
/// reachable), the whole net-zero band, and a stretch of the export zone.
pub fn g_span(thresholds: &ThresholdSet, config: &PlantConfig) -> f64 {
    1.5 * thresholds.gamma_ex.max(0.0) + config.rodp.w_max_r / config.rodp.alpha_r + 1.0
}
