//! Closed-form optimal scheduling.
//!
//! The plant's profit is concave in the two water outputs, and the
//! electricity payment's kink at z = 0 splits the feasible box into an
//! import region, an islanded (net-zero) region, and an export region. A KKT
//! analysis of each region yields three first-order-condition TDP levels and
//! four renewable-generation breakpoints; dispatch then reduces to comparing
//! the measured generation `g` against those precomputed breakpoints. The
//! whole [`ThresholdSet`] depends only on tariff and plant parameters, so it
//! is computed once, offline, and shared read-only.
//!
//! The derived formulas are certified against the independent solvers in
//! [`crate::oracle`] by the test suite; see `tests/acceptance.rs`.

use serde::{Deserialize, Serialize};

use crate::model::{
    dispatch_from_waters, validate_config, DispatchPoint, ModelError, PlantConfig, RodpParams,
    Tariff, ThermalCost,
};

/// RODP saturation regime, classifying `alpha_r · pi_water` against the
/// electricity price band `[pi_sell, pi_buy]`.
///
/// Boundary equalities classify as `Interior`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// Water is worth less than exported electricity: RODP pinned at minimum.
    Low,
    /// Water value lies inside the price band: RODP follows the net-zero manifold.
    Interior,
    /// Water is worth more than imported electricity: RODP pinned at maximum.
    High,
}

/// Operating zone as a function of renewable generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Zone {
    /// g below `gamma_im`: the plant imports power (z > 0).
    Import,
    /// Net-zero with the RODP held at its effective lower bound.
    NzLower,
    /// Net-zero with both units interior (TDP at its net-zero level).
    NzInterior,
    /// Net-zero with the RODP held at its effective upper bound.
    NzUpper,
    /// g above `gamma_ex`: the plant exports power (z < 0).
    Export,
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            Zone::Import => "IMPORT",
            Zone::NzLower => "NZ_LOWER",
            Zone::NzInterior => "NZ_INTERIOR",
            Zone::NzUpper => "NZ_UPPER",
            Zone::Export => "EXPORT",
        };
        f.write_str(label)
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            Regime::Low => "LOW",
            Regime::Interior => "INTERIOR",
            Regime::High => "HIGH",
        };
        f.write_str(label)
    }
}

/// Precomputed policy object: regime, the three TDP water levels, the
/// regime-effective RODP bounds, and the four generation breakpoints.
///
/// Invariants on output of [`compute_thresholds`]:
/// `gamma_im ≤ g_lo ≤ g_hi ≤ gamma_ex`, `w_h_im ≥ w_h_nz ≥ w_h_ex`, all TDP
/// levels inside `[w_min_h, w_max_h]`, and `ro_lo ≤ ro_hi` inside the RODP
/// box. Breakpoints may be negative; generation is physically nonnegative,
/// so zones below zero are simply unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub regime: Regime,
    /// TDP water level while importing (marginal electricity value `pi_buy`).
    pub w_h_im: f64,
    /// TDP water level on the interior net-zero segment (value `alpha_r·pi_water`).
    pub w_h_nz: f64,
    /// TDP water level while exporting (value `pi_sell`).
    pub w_h_ex: f64,
    /// Effective RODP lower bound for the regime (m³/h).
    pub ro_lo: f64,
    /// Effective RODP upper bound for the regime (m³/h).
    pub ro_hi: f64,
    /// Below this generation the plant imports (kWh).
    pub gamma_im: f64,
    /// Start of the interior net-zero segment (kWh).
    pub g_lo: f64,
    /// End of the interior net-zero segment (kWh).
    pub g_hi: f64,
    /// Above this generation the plant exports (kWh).
    pub gamma_ex: f64,
}

impl ThresholdSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("thresholds serialize")
    }
}

/// Classify the RODP regime: `Low` iff `alpha_r·pi_water < pi_sell`, `High`
/// iff `alpha_r·pi_water > pi_buy`, `Interior` on the closed interval between.
pub fn classify_regime(tariff: &Tariff, rodp: &RodpParams) -> Regime {
    let water_value = rodp.alpha_r * tariff.pi_water;
    if water_value < tariff.pi_sell {
        Regime::Low
    } else if water_value > tariff.pi_buy {
        Regime::High
    } else {
        Regime::Interior
    }
}

/// TDP water level maximizing `pi_water·w + (pi_s/eta_h)·w − C(w/alpha_h)`
/// over `[w_min_h, w_max_h]`, where `pi_s` is the marginal value of one kWh
/// of TDP electricity (`pi_buy` while importing, `pi_sell` while exporting,
/// `alpha_r·pi_water` on the net-zero manifold).
///
/// Stationarity: `C'(p) = alpha_h·pi_water + beta_h·pi_s`, then `w = alpha_h·p`
/// projected onto the flowrate box. Monotone nondecreasing in `pi_s` and in
/// `pi_water`. A disabled thermal unit (`alpha_h = 0` or `w_max_h = 0`)
/// returns `w_min_h`.
pub fn foc_water_level(pi_s: f64, config: &PlantConfig, tariff: &Tariff) -> f64 {
    let tdp = &config.tdp;
    if tdp.alpha_h == 0.0 || tdp.w_max_h == 0.0 {
        return tdp.w_min_h;
    }
    let marginal_value = tdp.alpha_h * tariff.pi_water + tdp.beta_h * pi_s;
    let fuel = tdp.cost.inverse_marginal(
        marginal_value,
        tdp.w_min_h / tdp.alpha_h,
        tdp.w_max_h / tdp.alpha_h,
    );
    (tdp.alpha_h * fuel).clamp(tdp.w_min_h, tdp.w_max_h)
}

/// Compute the full threshold set for a validated configuration.
///
/// Effective RODP traversal bounds: the full box in the interior regime,
/// collapsed to `w_max_r` (high) or `w_min_r` (low) when the profit is
/// monotone in `w_r`. The net-zero TDP level is clamped between the export
/// and import levels so the same piecewise rule covers the boundary regimes,
/// where the interior segment degenerates to a point.
pub fn compute_thresholds(
    config: &PlantConfig,
    tariff: &Tariff,
) -> Result<ThresholdSet, ModelError> {
    validate_config(config, tariff).map_err(ModelError::InvalidConfig)?;

    let rodp = &config.rodp;
    let regime = classify_regime(tariff, rodp);
    let (ro_lo, ro_hi) = match regime {
        Regime::Interior => (rodp.w_min_r, rodp.w_max_r),
        Regime::High => (rodp.w_max_r, rodp.w_max_r),
        Regime::Low => (rodp.w_min_r, rodp.w_min_r),
    };

    let w_h_im = foc_water_level(tariff.pi_buy, config, tariff);
    let w_h_ex = foc_water_level(tariff.pi_sell, config, tariff);
    let w_h_nz =
        foc_water_level(rodp.alpha_r * tariff.pi_water, config, tariff).clamp(w_h_ex, w_h_im);

    let eta_h = config.tdp.eta_h;
    let thresholds = ThresholdSet {
        regime,
        w_h_im,
        w_h_nz,
        w_h_ex,
        ro_lo,
        ro_hi,
        gamma_im: ro_lo / rodp.alpha_r - w_h_im / eta_h,
        g_lo: ro_lo / rodp.alpha_r - w_h_nz / eta_h,
        g_hi: ro_hi / rodp.alpha_r - w_h_nz / eta_h,
        gamma_ex: ro_hi / rodp.alpha_r - w_h_ex / eta_h,
    };
    debug_assert!(thresholds.gamma_im <= thresholds.g_lo);
    debug_assert!(thresholds.g_lo <= thresholds.g_hi);
    debug_assert!(thresholds.g_hi <= thresholds.gamma_ex);
    Ok(thresholds)
}

/// Zone of a generation level, consistent with [`optimal_dispatch`]'s case
/// split.
pub fn zone_of(g: f64, thresholds: &ThresholdSet) -> Zone {
    if g < thresholds.gamma_im {
        Zone::Import
    } else if g < thresholds.g_lo {
        Zone::NzLower
    } else if g <= thresholds.g_hi {
        Zone::NzInterior
    } else if g <= thresholds.gamma_ex {
        Zone::NzUpper
    } else {
        Zone::Export
    }
}

// Net-zero operating point: the RODP consumes exactly the TDP output plus
// renewables, so z is pinned to 0 rather than recomputed through the
// conversions (which would leave ~1 ulp of noise).
fn net_zero_point(
    w_h: f64,
    w_r: Option<f64>,
    g: f64,
    config: &PlantConfig,
) -> Result<DispatchPoint, ModelError> {
    let tdp = &config.tdp;
    let p_h = if w_h == 0.0 {
        0.0
    } else if tdp.alpha_h == 0.0 {
        return Err(ModelError::ThermalDisabled { w_h });
    } else {
        w_h / tdp.alpha_h
    };
    let q_h = w_h / tdp.eta_h;
    let (w_r, q_r) = match w_r {
        // RODP bound active: keep the bound exact and derive its consumption.
        Some(w_r) => (w_r, w_r / config.rodp.alpha_r),
        // Interior: consumption balances generation exactly.
        None => {
            let q_r = q_h + g;
            (config.rodp.alpha_r * q_r, q_r)
        }
    };
    Ok(DispatchPoint {
        w_h,
        w_r,
        q_h,
        q_r,
        p_h,
        g,
        z: 0.0,
    })
}

/// Optimal dispatch for a measured generation `g`, using thresholds computed
/// from the same configuration and tariff.
///
/// Piecewise in `g`: constant TDP at `w_h_im` with the RODP at its effective
/// lower bound while importing; a net-zero band where first the TDP ramps
/// down along the RODP lower bound, then the RODP ramps up at constant TDP,
/// then the TDP ramps down along the RODP upper bound; constant TDP at
/// `w_h_ex` with the RODP at its effective upper bound while exporting.
pub fn optimal_dispatch(
    g: f64,
    thresholds: &ThresholdSet,
    config: &PlantConfig,
) -> Result<DispatchPoint, ModelError> {
    let tdp = &config.tdp;
    let alpha_r = config.rodp.alpha_r;
    match zone_of(g, thresholds) {
        Zone::Import => dispatch_from_waters(thresholds.w_h_im, thresholds.ro_lo, g, config),
        Zone::Export => dispatch_from_waters(thresholds.w_h_ex, thresholds.ro_hi, g, config),
        Zone::NzLower => {
            let w_h = (tdp.eta_h * (thresholds.ro_lo / alpha_r - g))
                .clamp(tdp.w_min_h, tdp.w_max_h);
            net_zero_point(w_h, Some(thresholds.ro_lo), g, config)
        }
        Zone::NzUpper => {
            let w_h = (tdp.eta_h * (thresholds.ro_hi / alpha_r - g))
                .clamp(tdp.w_min_h, tdp.w_max_h);
            net_zero_point(w_h, Some(thresholds.ro_hi), g, config)
        }
        Zone::NzInterior => net_zero_point(thresholds.w_h_nz, None, g, config),
    }
}
