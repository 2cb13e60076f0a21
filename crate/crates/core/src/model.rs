//! Plant model: domain types, unit conversions, payment functions and profit.
//!
//! Canonical units throughout: water in m³/h, electricity in kWh, fuel in BTU,
//! money in $. Conversion factors carry compound units (e.g. `alpha_r` is
//! m³/kWh). All quantities are `f64`; comparisons in tests use a relative
//! tolerance of [`REL_TOL`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative comparison tolerance for money and flow values.
pub const REL_TOL: f64 = 1e-9;

/// Quadratic fuel-cost coefficients: `C(p) = b·p² + a·p` with `p` in BTU.
///
/// `b > 0` is mandatory (strict convexity); `a ≥ 0` keeps the cost
/// non-decreasing on the feasible fuel range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Linear coefficient ($/BTU).
    pub a: f64,
    /// Quadratic coefficient ($/BTU²).
    pub b: f64,
}

/// Extensible thermal-cost contract: evaluate, marginal, and inverse marginal.
///
/// The shipped implementation is the quadratic [`CostParams`]; any strictly
/// convex, continuously differentiable, non-decreasing cost can be plugged in.
/// The default `inverse_marginal` is a monotone bisection on the marginal to
/// 1e-9 relative tolerance; implementations with a closed form should
/// override it.
pub trait ThermalCost {
    fn evaluate(&self, fuel: f64) -> f64;
    fn marginal(&self, fuel: f64) -> f64;

    /// The unique `p` in `[lo, hi]` minimizing `|C'(p) − m|`, i.e. the
    /// first-order-condition root projected onto the interval. `hi` may be
    /// `f64::INFINITY`.
    fn inverse_marginal(&self, m: f64, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        if self.marginal(lo) >= m {
            return lo;
        }
        // Grow the bracket when the upper bound is unbounded.
        let mut hi_b = if hi.is_finite() { hi } else { lo.max(1.0) };
        if !hi.is_finite() {
            while self.marginal(hi_b) < m && hi_b < 1e300 {
                hi_b *= 2.0;
            }
        }
        if self.marginal(hi_b) <= m {
            return hi_b;
        }
        let mut lo_b = lo;
        // Monotone bisection on C' to 1e-9 relative width.
        while (hi_b - lo_b) > 1e-9 * hi_b.abs().max(1.0) {
            let mid = 0.5 * (lo_b + hi_b);
            if self.marginal(mid) < m {
                lo_b = mid;
            } else {
                hi_b = mid;
            }
        }
        0.5 * (lo_b + hi_b)
    }
}

impl ThermalCost for CostParams {
    fn evaluate(&self, fuel: f64) -> f64 {
        self.b * fuel * fuel + self.a * fuel
    }

    fn marginal(&self, fuel: f64) -> f64 {
        2.0 * self.b * fuel + self.a
    }

    // Closed form for the quadratic: p* = clip((m − a) / 2b, lo, hi).
    fn inverse_marginal(&self, m: f64, lo: f64, hi: f64) -> f64 {
        ((m - self.a) / (2.0 * self.b)).clamp(lo, hi)
    }
}

/// Thermal desalination unit parameters.
///
/// Water from fuel: `w_h = alpha_h · p_h`; electricity by-product:
/// `w_h = eta_h · q_h`. `beta_h = alpha_h / eta_h` (BTU per kWh) is derived
/// and recomputed on construction and deserialization, so it is always
/// consistent with the other two factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "TdpParamsDoc")]
pub struct TdpParams {
    /// Water-per-fuel conversion (m³/BTU). Zero disables the unit.
    pub alpha_h: f64,
    /// Water-per-electricity production ratio (m³/kWh).
    pub eta_h: f64,
    /// Fuel-per-electricity ratio (BTU/kWh), derived as `alpha_h / eta_h`.
    pub beta_h: f64,
    /// Minimum water flowrate (m³/h).
    pub w_min_h: f64,
    /// Maximum water flowrate (m³/h).
    pub w_max_h: f64,
    pub cost: CostParams,
}

impl TdpParams {
    pub fn new(alpha_h: f64, eta_h: f64, w_min_h: f64, w_max_h: f64, cost: CostParams) -> Self {
        Self {
            alpha_h,
            eta_h,
            beta_h: alpha_h / eta_h,
            w_min_h,
            w_max_h,
            cost,
        }
    }
}

/// Shadow document for deserialization: `beta_h` in the input is ignored and
/// recomputed so the derived-field invariant holds for any source document.
#[derive(Deserialize)]
struct TdpParamsDoc {
    alpha_h: f64,
    eta_h: f64,
    #[serde(default)]
    #[allow(dead_code)]
    beta_h: Option<f64>,
    w_min_h: f64,
    w_max_h: f64,
    cost: CostParams,
}

impl From<TdpParamsDoc> for TdpParams {
    fn from(doc: TdpParamsDoc) -> Self {
        TdpParams::new(doc.alpha_h, doc.eta_h, doc.w_min_h, doc.w_max_h, doc.cost)
    }
}

/// Reverse-osmosis unit parameters. Water from electricity: `w_r = alpha_r · q_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodpParams {
    /// Water-per-electricity conversion (m³/kWh), strictly positive.
    pub alpha_r: f64,
    /// Minimum water flowrate (m³/h).
    pub w_min_r: f64,
    /// Maximum water flowrate (m³/h).
    pub w_max_r: f64,
}

/// Water selling price and asymmetric electricity import/export prices.
///
/// `pi_buy ≥ pi_sell ≥ 0` (net metering with no arbitrage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tariff {
    /// Water selling price ($/m³).
    pub pi_water: f64,
    /// Electricity import price ($/kWh).
    pub pi_buy: f64,
    /// Electricity export price ($/kWh).
    pub pi_sell: f64,
}

/// Full plant description: thermal unit, RO unit, and the utility's minimum
/// water demand. Sizing assumption: `w_min_h + w_min_r ≥ demand_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantConfig {
    pub tdp: TdpParams,
    pub rodp: RodpParams,
    /// Minimum total water demanded by the water utility (m³/h).
    pub demand_floor: f64,
}

/// The on-disk configuration document: plant parameters plus tariff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub plant: PlantConfig,
    pub tariff: Tariff,
}

impl ConfigFile {
    /// Parse and validate. Invalid documents are rejected with the itemized
    /// violation list.
    pub fn from_json(json: &str) -> Result<Self, ModelError> {
        let file: ConfigFile = serde_json::from_str(json)?;
        validate_config(&file.plant, &file.tariff).map_err(ModelError::InvalidConfig)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One feasible operating point of the plant.
///
/// Identities: `q_h = w_h / eta_h`, `p_h = w_h / alpha_h` (zero when the
/// thermal unit is off), `q_r = w_r / alpha_r`, `z = q_r − q_h − g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchPoint {
    /// TDP water output (m³/h).
    pub w_h: f64,
    /// RODP water output (m³/h).
    pub w_r: f64,
    /// TDP electricity output (kWh).
    pub q_h: f64,
    /// RODP electricity consumption (kWh).
    pub q_r: f64,
    /// TDP fuel input (BTU).
    pub p_h: f64,
    /// Renewable generation (kWh).
    pub g: f64,
    /// Net grid consumption (kWh): positive imports, negative exports.
    pub z: f64,
}

/// A single configuration-invariant breach, with enough context to act on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("pi_buy < pi_sell: import price {pi_buy} must be at least export price {pi_sell}")]
    PiBuyLessThanPiSell { pi_buy: f64, pi_sell: f64 },
    #[error("water price pi_water must be nonnegative, got {0}")]
    NegativeWaterPrice(f64),
    #[error("export price pi_sell must be nonnegative, got {0}")]
    NegativeSellPrice(f64),
    #[error("quadratic cost coefficient b must be positive for strict convexity, got {0}")]
    NonConvexCost(f64),
    #[error("linear cost coefficient a must be nonnegative, got {0}")]
    NegativeLinearCost(f64),
    #[error("TDP flowrate bounds invalid: need 0 <= w_min_h <= w_max_h, got [{lo}, {hi}]")]
    TdpBoundsInvalid { lo: f64, hi: f64 },
    #[error("RODP flowrate bounds invalid: need 0 <= w_min_r <= w_max_r, got [{lo}, {hi}]")]
    RodpBoundsInvalid { lo: f64, hi: f64 },
    #[error("TDP conversion alpha_h must be nonnegative, got {0}")]
    NegativeTdpConversion(f64),
    #[error("TDP water-to-electricity ratio eta_h must be positive, got {0}")]
    NonPositiveWaterElectricityRatio(f64),
    #[error("RODP conversion alpha_r must be positive, got {0}")]
    NonPositiveRodpConversion(f64),
    #[error("demand floor must be nonnegative, got {0}")]
    NegativeDemandFloor(f64),
    #[error(
        "sizing assumption violated: minimum output w_min_h + w_min_r = {min_output} \
         is below the demand floor {demand_floor}"
    )]
    SizingAssumption { min_output: f64, demand_floor: f64 },
    #[error("thermal unit disabled (alpha_h = 0) but w_min_h = {0} forces positive output")]
    DisabledTdpWithPositiveFloor(f64),
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
}

/// Itemized list of configuration violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration:\n{0}")]
    InvalidConfig(ValidationReport),
    #[error("thermal unit disabled but assigned output: alpha_h = 0 with w_h = {w_h}")]
    ThermalDisabled { w_h: f64 },
    #[error("failed to parse JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Check every type invariant; `Ok(())` iff the configuration is usable by
/// the policy and the oracles.
pub fn validate_config(config: &PlantConfig, tariff: &Tariff) -> Result<(), ValidationReport> {
    let mut violations = Vec::new();
    let tdp = &config.tdp;
    let rodp = &config.rodp;

    let finite_checks: [(&'static str, f64); 11] = [
        ("alpha_h", tdp.alpha_h),
        ("eta_h", tdp.eta_h),
        ("w_min_h", tdp.w_min_h),
        ("w_max_h", tdp.w_max_h),
        ("cost.a", tdp.cost.a),
        ("cost.b", tdp.cost.b),
        ("alpha_r", rodp.alpha_r),
        ("w_min_r", rodp.w_min_r),
        ("w_max_r", rodp.w_max_r),
        ("demand_floor", config.demand_floor),
        ("pi_water", tariff.pi_water),
    ];
    for (name, value) in finite_checks {
        if !value.is_finite() {
            violations.push(Violation::NonFinite(name));
        }
    }
    if !tariff.pi_buy.is_finite() {
        violations.push(Violation::NonFinite("pi_buy"));
    }
    if !tariff.pi_sell.is_finite() {
        violations.push(Violation::NonFinite("pi_sell"));
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    if tariff.pi_buy < tariff.pi_sell {
        violations.push(Violation::PiBuyLessThanPiSell {
            pi_buy: tariff.pi_buy,
            pi_sell: tariff.pi_sell,
        });
    }
    if tariff.pi_water < 0.0 {
        violations.push(Violation::NegativeWaterPrice(tariff.pi_water));
    }
    if tariff.pi_sell < 0.0 {
        violations.push(Violation::NegativeSellPrice(tariff.pi_sell));
    }
    if tdp.cost.b <= 0.0 {
        violations.push(Violation::NonConvexCost(tdp.cost.b));
    }
    if tdp.cost.a < 0.0 {
        violations.push(Violation::NegativeLinearCost(tdp.cost.a));
    }
    if tdp.w_min_h < 0.0 || tdp.w_min_h > tdp.w_max_h {
        violations.push(Violation::TdpBoundsInvalid {
            lo: tdp.w_min_h,
            hi: tdp.w_max_h,
        });
    }
    if rodp.w_min_r < 0.0 || rodp.w_min_r > rodp.w_max_r {
        violations.push(Violation::RodpBoundsInvalid {
            lo: rodp.w_min_r,
            hi: rodp.w_max_r,
        });
    }
    if tdp.alpha_h < 0.0 {
        violations.push(Violation::NegativeTdpConversion(tdp.alpha_h));
    }
    if tdp.eta_h <= 0.0 {
        violations.push(Violation::NonPositiveWaterElectricityRatio(tdp.eta_h));
    }
    if rodp.alpha_r <= 0.0 {
        violations.push(Violation::NonPositiveRodpConversion(rodp.alpha_r));
    }
    if config.demand_floor < 0.0 {
        violations.push(Violation::NegativeDemandFloor(config.demand_floor));
    }
    let min_output = tdp.w_min_h + rodp.w_min_r;
    if min_output < config.demand_floor {
        violations.push(Violation::SizingAssumption {
            min_output,
            demand_floor: config.demand_floor,
        });
    }
    // A disabled thermal unit cannot be forced to produce water.
    if tdp.alpha_h == 0.0 && tdp.w_min_h > 0.0 {
        violations.push(Violation::DisabledTdpWithPositiveFloor(tdp.w_min_h));
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations })
    }
}

/// Populate a full operating point from the two water outputs and the
/// renewable generation. Box bounds are deliberately not checked here;
/// feasibility is the caller's concern.
pub fn dispatch_from_waters(
    w_h: f64,
    w_r: f64,
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
    let q_r = w_r / config.rodp.alpha_r;
    Ok(DispatchPoint {
        w_h,
        w_r,
        q_h,
        q_r,
        p_h,
        g,
        z: q_r - q_h - g,
    })
}

/// Water sales revenue: `pi_water · (w_h + w_r)`.
pub fn water_revenue(w_h: f64, w_r: f64, tariff: &Tariff) -> f64 {
    tariff.pi_water * (w_h + w_r)
}

/// Electricity payment as a function of net consumption: `pi_buy·z` when
/// importing (z ≥ 0), `pi_sell·z` when exporting (z < 0). Positive means the
/// plant pays; negative means it is paid. Convex, piecewise linear, with a
/// kink at z = 0 when the two prices differ.
pub fn electricity_payment(z: f64, tariff: &Tariff) -> f64 {
    if z >= 0.0 {
        tariff.pi_buy * z
    } else {
        tariff.pi_sell * z
    }
}

/// Thermal operating cost at the given fuel input.
pub fn tdp_cost(p_h: f64, cost: &CostParams) -> f64 {
    cost.evaluate(p_h)
}

/// Marginal thermal cost `C'(p_h)`.
pub fn marginal_cost(p_h: f64, cost: &CostParams) -> f64 {
    cost.marginal(p_h)
}

/// First-order-condition fuel level for a target marginal `m`, projected
/// onto `[p_min, p_max]`.
pub fn inverse_marginal_cost(m: f64, cost: &CostParams, p_min: f64, p_max: f64) -> f64 {
    cost.inverse_marginal(m, p_min, p_max)
}

/// Plant profit at an operating point: water revenue minus electricity
/// payment minus thermal cost.
pub fn profit(point: &DispatchPoint, config: &PlantConfig, tariff: &Tariff) -> f64 {
    water_revenue(point.w_h, point.w_r, tariff) - electricity_payment(point.z, tariff)
        - tdp_cost(point.p_h, &config.tdp.cost)
}
