//! Co-scheduling engine for a profit-maximizing hybrid water desalination
//! plant: a thermal unit that cogenerates water and electricity, a
//! reverse-osmosis unit that turns electricity into water, and on-site
//! renewables, all facing a water utility and a net-metering electric
//! utility.
//!
//! The optimal hourly dispatch has a two-threshold structure in the measured
//! renewable generation; [`policy`] computes it in closed form, [`oracle`]
//! certifies it against independent solvers, and [`scenario`]/[`sim`] drive
//! Monte Carlo studies over daily generation profiles. The `desal` binary
//! exposes all of it on the command line.

pub mod model;
pub mod oracle;
pub mod policy;
pub mod scenario;
pub mod sim;

pub use model::{
    dispatch_from_waters, electricity_payment, inverse_marginal_cost, marginal_cost, profit,
    tdp_cost, validate_config, water_revenue, ConfigFile, CostParams, DispatchPoint, ModelError,
    PlantConfig, RodpParams, Tariff, TdpParams, ThermalCost, ValidationReport, Violation,
};
pub use oracle::{
    certify_policy, certify_with_thresholds, solve_grid, solve_zonewise, CertSample,
    CertificationReport, OracleError, OracleMethod, OracleSolution,
};
pub use policy::{
    classify_regime, compute_thresholds, foc_water_level, optimal_dispatch, zone_of, Regime,
    ThresholdSet, Zone,
};
pub use scenario::{
    fit_hourly_stats, load_profiles, sample_profiles, scale_profile, HourlyProfile, HourlyStats,
    ScenarioError, HOURS,
};
pub use sim::{run_day, run_monte_carlo, sweep_price, DaySchedule, HourlyQuantiles, McSummary, SweepEntry};
