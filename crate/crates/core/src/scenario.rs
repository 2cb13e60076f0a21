//! Renewable-generation data handling: hourly CSV ingestion, per-hour
//! statistics, scaling, and seeded Monte Carlo sampling of daily profiles.
//!
//! Sampling draws each hour independently from a normal with that hour's
//! fitted mean and standard deviation, truncating negative draws to zero.
//! The generator is ChaCha8 keyed per profile through a SplitMix64 step, so
//! sample sets are a pure function of `(seed, n)` regardless of how the work
//! is partitioned across threads.

use std::io::BufRead;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS: usize = 24;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("missing or malformed header: expected `day,h0,...,h23`")]
    BadHeader,
    #[error("row {row}: expected {expected} columns, got {got}")]
    ColumnCount {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column}: negative generation {value}")]
    NegativeCell {
        row: usize,
        column: String,
        value: f64,
    },
    #[error("hour {hour}: negative generation {value}")]
    NegativeValue { hour: usize, value: f64 },
    #[error("need at least 2 profiles to fit hourly statistics, got {0}")]
    InsufficientData(usize),
    #[error("hourly statistics invalid: {0}")]
    BadStats(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("failed to parse stats JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// One day of hourly generation (kWh), hours 0–23, all values nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; HOURS]", into = "[f64; HOURS]")]
pub struct HourlyProfile {
    values: [f64; HOURS],
}

impl HourlyProfile {
    pub fn new(values: [f64; HOURS]) -> Result<Self, ScenarioError> {
        for (hour, &value) in values.iter().enumerate() {
            if value < 0.0 || value.is_nan() {
                return Err(ScenarioError::NegativeValue { hour, value });
            }
        }
        Ok(Self { values })
    }

    pub fn zero() -> Self {
        Self {
            values: [0.0; HOURS],
        }
    }

    pub fn values(&self) -> &[f64; HOURS] {
        &self.values
    }

    pub fn get(&self, hour: usize) -> f64 {
        self.values[hour]
    }
}

impl TryFrom<[f64; HOURS]> for HourlyProfile {
    type Error = ScenarioError;
    fn try_from(values: [f64; HOURS]) -> Result<Self, Self::Error> {
        HourlyProfile::new(values)
    }
}

impl From<HourlyProfile> for [f64; HOURS] {
    fn from(profile: HourlyProfile) -> Self {
        profile.values
    }
}

/// Per-hour distribution parameters fitted from historical profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyStats {
    pub mean: [f64; HOURS],
    pub std: [f64; HOURS],
    pub median: [f64; HOURS],
}

impl HourlyStats {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        for hour in 0..HOURS {
            if !self.std[hour].is_finite() || self.std[hour] < 0.0 {
                return Err(ScenarioError::BadStats(format!(
                    "std[{hour}] = {} must be finite and nonnegative",
                    self.std[hour]
                )));
            }
            if !self.mean[hour].is_finite() {
                return Err(ScenarioError::BadStats(format!(
                    "mean[{hour}] is not finite"
                )));
            }
        }
        Ok(())
    }

    /// Accepts both the bare `{mean, std, median}` document and an artifact
    /// wrapped as `{"manifest": ..., "stats": {...}}`.
    pub fn from_json(json: &str) -> Result<Self, ScenarioError> {
        #[derive(Deserialize)]
        struct Wrapped {
            stats: HourlyStats,
        }
        let stats = match serde_json::from_str::<HourlyStats>(json) {
            Ok(stats) => stats,
            Err(_) => serde_json::from_str::<Wrapped>(json)?.stats,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

fn expected_header() -> String {
    let mut header = String::from("day");
    for h in 0..HOURS {
        header.push_str(&format!(",h{h}"));
    }
    header
}

/// Load daily profiles from CSV with header `day,h0,...,h23`. Lines starting
/// with `#` and blank lines are skipped; negative cells are rejected with
/// their row and column.
pub fn load_profiles<R: BufRead>(reader: R) -> Result<Vec<HourlyProfile>, ScenarioError> {
    let mut profiles = Vec::new();
    let mut saw_header = false;
    let mut row = 0usize;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !saw_header {
            if trimmed.replace(' ', "") != expected_header() {
                return Err(ScenarioError::BadHeader);
            }
            saw_header = true;
            continue;
        }
        row += 1;
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != HOURS + 1 {
            return Err(ScenarioError::ColumnCount {
                row,
                expected: HOURS + 1,
                got: fields.len(),
            });
        }
        let mut values = [0.0; HOURS];
        for (hour, field) in fields[1..].iter().enumerate() {
            let column = format!("h{hour}");
            let value: f64 = field.trim().parse().map_err(|_| ScenarioError::BadCell {
                row,
                column: column.clone(),
                value: field.trim().to_string(),
            })?;
            if value < 0.0 || value.is_nan() {
                return Err(ScenarioError::NegativeCell { row, column, value });
            }
            values[hour] = value;
        }
        profiles.push(HourlyProfile { values });
    }
    if !saw_header {
        return Err(ScenarioError::BadHeader);
    }
    Ok(profiles)
}

/// Per-hour sample mean, sample standard deviation (n − 1 denominator), and
/// median over at least two profiles.
pub fn fit_hourly_stats(profiles: &[HourlyProfile]) -> Result<HourlyStats, ScenarioError> {
    let n = profiles.len();
    if n < 2 {
        return Err(ScenarioError::InsufficientData(n));
    }
    let mut mean = [0.0; HOURS];
    let mut std = [0.0; HOURS];
    let mut median = [0.0; HOURS];
    for hour in 0..HOURS {
        let mut column: Vec<f64> = profiles.iter().map(|p| p.values[hour]).collect();
        let m = column.iter().sum::<f64>() / n as f64;
        let variance = column.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
        column.sort_by(f64::total_cmp);
        let mid = n / 2;
        median[hour] = if n.is_multiple_of(2) {
            0.5 * (column[mid - 1] + column[mid])
        } else {
            column[mid]
        };
        mean[hour] = m;
        std[hour] = variance.sqrt();
    }
    Ok(HourlyStats { mean, std, median })
}

// SplitMix64 step, keyed by profile index, so each profile owns an
// independent, reproducible stream.
fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut x = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Draw `n` daily profiles: each hour independent `Normal(mean[h], std[h]²)`
/// truncated at zero. Hours with zero standard deviation reproduce the mean
/// exactly; an identical seed reproduces the sample set bit for bit.
pub fn sample_profiles(stats: &HourlyStats, n: usize, seed: u64) -> Vec<HourlyProfile> {
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_stream_seed(seed, i as u64));
            let mut values = [0.0; HOURS];
            for (hour, value) in values.iter_mut().enumerate() {
                *value = if stats.std[hour] == 0.0 {
                    stats.mean[hour].max(0.0)
                } else {
                    let normal = Normal::new(stats.mean[hour], stats.std[hour])
                        .expect("validated std is finite and positive");
                    normal.sample(&mut rng).max(0.0)
                };
            }
            HourlyProfile { values }
        })
        .collect()
}

/// Elementwise scaling by a nonnegative factor.
pub fn scale_profile(profile: &HourlyProfile, factor: f64) -> HourlyProfile {
    assert!(factor >= 0.0, "scale factor must be nonnegative");
    let mut values = profile.values;
    for value in &mut values {
        *value *= factor;
    }
    HourlyProfile { values }
}
