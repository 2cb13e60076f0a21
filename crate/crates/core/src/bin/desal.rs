//! Command-line front end: thresholds, single-point dispatch, day simulation,
//! Monte Carlo, price sweeps, policy certification, and profile sampling.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid configuration or data,
//! 3 certification failure. Diagnostics go to stderr; data goes to stdout or
//! to files. Every artifact embeds the run manifest: as `#`-prefixed comment
//! lines in CSV, as a leading `manifest` field in JSON.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use desal_core::model::{ConfigFile, PlantConfig, Tariff};
use desal_core::oracle::{certify_policy, CertificationReport};
use desal_core::policy::{compute_thresholds, optimal_dispatch, zone_of};
use desal_core::scenario::{fit_hourly_stats, load_profiles, sample_profiles, HourlyStats};
use desal_core::sim::{run_day, run_monte_carlo, sweep_price};
use desal_core::{profit, DispatchPoint, McSummary, ThresholdSet, Zone};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "desal",
    version,
    about = "Optimal co-scheduling for a hybrid thermal/RO desalination plant with renewables",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TariffOverrides {
    /// Override the water selling price ($/m³) from the config file.
    #[arg(long)]
    pi_water: Option<f64>,
    /// Override the electricity import price ($/kWh).
    #[arg(long)]
    pi_buy: Option<f64>,
    /// Override the electricity export price ($/kWh).
    #[arg(long)]
    pi_sell: Option<f64>,
}

impl TariffOverrides {
    fn apply(&self, tariff: Tariff) -> Tariff {
        Tariff {
            pi_water: self.pi_water.unwrap_or(tariff.pi_water),
            pi_buy: self.pi_buy.unwrap_or(tariff.pi_buy),
            pi_sell: self.pi_sell.unwrap_or(tariff.pi_sell),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the policy threshold set and print it as JSON.
    Thresholds {
        /// Plant + tariff JSON document.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Dispatch a single generation level and print the operating point.
    Dispatch {
        #[arg(long)]
        config: PathBuf,
        /// Renewable generation (kWh).
        #[arg(long)]
        g: f64,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Run one day against a profile CSV and emit the schedule CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Daily profile CSV (`day,h0,...,h23`); the first row is used.
        #[arg(long)]
        profile: PathBuf,
        /// Output directory; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Monte Carlo over sampled daily profiles; summary JSON to stdout.
    Montecarlo {
        #[arg(long)]
        config: PathBuf,
        /// Hourly statistics JSON ({mean, std, median} arrays of 24).
        #[arg(long)]
        stats: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Sweep water prices over one day; one schedule CSV per price.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated water prices ($/m³).
        #[arg(long, value_delimiter = ',', required = true)]
        prices: Vec<f64>,
        #[arg(long)]
        profile: PathBuf,
        /// Output directory for the per-price CSVs.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Certify the closed-form policy against both oracles.
    Certify {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated water prices to certify.
        #[arg(long, value_delimiter = ',', required = true)]
        prices: Vec<f64>,
        /// Largest generation sample (kWh).
        #[arg(long)]
        g_max: f64,
        /// Generation sample step (kWh).
        #[arg(long)]
        g_step: f64,
        /// Profit-gap tolerance ($).
        #[arg(long, allow_negative_numbers = true)]
        tol: f64,
        /// Lattice points per axis for the grid oracle.
        #[arg(long, default_value_t = 800)]
        grid_steps: usize,
        #[command(flatten)]
        overrides: TariffOverrides,
    },
    /// Fit per-hour statistics from a profile CSV; stats JSON to stdout.
    Stats {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Sample daily profiles from hourly statistics into a CSV.
    Sample {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Everything needed to reproduce a run, recorded into every artifact.
#[derive(Serialize, Clone)]
struct RunManifest {
    tool: String,
    subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi_water: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi_buy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi_sell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prices: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
}

impl RunManifest {
    fn new(subcommand: &str) -> Self {
        RunManifest {
            tool: format!("desal {VERSION}"),
            subcommand: subcommand.to_string(),
            config: None,
            profile: None,
            stats: None,
            pi_water: None,
            pi_buy: None,
            pi_sell: None,
            prices: None,
            g: None,
            g_max: None,
            g_step: None,
            tol: None,
            grid_steps: None,
            runs: None,
            seed: None,
            out: None,
        }
    }

    fn with_overrides(mut self, overrides: &TariffOverrides) -> Self {
        self.pi_water = overrides.pi_water;
        self.pi_buy = overrides.pi_buy;
        self.pi_sell = overrides.pi_sell;
        self
    }

    fn config(mut self, path: &Path) -> Self {
        self.config = Some(path.display().to_string());
        self
    }

    /// `#`-prefixed comment lines for CSV artifacts.
    fn csv_header(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut out = String::new();
        for (key, field) in value.as_object().expect("manifest is an object") {
            let rendered = match field {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "# {key}: {rendered}");
        }
        out
    }
}

/// JSON artifact wrapper: the manifest leads, the payload follows.
fn json_artifact<T: Serialize>(manifest: &RunManifest, key: &str, payload: &T) -> String {
    let mut root = serde_json::Map::new();
    root.insert(
        "manifest".to_string(),
        serde_json::to_value(manifest).expect("manifest serializes"),
    );
    root.insert(
        key.to_string(),
        serde_json::to_value(payload).expect("payload serializes"),
    );
    serde_json::to_string_pretty(&serde_json::Value::Object(root)).expect("artifact serializes")
}

enum CliError {
    /// Invalid configuration or data: exit 2.
    Data(String),
    /// Certification failure: exit 3.
    CertifyFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Data(_) => 2,
            CliError::CertifyFailed => 3,
        }
    }
}

fn data_err<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{context}: {e}"))
}

fn load_case(path: &Path, overrides: &TariffOverrides) -> Result<(PlantConfig, Tariff), CliError> {
    let text = fs::read_to_string(path)
        .map_err(data_err(&format!("cannot read config {}", path.display())))?;
    let file = ConfigFile::from_json(&text)
        .map_err(data_err(&format!("invalid config {}", path.display())))?;
    let tariff = overrides.apply(file.tariff);
    // Overrides can invalidate an otherwise valid document.
    desal_core::validate_config(&file.plant, &tariff)
        .map_err(data_err("overridden tariff is invalid"))?;
    Ok((file.plant, tariff))
}

fn load_first_profile(path: &Path) -> Result<desal_core::HourlyProfile, CliError> {
    let file = fs::File::open(path)
        .map_err(data_err(&format!("cannot open profile {}", path.display())))?;
    let profiles = load_profiles(BufReader::new(file))
        .map_err(data_err(&format!("invalid profile CSV {}", path.display())))?;
    profiles
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Data(format!("profile CSV {} has no data rows", path.display())))
}

fn load_stats(path: &Path) -> Result<HourlyStats, CliError> {
    let text = fs::read_to_string(path)
        .map_err(data_err(&format!("cannot read stats {}", path.display())))?;
    HourlyStats::from_json(&text).map_err(data_err(&format!("invalid stats {}", path.display())))
}

fn write_artifact(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(data_err(&format!("cannot create {}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(data_err(&format!("cannot write {}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct DispatchArtifact {
    point: DispatchPoint,
    profit: f64,
    zone: Zone,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Thresholds { config, overrides } => {
            let manifest = RunManifest::new("thresholds")
                .with_overrides(&overrides)
                .config(&config);
            let (plant, tariff) = load_case(&config, &overrides)?;
            let thresholds: ThresholdSet =
                compute_thresholds(&plant, &tariff).map_err(data_err("cannot compute thresholds"))?;
            println!("{}", json_artifact(&manifest, "thresholds", &thresholds));
        }
        Command::Dispatch {
            config,
            g,
            overrides,
        } => {
            let mut manifest = RunManifest::new("dispatch")
                .with_overrides(&overrides)
                .config(&config);
            manifest.g = Some(g);
            if g < 0.0 || !g.is_finite() {
                return Err(CliError::Data(format!(
                    "--g must be finite and nonnegative, got {g}"
                )));
            }
            let (plant, tariff) = load_case(&config, &overrides)?;
            let thresholds =
                compute_thresholds(&plant, &tariff).map_err(data_err("cannot compute thresholds"))?;
            let point = optimal_dispatch(g, &thresholds, &plant)
                .map_err(data_err("cannot dispatch"))?;
            let artifact = DispatchArtifact {
                point,
                profit: profit(&point, &plant, &tariff),
                zone: zone_of(g, &thresholds),
            };
            println!("{}", json_artifact(&manifest, "dispatch", &artifact));
        }
        Command::Simulate {
            config,
            profile,
            out,
            overrides,
        } => {
            let mut manifest = RunManifest::new("simulate")
                .with_overrides(&overrides)
                .config(&config);
            manifest.profile = Some(profile.display().to_string());
            manifest.out = out.as_ref().map(|p| p.display().to_string());
            let (plant, tariff) = load_case(&config, &overrides)?;
            let thresholds =
                compute_thresholds(&plant, &tariff).map_err(data_err("cannot compute thresholds"))?;
            let day_profile = load_first_profile(&profile)?;
            let schedule = run_day(&day_profile, &thresholds, &plant, &tariff)
                .map_err(data_err("cannot simulate"))?;
            let mut csv = manifest.csv_header();
            let _ = writeln!(csv, "# total_profit: {}", schedule.total_profit);
            csv.push_str(&schedule.to_csv_rows());
            match out {
                Some(dir) => write_artifact(&dir.join("schedule.csv"), &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Montecarlo {
            config,
            stats,
            runs,
            seed,
            overrides,
        } => {
            let mut manifest = RunManifest::new("montecarlo")
                .with_overrides(&overrides)
                .config(&config);
            manifest.stats = Some(stats.display().to_string());
            manifest.runs = Some(runs);
            manifest.seed = Some(seed);
            let (plant, tariff) = load_case(&config, &overrides)?;
            let hourly = load_stats(&stats)?;
            if runs == 0 {
                return Err(CliError::Data("--runs must be at least 1".into()));
            }
            let summary: McSummary = run_monte_carlo(&hourly, runs, seed, &plant, &tariff)
                .map_err(data_err("cannot run Monte Carlo"))?;
            println!("{}", json_artifact(&manifest, "mc_summary", &summary));
        }
        Command::Sweep {
            config,
            prices,
            profile,
            out,
            overrides,
        } => {
            let mut manifest = RunManifest::new("sweep")
                .with_overrides(&overrides)
                .config(&config);
            manifest.profile = Some(profile.display().to_string());
            manifest.prices = Some(prices.clone());
            manifest.out = Some(out.display().to_string());
            let (plant, tariff) = load_case(&config, &overrides)?;
            let day_profile = load_first_profile(&profile)?;
            let entries = sweep_price(&prices, &day_profile, &plant, &tariff)
                .map_err(data_err("cannot sweep"))?;
            for entry in &entries {
                let mut per_price = manifest.clone();
                per_price.pi_water = Some(entry.pi_water);
                let mut csv = per_price.csv_header();
                let _ = writeln!(csv, "# regime: {}", entry.thresholds.regime);
                let _ = writeln!(csv, "# total_profit: {}", entry.schedule.total_profit);
                csv.push_str(&entry.schedule.to_csv_rows());
                write_artifact(&out.join(format!("sweep_pw_{}.csv", entry.pi_water)), &csv)?;
            }
        }
        Command::Certify {
            config,
            prices,
            g_max,
            g_step,
            tol,
            grid_steps,
            overrides,
        } => {
            let mut manifest = RunManifest::new("certify")
                .with_overrides(&overrides)
                .config(&config);
            manifest.prices = Some(prices.clone());
            manifest.g_max = Some(g_max);
            manifest.g_step = Some(g_step);
            manifest.tol = Some(tol);
            manifest.grid_steps = Some(grid_steps);
            if g_step <= 0.0 || g_step.is_nan() || g_max < 0.0 || g_max.is_nan() {
                return Err(CliError::Data(
                    "--g-step must be positive and --g-max nonnegative".into(),
                ));
            }
            let (plant, tariff) = load_case(&config, &overrides)?;
            let mut g_samples = Vec::new();
            let mut g = 0.0;
            while g <= g_max {
                g_samples.push(g);
                g += g_step;
            }
            #[derive(Serialize)]
            struct PriceReport {
                pi_water: f64,
                report: CertificationReport,
            }
            let mut reports = Vec::new();
            let mut all_pass = true;
            for &pi_water in &prices {
                let price_tariff = Tariff { pi_water, ..tariff };
                let report =
                    certify_policy(&plant, &price_tariff, &g_samples, tol, grid_steps);
                eprintln!(
                    "pi_water={pi_water}: {} (worst gap {} at g={})",
                    report.status, report.worst_gap, report.worst_g
                );
                all_pass &= report.pass;
                reports.push(PriceReport { pi_water, report });
            }
            println!("{}", json_artifact(&manifest, "certification", &reports));
            if !all_pass {
                return Err(CliError::CertifyFailed);
            }
        }
        Command::Stats { profile } => {
            let mut manifest = RunManifest::new("stats");
            manifest.profile = Some(profile.display().to_string());
            let file = fs::File::open(&profile)
                .map_err(data_err(&format!("cannot open profile {}", profile.display())))?;
            let profiles = load_profiles(BufReader::new(file))
                .map_err(data_err(&format!("invalid profile CSV {}", profile.display())))?;
            let stats = fit_hourly_stats(&profiles).map_err(data_err("cannot fit statistics"))?;
            println!("{}", json_artifact(&manifest, "stats", &stats));
        }
        Command::Sample {
            stats,
            runs,
            seed,
            out,
        } => {
            let mut manifest = RunManifest::new("sample");
            manifest.stats = Some(stats.display().to_string());
            manifest.runs = Some(runs);
            manifest.seed = Some(seed);
            manifest.out = Some(out.display().to_string());
            if runs == 0 {
                return Err(CliError::Data("--runs must be at least 1".into()));
            }
            let hourly = load_stats(&stats)?;
            let samples = sample_profiles(&hourly, runs, seed);
            let mut csv = manifest.csv_header();
            csv.push_str("day");
            for h in 0..desal_core::HOURS {
                let _ = write!(csv, ",h{h}");
            }
            csv.push('\n');
            for (day, profile) in samples.iter().enumerate() {
                let _ = write!(csv, "{}", day + 1);
                for value in profile.values() {
                    let _ = write!(csv, ",{value}");
                }
                csv.push('\n');
            }
            write_artifact(&out, &csv)?;
        }
    }
    Ok(())
}

impl RunManifest {
    fn config(mut self, path: &Path) -> Self {
        self.config = Some(path.display().to_string());
        self
    }
}

fn main() -> ExitCode {
    // Map clap's usage failures to exit 1, keeping help/version on 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let help_or_version = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if help_or_version {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Data(message) = &e {
                eprintln!("error: {message}");
            } else {
                eprintln!("error: certification failed");
            }
            ExitCode::from(e.code())
        }
    }
}
