//! Command-line front door: `anchorlife <analyze|fit|predict|evaluate|synth>`.
//!
//! Every command is deterministic given its inputs and the seed; reruns
//! produce byte-identical JSON, CSV, and SVG outputs. Exit codes: 0
//! success, 1 data or validation error, 2 numerical no-solution, 64
//! usage.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ingest::{self, IngestError};
use crate::kinetics::{self, KineticsError, SpecimenKinetics};
use crate::lifetime::{
    self, EvaluationReport, LifetimeError, MGDataPoint, MGDirection, MGFit, MGVariant,
    ResampleCase,
};
use crate::plot::{self, ChartSpec, Series};
use crate::regress::{sample_params, IntervalKind};
use crate::stressrate::{
    self, BondArea, PowerLawFit, RateUnit, SinhFit, StressAxis, StressRateError, StressRateFit,
    StressRatePoint,
};
use crate::synth::{self, SynthError};
use crate::ttf::{self, TtfError, SECONDS_PER_50_YEARS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<LifetimeError> for CliError {
    fn from(e: LifetimeError) -> Self {
        match e {
            LifetimeError::ZeroSlope => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<StressRateError> for CliError {
    fn from(e: StressRateError) -> Self {
        match e {
            StressRateError::BelowThresholdStress { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<TtfError> for CliError {
    fn from(e: TtfError) -> Self {
        match e {
            TtfError::NoRoot { .. } | TtfError::NonDecreasingCurve { .. } => {
                CliError::Numeric(e.to_string())
            }
            TtfError::StressesNotAscending | TtfError::TooFewDraws { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

/// Values every command shares; flags override the config file, the file
/// overrides built-in defaults.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub n_draws: usize,
    pub window_halfwidth: usize,
    pub level: f64,
    pub bond_area: BondArea,
    pub interval: IntervalKind,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            n_draws: 10_000,
            window_halfwidth: kinetics::DEFAULT_WINDOW_HALFWIDTH,
            level: 0.95,
            bond_area: BondArea::AsPrinted,
            interval: IntervalKind::Prediction,
            out_dir: PathBuf::from("."),
        }
    }
}

/// Config-file schema. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    n_draws: Option<usize>,
    window_halfwidth: Option<usize>,
    level: Option<f64>,
    bond_area: Option<BondArea>,
    interval: Option<IntervalKind>,
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random draw
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo draws for uncertainty bands
    #[arg(long, global = true)]
    n_draws: Option<usize>,
    /// Moving-window halfwidth for rate estimation
    #[arg(long, global = true)]
    window_halfwidth: Option<usize>,
    /// Confidence level for intervals
    #[arg(long, global = true)]
    level: Option<f64>,
    /// Bond stress area: as_printed (pi r^2 h_ef) or lateral_surface
    #[arg(long, global = true, value_parser = parse_bond_area)]
    bond_area: Option<BondArea>,
    /// Band type: prediction or mean_confidence
    #[arg(long, global = true, value_parser = parse_interval)]
    interval: Option<IntervalKind>,
}

fn parse_bond_area(s: &str) -> Result<BondArea, String> {
    match s {
        "as_printed" => Ok(BondArea::AsPrinted),
        "lateral_surface" => Ok(BondArea::LateralSurface),
        _ => Err(format!("unknown bond area `{s}`")),
    }
}

fn parse_interval(s: &str) -> Result<IntervalKind, String> {
    match s {
        "prediction" => Ok(IntervalKind::Prediction),
        "mean_confidence" => Ok(IntervalKind::MeanConfidence),
        _ => Err(format!("unknown interval kind `{s}`")),
    }
}

fn parse_variant(s: &str) -> Result<MGVariant, String> {
    match s {
        "displacement" => Ok(MGVariant::Displacement),
        "strain" => Ok(MGVariant::Strain),
        "modified" => Ok(MGVariant::Modified),
        _ => Err(format!("unknown variant `{s}`")),
    }
}

impl GlobalOpts {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let file: FileConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
            if let Some(v) = file.seed {
                cfg.seed = v;
            }
            if let Some(v) = file.n_draws {
                cfg.n_draws = v;
            }
            if let Some(v) = file.window_halfwidth {
                cfg.window_halfwidth = v;
            }
            if let Some(v) = file.level {
                cfg.level = v;
            }
            if let Some(v) = file.bond_area {
                cfg.bond_area = v;
            }
            if let Some(v) = file.interval {
                cfg.interval = v;
            }
            if let Some(v) = file.out_dir {
                cfg.out_dir = v;
            }
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.n_draws {
            cfg.n_draws = v;
        }
        if let Some(v) = self.window_halfwidth {
            cfg.window_halfwidth = v;
        }
        if let Some(v) = self.level {
            cfg.level = v;
        }
        if let Some(v) = self.bond_area {
            cfg.bond_area = v;
        }
        if let Some(v) = self.interval {
            cfg.interval = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if !(cfg.level > 0.0 && cfg.level < 1.0) {
            return Err(CliError::Usage(format!(
                "confidence level must lie in (0, 1), got {}",
                cfg.level
            )));
        }
        if cfg.window_halfwidth == 0 {
            return Err(CliError::Usage("window halfwidth must be at least 1".into()));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "anchorlife",
    about = "Creep lifetime analysis for adhesive anchors under sustained load",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract per-specimen creep kinetics from a campaign manifest
    Analyze {
        /// Campaign manifest JSON
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Fit the Monkman-Grant criterion and a stress-rate law
    Fit {
        /// kinetics.json written by `analyze`
        #[arg(long)]
        kinetics: PathBuf,
        /// MG variant: displacement, strain, or modified
        #[arg(long, default_value = "strain", value_parser = parse_variant)]
        variant: MGVariant,
        /// Stress-rate law: power, sinh, or both
        #[arg(long, default_value = "sinh")]
        law: String,
        /// Stress axis: stress (MPa) or level (fraction of pull-out)
        #[arg(long, default_value = "stress")]
        axis: String,
        /// Exclude stress-rate points at or above this load level
        #[arg(long)]
        exclude_load_ge: Option<f64>,
        /// Regress ln t_f on ln rate instead of the criterion orientation
        #[arg(long)]
        direct: bool,
    },
    /// Compose fits into a TTF curve; optionally solve a target life
    Predict {
        /// mg_fit.json from `fit`
        #[arg(long)]
        mg: PathBuf,
        /// stress-rate fit JSON from `fit`
        #[arg(long)]
        sr: PathBuf,
        /// Explicit comma-separated stress grid
        #[arg(long)]
        stresses: Option<String>,
        #[arg(long)]
        stress_min: Option<f64>,
        #[arg(long)]
        stress_max: Option<f64>,
        #[arg(long, default_value_t = 40)]
        stress_count: usize,
        /// Target service life in years (365.25-day years)
        #[arg(long)]
        target_life_years: Option<f64>,
        /// Target service life in seconds
        #[arg(long)]
        target_life_s: Option<f64>,
        /// Short-term pull-out stress, same axis as the fits
        #[arg(long)]
        pullout_stress: Option<f64>,
        /// Failure strain assumed when predicting with a modified MG fit
        #[arg(long)]
        assumed_failure_strain: Option<f64>,
    },
    /// Score prediction quality: resampling cases or external holdout
    Evaluate {
        /// kinetics.json of the dataset to resample or score
        #[arg(long)]
        kinetics: PathBuf,
        /// full, i (drop middle rates), ii (drop highest), iii (drop lowest)
        #[arg(long)]
        case: String,
        #[arg(long, default_value = "strain", value_parser = parse_variant)]
        variant: MGVariant,
        /// Pre-built MG fit; required for case `full`
        #[arg(long)]
        mg: Option<PathBuf>,
    },
    /// Generate a synthetic campaign with ground truth
    Synth {
        /// Campaign parameter JSON
        #[arg(long)]
        params: PathBuf,
    },
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let config = match cli.global.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Analyze { manifest } => cmd_analyze(manifest, &config),
        Command::Fit {
            kinetics,
            variant,
            law,
            axis,
            exclude_load_ge,
            direct,
        } => cmd_fit(kinetics, *variant, law, axis, *exclude_load_ge, *direct, &config),
        Command::Predict {
            mg,
            sr,
            stresses,
            stress_min,
            stress_max,
            stress_count,
            target_life_years,
            target_life_s,
            pullout_stress,
            assumed_failure_strain,
        } => cmd_predict(
            mg,
            sr,
            stresses.as_deref(),
            *stress_min,
            *stress_max,
            *stress_count,
            *target_life_years,
            *target_life_s,
            *pullout_stress,
            *assumed_failure_strain,
            &config,
        ),
        Command::Evaluate {
            kinetics,
            case,
            variant,
            mg,
        } => cmd_evaluate(kinetics, case, *variant, mg.as_deref(), &config),
        Command::Synth { params } => cmd_synth(params, &config),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// analyze

/// Everything `fit` and `evaluate` need, self-contained.
#[derive(Debug, Serialize, Deserialize)]
pub struct KineticsReport {
    pub bond_area: BondArea,
    pub window_halfwidth: usize,
    pub specimens: Vec<SpecimenRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecimenRecord {
    pub specimen_id: String,
    pub adhesive_id: String,
    pub failed: bool,
    pub load_level: f64,
    pub stress_mpa: f64,
    pub embedment_depth_mm: f64,
    pub temperature_c: f64,
    /// delta_f / h_ef, when the record carries a failure displacement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_strain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetics: Option<SpecimenKinetics>,
    /// Stabilized late-time rates for still-running specimens: the OLS
    /// displacement slope over the last half of the record, a
    /// conservative proxy for the eventual minimum creep rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilized_rate_disp_mm_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilized_rate_strain_per_s: Option<f64>,
}

fn stabilized_rate(series: &ingest::DisplacementSeries) -> Result<f64, KineticsError> {
    let n = series.len();
    let tail = &series.samples[n / 2..];
    if tail.len() < 4 {
        return Err(KineticsError::TooFewSamples {
            found: tail.len(),
            required: 4,
        });
    }
    let t: Vec<f64> = tail.iter().map(|s| s.time_s).collect();
    let d: Vec<f64> = tail.iter().map(|s| s.displacement_mm).collect();
    Ok(crate::regress::ols_fit(&t, &d)?.slope)
}

fn cmd_analyze(manifest: &Path, config: &RunConfig) -> Result<(), CliError> {
    let campaign = ingest::load_campaign(manifest)?;
    let mut specimens = Vec::with_capacity(campaign.len());
    for series in &campaign {
        let id = &series.meta.specimen_id;
        let with_id = |e: KineticsError| CliError::Data(format!("specimen {id}: {e}"));
        let stress_mpa = stressrate::bond_stress(
            series.meta.sustained_load_n,
            series.meta.anchor_radius_mm,
            series.meta.embedment_depth_mm,
            config.bond_area,
        )
        .map_err(|e| CliError::Data(format!("specimen {id}: {e}")))?;

        let rates = kinetics::estimate_rates(series, config.window_halfwidth).map_err(with_id)?;
        let mut csv = String::from("time_s,rate_mm_per_s\n");
        for (t, r) in &rates.samples {
            csv.push_str(&format!("{t},{r}\n"));
        }
        write_text(&config.out_dir.join("rates").join(format!("{id}.csv")), &csv)?;

        let mut record = SpecimenRecord {
            specimen_id: id.clone(),
            adhesive_id: series.meta.adhesive_id.clone(),
            failed: series.failed,
            load_level: series.meta.load_level,
            stress_mpa,
            embedment_depth_mm: series.meta.embedment_depth_mm,
            temperature_c: series.meta.temperature_c,
            failure_strain: series.failure_strain(),
            kinetics: None,
            stabilized_rate_disp_mm_per_s: None,
            stabilized_rate_strain_per_s: None,
        };
        if series.failed {
            record.kinetics =
                Some(kinetics::analyze(series, config.window_halfwidth).map_err(with_id)?);
        } else {
            let rate = stabilized_rate(series).map_err(with_id)?;
            record.stabilized_rate_disp_mm_per_s = Some(rate);
            record.stabilized_rate_strain_per_s = Some(rate / series.meta.embedment_depth_mm);
        }
        specimens.push(record);
    }
    let report = KineticsReport {
        bond_area: config.bond_area,
        window_halfwidth: config.window_halfwidth,
        specimens,
    };
    write_json(&config.out_dir.join("kinetics.json"), &report)
}

// ---------------------------------------------------------------------------
// fit

fn mg_points(report: &KineticsReport, variant: MGVariant) -> Result<Vec<MGDataPoint>, CliError> {
    let mut points = Vec::new();
    for s in &report.specimens {
        let Some(k) = &s.kinetics else { continue };
        let rate = match variant {
            MGVariant::Displacement => k.min_creep_rate_disp,
            MGVariant::Strain | MGVariant::Modified => k.min_creep_rate_strain,
        };
        points.push(MGDataPoint {
            specimen_id: s.specimen_id.clone(),
            min_creep_rate: rate,
            failure_time_s: k.failure_time,
            failure_strain: s.failure_strain,
        });
    }
    if points.len() < 3 {
        return Err(CliError::Data(format!(
            "need at least 3 failed specimens with kinetics, found {}",
            points.len()
        )));
    }
    Ok(points)
}

fn stress_rate_points(
    report: &KineticsReport,
    axis: StressAxis,
    rate_unit: RateUnit,
    exclude_load_ge: Option<f64>,
) -> Vec<StressRatePoint> {
    report
        .specimens
        .iter()
        .filter(|s| exclude_load_ge.map_or(true, |cap| s.load_level < cap))
        .filter_map(|s| {
            let rate = match (&s.kinetics, rate_unit) {
                (Some(k), RateUnit::DispMmPerS) => Some(k.min_creep_rate_disp),
                (Some(k), RateUnit::StrainPerS) => Some(k.min_creep_rate_strain),
                (None, RateUnit::DispMmPerS) => s.stabilized_rate_disp_mm_per_s,
                (None, RateUnit::StrainPerS) => s.stabilized_rate_strain_per_s,
            }?;
            let stress = match axis {
                StressAxis::AbsoluteMpa => s.stress_mpa,
                StressAxis::LoadLevel => s.load_level,
            };
            Some(StressRatePoint {
                stress,
                min_creep_rate: rate,
                failed: s.failed,
            })
        })
        .collect()
}

fn rate_axis_label(unit: RateUnit) -> &'static str {
    match unit {
        RateUnit::StrainPerS => "minimum creep rate [1/s]",
        RateUnit::DispMmPerS => "minimum displacement rate [mm/s]",
    }
}

fn stress_axis_label(axis: StressAxis) -> &'static str {
    match axis {
        StressAxis::AbsoluteMpa => "bond stress [MPa]",
        StressAxis::LoadLevel => "load level [-]",
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn mg_plot(fit: &MGFit, points: &[MGDataPoint], config: &RunConfig) -> ChartSpec {
    let scatter: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let t = match fit.variant {
                MGVariant::Modified => p.failure_time_s / p.failure_strain.unwrap_or(1.0),
                _ => p.failure_time_s,
            };
            (t, p.min_creep_rate)
        })
        .collect();
    let (t_min, t_max) = scatter
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    let grid = log_grid(t_min / 10.0, t_max * 10.0, 140);
    let mut line = Vec::with_capacity(grid.len());
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    for &t in &grid {
        let x = t.ln();
        line.push((t, fit.fit.predict(x).exp()));
        if let Ok((lo, hi)) =
            crate::regress::prediction_interval(&fit.fit, x, config.level, config.interval)
        {
            lower.push((t, lo.exp()));
            upper.push((t, hi.exp()));
        }
    }
    let kind_label = match config.interval {
        IntervalKind::Prediction => "prediction",
        IntervalKind::MeanConfidence => "mean confidence",
    };
    let t_label = match fit.variant {
        MGVariant::Modified => "normalized failure time t_f / strain [s]",
        _ => "failure time t_f [s]",
    };
    let rate_label = match fit.variant {
        MGVariant::Displacement => rate_axis_label(RateUnit::DispMmPerS),
        _ => rate_axis_label(RateUnit::StrainPerS),
    };
    ChartSpec {
        title: format!("Monkman-Grant fit ({})", fit.variant),
        x_label: t_label.to_string(),
        y_label: rate_label.to_string(),
        series: vec![
            Series::Band {
                label: format!("{:.0}% {kind_label} band", config.level * 100.0),
                lower,
                upper,
            },
            Series::Line {
                label: "fit".into(),
                points: line,
            },
            Series::Scatter {
                label: "specimens".into(),
                points: scatter,
            },
        ],
    }
}

fn power_plot(
    fit: &PowerLawFit,
    points: &[StressRatePoint],
    config: &RunConfig,
) -> ChartSpec {
    let scatter: Vec<(f64, f64)> = points.iter().map(|p| (p.min_creep_rate, p.stress)).collect();
    let (s_min, s_max) = points
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.stress), hi.max(p.stress))
        });
    let grid = log_grid(s_min / 1.5, s_max * 1.5, 120);
    let mut line = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &tau in &grid {
        let x = tau.ln();
        line.push((fit.fit.predict(x).exp(), tau));
        if let Ok((lo, hi)) =
            crate::regress::prediction_interval(&fit.fit, x, config.level, config.interval)
        {
            lower.push((lo.exp(), tau));
            upper.push((hi.exp(), tau));
        }
    }
    ChartSpec {
        title: format!("Power law fit (m = {:.2})", fit.exponent_m),
        x_label: rate_axis_label(fit.rate_unit).to_string(),
        y_label: stress_axis_label(fit.axis).to_string(),
        series: vec![
            Series::Band {
                label: format!("{:.0}% band", config.level * 100.0),
                lower,
                upper,
            },
            Series::Line {
                label: "fit".into(),
                points: line,
            },
            Series::Scatter {
                label: "specimens".into(),
                points: scatter,
            },
        ],
    }
}

fn sinh_plot(fit: &SinhFit, points: &[StressRatePoint], config: &RunConfig) -> ChartSpec {
    let scatter: Vec<(f64, f64)> = points.iter().map(|p| (p.min_creep_rate, p.stress)).collect();
    let (r_min, r_max) = points
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.min_creep_rate), hi.max(p.min_creep_rate))
        });
    let grid = log_grid(r_min / 100.0, r_max * 10.0, 120);
    let line: Vec<(f64, f64)> = grid.iter().map(|&r| (r, fit.stress_at_rate(r))).collect();
    // stress band from draws of the log-space parameters
    let draws = sample_params(&fit.nls.params, &fit.nls.covariance, config.n_draws, config.seed);
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    for &r in &grid {
        let mut stresses: Vec<f64> = draws
            .iter()
            .map(|d| {
                let (tau0, c1, c2) = (d[0].exp(), d[1].exp(), d[2].exp());
                tau0 * (1.0 + c1 * (r / c2).asinh())
            })
            .filter(|v| v.is_finite())
            .collect();
        if stresses.is_empty() {
            continue;
        }
        stresses.sort_unstable_by(|a, b| a.total_cmp(b));
        let idx = |p: f64| -> usize {
            ((p * stresses.len() as f64).ceil() as usize)
                .saturating_sub(1)
                .min(stresses.len() - 1)
        };
        lower.push((r, stresses[idx(0.5 - config.level / 2.0)]));
        upper.push((r, stresses[idx(0.5 + config.level / 2.0)]));
    }
    ChartSpec {
        title: format!("Prandtl-Garofalo fit (tau0 = {:.3})", fit.tau0),
        x_label: rate_axis_label(fit.rate_unit).to_string(),
        y_label: stress_axis_label(fit.axis).to_string(),
        series: vec![
            Series::Band {
                label: format!("{:.0}% band", config.level * 100.0),
                lower,
                upper,
            },
            Series::Line {
                label: "fit".into(),
                points: line,
            },
            Series::Scatter {
                label: "specimens".into(),
                points: scatter,
            },
        ],
    }
}

fn cmd_fit(
    kinetics_path: &Path,
    variant: MGVariant,
    law: &str,
    axis: &str,
    exclude_load_ge: Option<f64>,
    direct: bool,
    config: &RunConfig,
) -> Result<(), CliError> {
    let axis = match axis {
        "stress" => StressAxis::AbsoluteMpa,
        "level" => StressAxis::LoadLevel,
        _ => return Err(CliError::Usage(format!("unknown axis `{axis}`"))),
    };
    let laws: Vec<&str> = match law {
        "power" => vec!["power"],
        "sinh" => vec!["sinh"],
        "both" => vec!["power", "sinh"],
        _ => return Err(CliError::Usage(format!("unknown law `{law}`"))),
    };
    let report: KineticsReport = read_json(kinetics_path)?;

    // Monkman-Grant fit
    let points = mg_points(&report, variant)?;
    let direction = if direct {
        MGDirection::TimeOnRate
    } else {
        MGDirection::RateOnTime
    };
    let mg = lifetime::fit_mg_directed(&points, variant, direction)?;
    if !mg.slope_is_physical() && direction == MGDirection::RateOnTime {
        eprintln!(
            "warning: fitted MG exponent {} is not negative; faster creep should mean shorter life",
            mg.exponent()
        );
    }
    write_json(&config.out_dir.join("mg_fit.json"), &mg)?;
    write_text(
        &config.out_dir.join("mg_fit.svg"),
        &plot::render_log_log(&mg_plot(&mg, &points, config)),
    )?;

    // stress-rate fits use the rate unit the MG variant will compose with
    let rate_unit = match variant {
        MGVariant::Displacement => RateUnit::DispMmPerS,
        _ => RateUnit::StrainPerS,
    };
    let sr_points = stress_rate_points(&report, axis, rate_unit, exclude_load_ge);
    let multiple = laws.len() > 1;
    for kind in laws {
        let (fit, chart) = match kind {
            "power" => {
                let f = stressrate::fit_power_law(&sr_points, axis, rate_unit)?;
                let chart = power_plot(&f, &sr_points, config);
                (StressRateFit::Power(f), chart)
            }
            _ => {
                let f = stressrate::fit_sinh(&sr_points, axis, rate_unit)?;
                if !f.nls.converged {
                    eprintln!("warning: sinh fit did not converge; best-so-far parameters written");
                }
                let chart = sinh_plot(&f, &sr_points, config);
                (StressRateFit::Sinh(f), chart)
            }
        };
        let stem = if multiple {
            format!("stressrate_fit_{kind}")
        } else {
            "stressrate_fit".to_string()
        };
        write_json(&config.out_dir.join(format!("{stem}.json")), &fit)?;
        write_text(
            &config.out_dir.join(format!("{stem}.svg")),
            &plot::render_log_log(&chart),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// predict

fn parse_stress_grid(
    stresses: Option<&str>,
    stress_min: Option<f64>,
    stress_max: Option<f64>,
    stress_count: usize,
) -> Result<Vec<f64>, CliError> {
    if let Some(list) = stresses {
        let mut grid = Vec::new();
        for cell in list.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad stress value `{cell}`")))?;
            grid.push(v);
        }
        return Ok(grid);
    }
    match (stress_min, stress_max) {
        (Some(lo), Some(hi)) if lo > 0.0 && hi > lo && stress_count >= 2 => {
            Ok(log_grid(lo, hi, stress_count))
        }
        _ => Err(CliError::Usage(
            "need --stresses or a valid --stress-min/--stress-max[/--stress-count]".into(),
        )),
    }
}

fn ttf_plot(curve: &ttf::TTFCurve) -> ChartSpec {
    let mean: Vec<(f64, f64)> = curve.samples.iter().map(|s| (s.t_mean_s, s.stress)).collect();
    let lower: Vec<(f64, f64)> = curve.samples.iter().map(|s| (s.t_lo_s, s.stress)).collect();
    let upper: Vec<(f64, f64)> = curve.samples.iter().map(|s| (s.t_hi_s, s.stress)).collect();
    ChartSpec {
        title: format!(
            "Stress vs time to failure ({} law, {} MG)",
            curve.stress_law, curve.mg_variant
        ),
        x_label: "time to failure [s]".into(),
        y_label: stress_axis_label(curve.axis).to_string(),
        series: vec![
            Series::Band {
                label: "95% band".into(),
                lower,
                upper,
            },
            Series::Line {
                label: "mean prediction".into(),
                points: mean,
            },
        ],
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_predict(
    mg_path: &Path,
    sr_path: &Path,
    stresses: Option<&str>,
    stress_min: Option<f64>,
    stress_max: Option<f64>,
    stress_count: usize,
    target_life_years: Option<f64>,
    target_life_s: Option<f64>,
    pullout_stress: Option<f64>,
    assumed_failure_strain: Option<f64>,
    config: &RunConfig,
) -> Result<(), CliError> {
    let mg: MGFit = read_json(mg_path)?;
    let sr: StressRateFit = read_json(sr_path)?;
    let grid = parse_stress_grid(stresses, stress_min, stress_max, stress_count)?;

    let curve = ttf::compose_ttf(&sr, &mg, &grid, config.n_draws, config.seed, assumed_failure_strain)?;
    if !curve.skipped_below_threshold.is_empty() {
        eprintln!(
            "note: {} stresses at or below the sinh threshold were skipped (no creep failure predicted)",
            curve.skipped_below_threshold.len()
        );
    }
    write_text(&config.out_dir.join("ttf_curve.csv"), &curve.to_csv())?;
    write_text(
        &config.out_dir.join("ttf_curve.svg"),
        &plot::render_log_log(&ttf_plot(&curve)),
    )?;

    let target = match (target_life_s, target_life_years) {
        (Some(s), _) => Some(s),
        (None, Some(y)) => Some(y / 50.0 * SECONDS_PER_50_YEARS),
        (None, None) => None,
    };
    if let Some(target) = target {
        let pullout = match (pullout_stress, sr.axis()) {
            (Some(p), _) => p,
            (None, StressAxis::LoadLevel) => 1.0,
            (None, StressAxis::AbsoluteMpa) => {
                return Err(CliError::Usage(
                    "--pullout-stress is required to express strength as a load level on an absolute stress axis"
                        .into(),
                ))
            }
        };
        let strength = ttf::sustained_strength(
            &sr,
            &mg,
            pullout,
            target,
            config.n_draws,
            config.seed,
            assumed_failure_strain,
        )?;
        if strength.below_threshold {
            eprintln!(
                "note: target life exceeds the predicted life at the damage threshold; strength reported as the plateau tau0"
            );
        }
        write_json(&config.out_dir.join("strength.json"), &strength)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Debug, Serialize)]
struct EvaluationOutput {
    case: String,
    variant: MGVariant,
    interval: IntervalKind,
    level: f64,
    fit: MGFit,
    report: EvaluationReport,
}

fn cmd_evaluate(
    kinetics_path: &Path,
    case: &str,
    variant: MGVariant,
    mg_path: Option<&Path>,
    config: &RunConfig,
) -> Result<(), CliError> {
    let resample = match case {
        "full" => {
            if mg_path.is_none() {
                return Err(CliError::Usage(
                    "case `full` scores a pre-built fit; pass --mg".into(),
                ));
            }
            None
        }
        _ => match ResampleCase::parse(case) {
            Some(rc) if mg_path.is_none() => Some(rc),
            Some(_) => {
                return Err(CliError::Usage(
                    "--mg only applies to case `full`; resampling cases refit".into(),
                ))
            }
            None => {
                return Err(CliError::Usage(format!(
                    "unknown case `{case}`; expected full, i, ii, or iii"
                )))
            }
        },
    };
    let report: KineticsReport = read_json(kinetics_path)?;
    let points = mg_points(&report, variant)?;

    let (fit, holdout) = match resample {
        None => {
            let fit: MGFit = read_json(mg_path.expect("checked"))?;
            (fit, points)
        }
        Some(rc) => {
            let split = lifetime::resample_case(&points, rc)?;
            let fit = lifetime::fit_mg(&split.retained, variant)?;
            (fit, split.excluded)
        }
    };
    let scores = lifetime::score_prediction(&fit, &holdout, config.level, config.interval)?;
    let out = EvaluationOutput {
        case: case.to_string(),
        variant,
        interval: config.interval,
        level: config.level,
        fit,
        report: scores,
    };
    write_json(&config.out_dir.join(format!("eval_{case}.json")), &out)
}

// ---------------------------------------------------------------------------
// synth

fn cmd_synth(params: &Path, config: &RunConfig) -> Result<(), CliError> {
    let spec: synth::CampaignSpec = read_json(params)?;
    let (series, truths) = synth::generate_campaign(&spec)?;
    ingest::write_campaign(&config.out_dir, &series)?;
    write_json(&config.out_dir.join("ground_truth.json"), &truths)?;
    Ok(())
}
