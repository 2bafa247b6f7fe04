//! Command dispatch, configuration loading and result files for `ntn-peb`.

pub mod manifest;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ntn_peb::channel::ChannelTables;
use ntn_peb::estimator::{validate, ValidationRequest};
use ntn_peb::scenarios::calibration::{calibrate, calibration_template, Calibration};
use ntn_peb::scenarios::{figure_configs, reproduce_figures, run, CaseResult, ScenarioConfig, Variant};
use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "ntn-peb", version, about = "Position error bounds for satellite positioning scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-LEO RTT over a sweep of measurement times.
    SingleLeo(CommonArgs),
    /// Multi-LEO TDOA, optionally with serving-satellite RTT.
    MultiLeo(CommonArgs),
    /// Two GNSS satellites plus single-LEO RTT, with the three-GNSS baseline.
    GnssLeo(CommonArgs),
    /// Every case of the three studies in one run.
    ReproduceFigures(CommonArgs),
    /// Least-squares estimator trials against the bound for one UE.
    Validate(ValidateArgs),
    /// Grid search for the processing gain and TDOA synchronization error.
    Calibrate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Format of the per-sample and box-plot tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads. Affects speed only.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Variant to validate when no configuration file is given.
    #[arg(long, default_value = "multi-leo")]
    pub variant: String,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    /// Solve exact measurements instead of noisy ones.
    #[arg(long)]
    pub noiseless: bool,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SingleLeo(_) => "single-leo",
            Command::MultiLeo(_) => "multi-leo",
            Command::GnssLeo(_) => "gnss-leo",
            Command::ReproduceFigures(_) => "reproduce-figures",
            Command::Validate(_) => "validate",
            Command::Calibrate(_) => "calibrate",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::SingleLeo(a)
            | Command::MultiLeo(a)
            | Command::GnssLeo(a)
            | Command::ReproduceFigures(a)
            | Command::Calibrate(a) => a,
            Command::Validate(v) => &v.common,
        }
    }
}

/// Reads and validates a JSON configuration file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    ScenarioConfig::from_json_str(&text).with_context(|| format!("config {}", path.display()))
}

fn parse_variant(name: &str) -> Result<Variant> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| anyhow::anyhow!("unknown variant `{name}`"))
}

fn load_config(args: &CommonArgs, fallback: Variant) -> Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(p) => parse_config(p)?,
        None => ScenarioConfig::default_for(fallback),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn load_tables(cfg: &ScenarioConfig) -> Result<ChannelTables> {
    Ok(match &cfg.channel_table_dir {
        Some(dir) => ChannelTables::from_dir(dir)?,
        None => ChannelTables::embedded()?,
    })
}

fn require_variant(cfg: &ScenarioConfig, command: &str, allowed: &[Variant]) -> Result<()> {
    if !allowed.contains(&cfg.variant) {
        bail!("variant: `{command}` cannot run a {} configuration", cfg.variant);
    }
    Ok(())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => bail!("workers: must be >= 1"),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    processing_gain_db: SearchReport,
    tdoa_sync_sigma_m: SearchReport,
}

#[derive(Serialize)]
struct SearchReport {
    best: f64,
    frozen: f64,
    grid: Vec<GridEntry>,
}

#[derive(Serialize)]
struct GridEntry {
    value: f64,
    error: Option<f64>,
}

impl SearchReport {
    fn new(c: &Calibration, frozen: f64) -> Self {
        Self {
            best: c.best,
            frozen,
            grid: c
                .grid
                .iter()
                .map(|p| GridEntry {
                    value: p.value,
                    error: p.error,
                })
                .collect(),
        }
    }
}

/// Runs one command and writes its files. The manifest is written even
/// when the command fails. Returns the process exit status.
pub fn execute(cli: &Cli) -> i32 {
    let common = cli.command.common();
    let mut manifest = RunManifest::start(cli.command.name(), common.workers);
    let result = fs::create_dir_all(&common.out)
        .with_context(|| format!("cannot create output directory {}", common.out.display()))
        .and_then(|_| dispatch(&cli.command, &mut manifest));
    if let Err(e) = result {
        manifest.errors.push(format!("{e:#}"));
    }
    for e in &manifest.errors {
        eprintln!("error: {e}");
    }
    for w in &manifest.channel_tables.warnings {
        eprintln!("warning: {w}");
    }
    if common.out.is_dir() {
        if let Err(e) = manifest.finish_and_write(&common.out) {
            eprintln!("error: {e:#}");
            return 1;
        }
    }
    if manifest.errors.is_empty() {
        0
    } else {
        1
    }
}

fn dispatch(command: &Command, manifest: &mut RunManifest) -> Result<()> {
    let common = command.common();
    match command {
        Command::SingleLeo(a) => {
            let cfg = load_config(a, Variant::SingleLeo)?;
            require_variant(&cfg, command.name(), &[Variant::SingleLeo])?;
            scenario_run(a, manifest, cfg, |cfg, tables| Ok(run(cfg, tables)?.cases))
        }
        Command::MultiLeo(a) => {
            let cfg = load_config(a, Variant::MultiLeo)?;
            require_variant(&cfg, command.name(), &[Variant::MultiLeo])?;
            scenario_run(a, manifest, cfg, |cfg, tables| Ok(run(cfg, tables)?.cases))
        }
        Command::GnssLeo(a) => {
            let cfg = load_config(a, Variant::GnssLeo)?;
            require_variant(&cfg, command.name(), &[Variant::GnssLeo, Variant::GnssOnly])?;
            let baseline = ScenarioConfig {
                variant: Variant::GnssOnly,
                ..cfg.clone()
            };
            manifest.case_configs = vec![cfg.clone(), baseline.clone()];
            scenario_run(a, manifest, cfg, move |cfg, tables| {
                let mut cases = Vec::new();
                if cfg.variant == Variant::GnssLeo {
                    cases.extend(run(cfg, tables)?.cases);
                }
                cases.extend(run(&baseline, tables)?.cases);
                Ok(cases)
            })
        }
        Command::ReproduceFigures(a) => {
            let cfg = load_config(a, Variant::SingleLeo)?;
            manifest.case_configs = figure_configs(&cfg);
            scenario_run(a, manifest, cfg, |cfg, tables| Ok(reproduce_figures(cfg, tables)?))
        }
        Command::Validate(v) => {
            let fallback = parse_variant(&v.variant)?;
            let cfg = load_config(&v.common, fallback)?;
            let tables = load_tables(&cfg)?;
            manifest.record_config(&cfg, &tables);
            let req = ValidationRequest {
                trials: v.trials,
                seed: cfg.seed,
                noiseless: v.noiseless,
                ..Default::default()
            };
            let report = in_pool(common.workers, || validate(&cfg, &tables, &req))??;
            manifest.write_json(&common.out, "validation.json", &report)?;
            Ok(())
        }
        Command::Calibrate(a) => {
            if a.config.is_some() {
                bail!("config: calibration runs on the fixed template; only --seed may be changed");
            }
            let mut cfg = calibration_template();
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            let tables = load_tables(&cfg)?;
            manifest.record_config(&cfg, &tables);
            let (gain, sync) = in_pool(common.workers, || calibrate(&cfg, &tables))??;
            let report = CalibrationReport {
                processing_gain_db: SearchReport::new(
                    &gain,
                    ntn_peb::scenarios::calibration::CALIBRATED_PROCESSING_GAIN_DB,
                ),
                tdoa_sync_sigma_m: SearchReport::new(
                    &sync,
                    ntn_peb::scenarios::calibration::CALIBRATED_TDOA_SYNC_SIGMA_M,
                ),
            };
            manifest.write_json(&common.out, "calibration.json", &report)?;
            Ok(())
        }
    }
}

fn scenario_run<F>(args: &CommonArgs, manifest: &mut RunManifest, cfg: ScenarioConfig, body: F) -> Result<()>
where
    F: FnOnce(&ScenarioConfig, &ChannelTables) -> Result<Vec<CaseResult>> + Send,
{
    let tables = load_tables(&cfg)?;
    manifest.record_config(&cfg, &tables);
    let cases = in_pool(args.workers, || body(&cfg, &tables))??;
    output::write_results(&args.out, args.format, &cases, manifest)?;
    Ok(())
}
