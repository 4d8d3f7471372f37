//! Run orchestration behind the command-line tool: load a config (file or
//! embedded preset), apply overrides, execute every scenario/metric pair,
//! and write the CSVs plus optional plot scripts.
//!
//! On any failure the files already written by the run are removed, so a
//! nonzero exit never leaves partial outputs behind.

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

use crate::analytic::{
    abep_ue1, ergodic_capacity_ue1, outage_ue1, outage_ue2, union_bound_ue2, AnalyticError,
};
use crate::config::{self, ConfigError, MetricKind, ParsedConfig};
use crate::modem::ConstellationSpec;
use crate::montecarlo::{run_ber, run_outage, run_sum_rate, Scenario, Scheme, SimError};
use crate::report::{self, PlotEntry};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Validation(#[from] ConfigError),
    #[error("config `{0}` is neither a readable file nor a known preset")]
    MissingConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Process exit code: 1 for validation failures, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) | RunError::MissingConfig(_) => 1,
            _ => 2,
        }
    }
}

/// Where the config text comes from: a preset name or a file path.
#[derive(Debug, Clone)]
pub enum ConfigSource {
    Preset(String),
    Path(PathBuf),
}

impl ConfigSource {
    /// Treats the argument as a path if such a file exists, otherwise as a
    /// preset name.
    pub fn from_arg(arg: &str) -> Self {
        let path = PathBuf::from(arg);
        if path.is_file() {
            ConfigSource::Path(path)
        } else {
            ConfigSource::Preset(arg.to_string())
        }
    }

    pub fn load(&self) -> Result<String, RunError> {
        match self {
            ConfigSource::Preset(name) => config::preset_text(name)
                .map(str::to_owned)
                .ok_or_else(|| RunError::MissingConfig(name.clone())),
            ConfigSource::Path(path) => fs::read_to_string(path)
                .map_err(|_| RunError::MissingConfig(path.display().to_string())),
        }
    }
}

/// A full run request: config source, output directory, and overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ConfigSource,
    pub out_dir: PathBuf,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub snr_db: Option<Vec<f64>>,
    pub emit_plots: bool,
}

/// Files produced by a successful run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub files: Vec<PathBuf>,
}

/// Loads and validates a config with overrides applied; shared by `run` and
/// the `validate` subcommand.
pub fn load_config(rc: &RunConfig) -> Result<ParsedConfig, RunError> {
    let text = rc.source.load()?;
    let mut doc = config::parse_doc(&text)?;
    if let Some(trials) = rc.trials {
        doc.trials = trials;
    }
    if let Some(seed) = rc.seed {
        doc.seed = seed;
    }
    if let Some(grid) = &rc.snr_db {
        doc.snr_db = grid.clone();
    }
    Ok(config::expand(&doc)?)
}

/// Executes every scenario of the config for every configured metric and
/// writes one CSV per curve (plus plot scripts when requested).
pub fn run(rc: &RunConfig) -> Result<RunReport, RunError> {
    let cfg = load_config(rc)?;
    fs::create_dir_all(&rc.out_dir)
        .map_err(|source| RunError::Io { path: rc.out_dir.clone(), source })?;
    let mut written: Vec<PathBuf> = Vec::new();
    match execute(&cfg, rc, &mut written) {
        Ok(()) => Ok(RunReport { name: cfg.name.clone(), files: written }),
        Err(err) => {
            for path in &written {
                let _ = fs::remove_file(path);
            }
            Err(err)
        }
    }
}

fn execute(cfg: &ParsedConfig, rc: &RunConfig, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    fn write(
        written: &mut Vec<PathBuf>,
        path: PathBuf,
        content: String,
    ) -> Result<(), RunError> {
        fs::write(&path, content)
            .map_err(|source| RunError::Io { path: path.clone(), source })?;
        written.push(path);
        Ok(())
    }

    for &metric in &cfg.metrics {
        for (name, scn) in &cfg.scenarios {
            match metric {
                MetricKind::Ber => {
                    let res = run_ber(scn)?;
                    let grid = &scn.snr_grid_db;
                    let a1 = analytic_ber_ue1(scn, grid)?;
                    let a2 = analytic_ber_ue2(scn, grid)?;
                    write(
                        written,
                        rc.out_dir.join(report::series_file_name(metric, name, Some("ue1"))),
                        report::render_series_csv(&res.ue1, &a1),
                    )?;
                    write(
                        written,
                        rc.out_dir.join(report::series_file_name(metric, name, Some("ue2"))),
                        report::render_series_csv(&res.ue2, &a2),
                    )?;
                }
                MetricKind::Outage => {
                    let res = run_outage(scn)?;
                    let grid = &scn.snr_grid_db;
                    let a1 = analytic_outage_ue1(scn, grid)?;
                    let a2 = analytic_outage_ue2(scn, grid)?;
                    write(
                        written,
                        rc.out_dir.join(report::series_file_name(metric, name, Some("ue1"))),
                        report::render_series_csv(&res.ue1, &a1),
                    )?;
                    write(
                        written,
                        rc.out_dir.join(report::series_file_name(metric, name, Some("ue2"))),
                        report::render_series_csv(&res.ue2, &a2),
                    )?;
                }
                MetricKind::SumRate => {
                    let res = run_sum_rate(scn)?;
                    let analytic = analytic_sum_rate(scn, &scn.snr_grid_db)?;
                    write(
                        written,
                        rc.out_dir.join(report::series_file_name(metric, name, None)),
                        report::render_series_csv(&res, &analytic),
                    )?;
                }
            }
        }
        if rc.emit_plots {
            let entries: Vec<PlotEntry> = cfg
                .scenarios
                .iter()
                .map(|(name, scn)| PlotEntry {
                    scenario: name.clone(),
                    is_sma: scn.scheme == Scheme::Sma,
                })
                .collect();
            let path = report::emit_plot_script(&rc.out_dir, &cfg.name, metric, &entries)
                .map_err(|source| RunError::Io { path: rc.out_dir.clone(), source })?;
            written.push(path);
        }
    }
    Ok(())
}

fn rho_of(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Closed-form BER companion for UE-1 (SMA only; NaN for the baseline, whose
/// closed forms are out of scope here).
fn analytic_ber_ue1(scn: &Scenario, grid: &[f64]) -> Result<Vec<f64>, RunError> {
    match scn.scheme {
        Scheme::Sma => {
            let bits = (scn.m as f64).log2();
            grid.iter()
                .map(|&db| {
                    let gamma_bar = rho_of(db) * scn.sigma1_sq / bits;
                    Ok(abep_ue1(gamma_bar, scn.nr)?.value())
                })
                .collect()
        }
        Scheme::Noma => Ok(vec![f64::NAN; grid.len()]),
    }
}

/// Raw (unclamped) union bound companion for UE-2; the plot scripts apply the
/// 0.5 display clamp.
fn analytic_ber_ue2(scn: &Scenario, grid: &[f64]) -> Result<Vec<f64>, RunError> {
    match scn.scheme {
        Scheme::Sma => {
            let spec = ConstellationSpec::for_order(scn.m).map_err(SimError::from)?;
            grid.iter()
                .map(|&db| {
                    Ok(union_bound_ue2(rho_of(db), scn.sigma2_sq, &spec, scn.nt, scn.nr)?.raw)
                })
                .collect()
        }
        Scheme::Noma => Ok(vec![f64::NAN; grid.len()]),
    }
}

fn analytic_outage_ue1(scn: &Scenario, grid: &[f64]) -> Result<Vec<f64>, RunError> {
    match (scn.scheme, scn.target_rates) {
        (Scheme::Sma, Some(t)) => grid
            .iter()
            .map(|&db| Ok(outage_ue1(t.r1, rho_of(db) * scn.sigma1_sq, scn.nr)?.value()))
            .collect(),
        _ => Ok(vec![f64::NAN; grid.len()]),
    }
}

fn analytic_outage_ue2(scn: &Scenario, grid: &[f64]) -> Result<Vec<f64>, RunError> {
    match (scn.scheme, scn.target_rates) {
        (Scheme::Sma, Some(t)) => {
            let p = outage_ue2(t.r2, scn.nt)?.value();
            Ok(vec![p; grid.len()])
        }
        _ => Ok(vec![f64::NAN; grid.len()]),
    }
}

fn analytic_sum_rate(scn: &Scenario, grid: &[f64]) -> Result<Vec<f64>, RunError> {
    match scn.scheme {
        Scheme::Sma => grid
            .iter()
            .map(|&db| {
                let c1 = ergodic_capacity_ue1(rho_of(db) * scn.sigma1_sq, scn.nr)?;
                Ok(c1 + (scn.nt as f64).log2())
            })
            .collect(),
        Scheme::Noma => Ok(vec![f64::NAN; grid.len()]),
    }
}

/// Convenience entry for `validate`: load, apply overrides, and report the
/// scenario count.
pub fn validate(rc: &RunConfig) -> Result<ParsedConfig, RunError> {
    load_config(rc)
}
