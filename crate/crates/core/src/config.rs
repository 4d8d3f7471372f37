//! Scenario configuration: a flat TOML document with named scenario sections,
//! plus the in-repo presets behind the `fig2`/`fig3`/`fig4` reproduction
//! commands.
//!
//! Unknown keys are rejected, and semantic violations are reported with the
//! offending field path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::TargetRates;
use crate::modem::PowerSplit;
use crate::montecarlo::{Scenario, Scheme};

/// Default trial count per SNR point (desk scale).
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Default master seed shared by the shipped presets.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_snr_grid() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}

fn default_sigma() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ConfigError {
    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid { path: path.into(), message: message.into() }
    }
}

/// Which performance sweeps a config runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Ber,
    Outage,
    SumRate,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Ber => "ber",
            MetricKind::Outage => "outage",
            MetricKind::SumRate => "sum_rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Sma,
    Noma,
}

/// Top-level config document. `trials`, `seed`, and `snr_db` are shared by
/// every scenario section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub name: String,
    pub metrics: Vec<MetricKind>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_snr_grid")]
    pub snr_db: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_stop_errors: Option<u64>,
    pub scenario: BTreeMap<String, ScenarioSection>,
}

/// One named scenario section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub scheme: SchemeKind,
    pub nt: usize,
    pub nr: usize,
    /// Constellation order; defaults to `nt` (the matched-dimension choice).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default = "default_sigma")]
    pub sigma1_sq: f64,
    #[serde(default = "default_sigma")]
    pub sigma2_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_r1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_r2: Option<f64>,
    #[serde(default = "default_true")]
    pub fair_comparison: bool,
}

/// A parsed and validated config: the document plus the expanded scenarios in
/// section-name order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub name: String,
    pub metrics: Vec<MetricKind>,
    pub scenarios: Vec<(String, Scenario)>,
}

/// Deserializes a config document, rejecting unknown keys.
pub fn parse_doc(text: &str) -> Result<ConfigDoc, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))
}

/// Parses a config document and expands every scenario section, rejecting
/// unknown keys and invariant violations.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    expand(&parse_doc(text)?)
}

/// Expands an already-deserialized document into validated scenarios.
pub fn expand(doc: &ConfigDoc) -> Result<ParsedConfig, ConfigError> {
    if doc.metrics.is_empty() {
        return Err(ConfigError::invalid("metrics", "at least one metric is required"));
    }
    if doc.scenario.is_empty() {
        return Err(ConfigError::invalid("scenario", "at least one scenario section is required"));
    }
    if doc.trials == 0 {
        return Err(ConfigError::invalid("trials", "must be positive"));
    }
    if doc.snr_db.is_empty() || doc.snr_db.iter().any(|v| !v.is_finite()) {
        return Err(ConfigError::invalid("snr_db", "must be a non-empty list of finite values"));
    }
    let mut scenarios = Vec::with_capacity(doc.scenario.len());
    for (name, section) in &doc.scenario {
        let scenario = expand_section(doc, name, section)?;
        scenarios.push((name.clone(), scenario));
    }
    Ok(ParsedConfig { name: doc.name.clone(), metrics: doc.metrics.clone(), scenarios })
}

fn expand_section(
    doc: &ConfigDoc,
    name: &str,
    section: &ScenarioSection,
) -> Result<Scenario, ConfigError> {
    let path = |field: &str| format!("scenario.{name}.{field}");
    let scheme = match section.scheme {
        SchemeKind::Sma => Scheme::Sma,
        SchemeKind::Noma => Scheme::Noma,
    };
    let power_split = match (section.a1, section.a2) {
        (None, None) => {
            if scheme == Scheme::Noma {
                return Err(ConfigError::invalid(
                    path("a1"),
                    "NOMA scenarios require the power split a1, a2",
                ));
            }
            None
        }
        (Some(a1), Some(a2)) => Some(
            PowerSplit::new(a1, a2)
                .map_err(|_| ConfigError::invalid(path("a1"), "power split must sum to 1 with a2 > a1 > 0"))?,
        ),
        _ => {
            return Err(ConfigError::invalid(
                path("a1"),
                "a1 and a2 must be given together",
            ))
        }
    };
    let target_rates = match (section.target_r1, section.target_r2) {
        (None, None) => {
            if doc.metrics.contains(&MetricKind::Outage) {
                return Err(ConfigError::invalid(
                    path("target_r1"),
                    "outage runs require target_r1 and target_r2",
                ));
            }
            None
        }
        (Some(r1), Some(r2)) => Some(
            TargetRates::new(r1, r2)
                .map_err(|e| ConfigError::invalid(path("target_r1"), e.to_string()))?,
        ),
        _ => {
            return Err(ConfigError::invalid(
                path("target_r1"),
                "target_r1 and target_r2 must be given together",
            ))
        }
    };
    let scenario = Scenario {
        scheme,
        nt: section.nt,
        nr: section.nr,
        m: section.m.unwrap_or(section.nt),
        sigma1_sq: section.sigma1_sq,
        sigma2_sq: section.sigma2_sq,
        power_split,
        target_rates,
        snr_grid_db: doc.snr_db.clone(),
        trials: doc.trials,
        master_seed: doc.seed,
        early_stop_errors: doc.early_stop_errors,
        fair_comparison: section.fair_comparison,
    };
    scenario
        .validate()
        .map_err(|e| ConfigError::invalid(format!("scenario.{name}"), e.to_string()))?;
    Ok(scenario)
}

/// Names of the presets shipped with the crate.
pub fn preset_names() -> &'static [&'static str] {
    &["fig2", "fig3", "fig4"]
}

/// Embedded preset text by name.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "fig2" => Some(include_str!("../presets/fig2.toml")),
        "fig3" => Some(include_str!("../presets/fig3.toml")),
        "fig4" => Some(include_str!("../presets/fig4.toml")),
        _ => None,
    }
}
