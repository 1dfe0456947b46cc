//! Configuration files, flag merging and run manifests.

use std::path::Path;

use hvlab::algebra::SwapRegime;
use hvlab::bell::SamplingSemantics;
use hvlab::hv::Discipline;
use hvlab::BellState;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::{parse_angle, parse_grid};

/// An angle given either as radians or as an expression such as `"pi/8"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Expr(String),
}

impl AngleValue {
    pub fn radians(&self) -> Result<f64, CliError> {
        match self {
            AngleValue::Radians(x) => Ok(*x),
            AngleValue::Expr(s) => parse_angle(s).map_err(CliError::Config),
        }
    }
}

/// Every setting that a flag can carry. Absent keys fall back to defaults.
///
/// A run manifest stores the fully resolved form of this table, so a
/// manifest can be passed back as `--config` to repeat a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<BellState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantics: Option<SamplingSemantics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discipline: Option<Discipline>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<AngleValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routing: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<SwapRegime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<u8>>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    /// Fields set in `flags` replace those of `self`.
    pub fn overlay(mut self, flags: Settings) -> Settings {
        if flags.delta_grid.is_some() || flags.deltas.is_some() {
            self.delta_grid = None;
            self.deltas = None;
        }
        overlay!(self, flags; n, state, semantics, discipline, alpha, beta, delta_grid, deltas, a, a_prime, b,
            b_prime, samples, cycles, modulus_lo, modulus_hi, routing, draws, regime, criteria);
        self
    }

    /// The sweep grid, from either `delta_grid` or an explicit list.
    pub fn grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        match (&self.delta_grid, &self.deltas) {
            (Some(_), Some(_)) => Err(CliError::Config("give either delta_grid or deltas, not both".into())),
            (Some(g), None) => parse_grid(g).map(Some).map_err(CliError::Config),
            (None, Some(d)) if d.is_empty() => Err(CliError::Config("deltas list is empty".into())),
            (None, Some(d)) => Ok(Some(d.clone())),
            (None, None) => Ok(None),
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub subcommand: String,
    pub seed: u64,
    pub partitions: usize,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub config: Settings,
}

impl RunManifest {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("manifest does not serialize: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad manifest: {e}")))
    }
}

/// A loaded `--config` file: plain settings, optionally with a seed and
/// partition count when the file is a manifest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedConfig {
    pub settings: Settings,
    pub seed: Option<u64>,
    pub partitions: Option<usize>,
}

/// Reads a settings file or a run manifest written by an earlier run.
pub fn load_config(path: &Path, subcommand: &str) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
    if table.contains_key("subcommand") {
        let m = RunManifest::from_toml(&text)?;
        if m.subcommand != subcommand {
            return Err(CliError::Config(format!(
                "manifest is for `{}`, not `{subcommand}`",
                m.subcommand
            )));
        }
        return Ok(LoadedConfig {
            settings: m.config,
            seed: Some(m.seed),
            partitions: Some(m.partitions),
        });
    }
    let mut table = table;
    let seed = take_int(&mut table, "seed")?;
    let partitions = take_int(&mut table, "partitions")?.map(|p| p as usize);
    let settings: Settings = toml::Value::Table(table)
        .try_into()
        .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
    Ok(LoadedConfig {
        settings,
        seed,
        partitions,
    })
}

fn take_int(table: &mut toml::Table, key: &str) -> Result<Option<u64>, CliError> {
    match table.remove(key) {
        None => Ok(None),
        Some(toml::Value::Integer(v)) if v >= 0 => Ok(Some(v as u64)),
        Some(other) => Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {other}"))),
    }
}
