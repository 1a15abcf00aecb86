//! Experiment harness behind the `wrladder` CLI.
//!
//! Each experiment writes one CSV per curve plus `manifest.json` into the
//! output directory. CSV content depends only on the resolved settings.

mod audit;
mod config;
mod output;
mod runs;

pub use audit::{audit_oracles, AuditCheck, AuditReport};
pub use config::{parse_override, read_config_file, resolve, AlphaKind, AlphaSource, Settings};
pub use output::{Cell, Column, FileRecord};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    RhoCurves,
    Equioscillation,
    AlphaVsEpsilon,
    OmegaVsEpsilon,
    WrVsOwr,
    HeatCrosscheck,
    MultiSubcircuit,
    OracleAudit,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::RhoCurves,
        ExperimentId::Equioscillation,
        ExperimentId::AlphaVsEpsilon,
        ExperimentId::OmegaVsEpsilon,
        ExperimentId::WrVsOwr,
        ExperimentId::HeatCrosscheck,
        ExperimentId::MultiSubcircuit,
        ExperimentId::OracleAudit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::RhoCurves => "rho-curves",
            ExperimentId::Equioscillation => "equioscillation",
            ExperimentId::AlphaVsEpsilon => "alpha-vs-epsilon",
            ExperimentId::OmegaVsEpsilon => "omega-vs-epsilon",
            ExperimentId::WrVsOwr => "wr-vs-owr",
            ExperimentId::HeatCrosscheck => "heat-crosscheck",
            ExperimentId::MultiSubcircuit => "multi-subcircuit",
            ExperimentId::OracleAudit => "oracle-audit",
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Io(String),
}

impl ExperimentError {
    /// 2 for configuration and output problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io(_) => 2,
            ExperimentError::Numerical(_) => 3,
        }
    }
}

/// An experiment request: settings overrides in application order and the
/// output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: ExperimentId,
    pub parameters: Vec<(String, toml::Value)>,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    /// Config file entries first, then `key=value` overrides.
    pub fn from_sources(
        experiment_id: ExperimentId,
        config_file: Option<&Path>,
        sets: &[String],
        output_path: PathBuf,
    ) -> Result<Self, ExperimentError> {
        let mut parameters = Vec::new();
        if let Some(p) = config_file {
            parameters.extend(read_config_file(p)?);
        }
        for s in sets {
            parameters.push(parse_override(s)?);
        }
        Ok(Self {
            experiment_id,
            parameters,
            output_path,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: ExperimentId,
    pub tool_version: &'static str,
    pub settings: Settings,
    pub derived: serde_json::Value,
    pub files: Vec<FileRecord>,
    pub wall_clock_seconds: f64,
    pub passed: bool,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Manifest, ExperimentError> {
    let settings = resolve(cfg.experiment_id, None, &cfg.parameters)?;
    runs::validate(cfg.experiment_id, &settings)?;
    std::fs::create_dir_all(&cfg.output_path).map_err(|e| {
        ExperimentError::Io(format!("cannot create {}: {e}", cfg.output_path.display()))
    })?;
    let start = Instant::now();
    let out = runs::dispatch(cfg.experiment_id, &settings, &cfg.output_path)?;
    let manifest = Manifest {
        experiment: cfg.experiment_id,
        tool_version: env!("CARGO_PKG_VERSION"),
        settings,
        derived: out.derived,
        files: out.files,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        passed: out.failure.is_none(),
    };
    output::write_json(&cfg.output_path, "manifest.json", &manifest)?;
    match out.failure {
        Some(msg) => Err(ExperimentError::Numerical(msg)),
        None => Ok(manifest),
    }
}
