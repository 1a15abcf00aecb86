use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::mna::BoundaryClosure;

use super::{ExperimentError, ExperimentId};

/// Where the transmission parameter `α` comes from (`β = −α` unless set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSource {
    Named(AlphaKind),
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaKind {
    Asymptotic,
    Numeric,
}

impl AlphaSource {
    pub fn label(&self) -> String {
        match self {
            AlphaSource::Named(AlphaKind::Asymptotic) => "asymptotic".into(),
            AlphaSource::Named(AlphaKind::Numeric) => "numeric".into(),
            AlphaSource::Explicit(a) => format!("alpha{a}"),
        }
    }
}

/// Fully resolved experiment settings.
///
/// Built from per-experiment defaults, then the config file, then `--set`
/// overrides, each layer replacing whole keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub resistance: f64,
    pub capacitance: f64,
    pub epsilon: f64,
    pub epsilons: Vec<f64>,
    pub nodes: usize,
    pub closure: BoundaryClosure,
    pub subcircuits: Vec<usize>,
    pub overlaps: Vec<usize>,
    pub alpha_sources: Vec<AlphaSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// When positive, the sweep budget becomes `budget_per_subcircuit·N_s`.
    pub budget_per_subcircuit: usize,
    pub seed: u64,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    pub points: usize,
    pub grid: usize,
    pub samples: usize,
    /// Netlist file replacing the generated ladder in circuit experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub netlist: Option<String>,
}

const PHYSICAL_R: f64 = 500.0;
const PHYSICAL_C: f64 = 0.63e-12;

impl Settings {
    pub fn defaults(id: ExperimentId) -> Self {
        let analysis_eps: Vec<f64> = (0..13).map(|i| 10f64.powf(-8.0 + 0.5 * i as f64)).collect();
        let base = Settings {
            resistance: 1.0,
            capacitance: 1.0,
            epsilon: 1e-4,
            epsilons: vec![1e-4],
            nodes: 200,
            closure: BoundaryClosure::Uniform,
            subcircuits: vec![2],
            overlaps: vec![0, 2],
            alpha_sources: vec![AlphaSource::Named(AlphaKind::Asymptotic)],
            beta: None,
            dt: 0.1,
            t_end: 2000.0,
            tol: 1e-6,
            max_iter: 30,
            budget_per_subcircuit: 0,
            seed: 1,
            sigma: 0.0,
            omega_max: None,
            points: 400,
            grid: 1000,
            samples: 100,
            netlist: None,
        };
        match id {
            ExperimentId::RhoCurves => Settings {
                epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4],
                overlaps: vec![0],
                omega_max: Some(10.0),
                ..base
            },
            ExperimentId::Equioscillation => Settings {
                overlaps: vec![0, 1, 2],
                ..base
            },
            ExperimentId::AlphaVsEpsilon => Settings {
                epsilons: analysis_eps,
                overlaps: vec![0, 1, 2],
                ..base
            },
            ExperimentId::OmegaVsEpsilon => Settings {
                epsilons: analysis_eps,
                overlaps: vec![1, 2],
                ..base
            },
            ExperimentId::WrVsOwr => Settings {
                resistance: PHYSICAL_R,
                capacitance: PHYSICAL_C,
                tol: 0.0,
                ..base
            },
            ExperimentId::HeatCrosscheck => Settings {
                alpha_sources: vec![
                    AlphaSource::Named(AlphaKind::Asymptotic),
                    AlphaSource::Named(AlphaKind::Numeric),
                ],
                max_iter: 200,
                ..base
            },
            ExperimentId::MultiSubcircuit => Settings {
                resistance: PHYSICAL_R,
                capacitance: PHYSICAL_C,
                epsilon: 1e-5,
                nodes: 1000,
                subcircuits: vec![5, 50],
                overlaps: vec![0, 1],
                dt: 1.0,
                t_end: 1000.0,
                budget_per_subcircuit: 100,
                seed: 11,
                ..base
            },
            ExperimentId::OracleAudit => Settings { seed: 2024, ..base },
        }
    }

    /// Sweep budget for a partition into `ns` pieces.
    pub fn budget(&self, ns: usize) -> usize {
        if self.budget_per_subcircuit > 0 {
            self.budget_per_subcircuit * ns
        } else {
            self.max_iter
        }
    }

    /// `a = 1/(RC)`.
    pub fn a(&self) -> f64 {
        1.0 / (self.resistance * self.capacitance)
    }
}

/// Parses one `key=value` override. Values are read as TOML; anything that is
/// not valid TOML is taken as a bare string.
pub fn parse_override(text: &str) -> Result<(String, toml::Value), ExperimentError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| ExperimentError::Config(format!("override `{text}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ExperimentError::Config(format!("override `{text}` has an empty key")));
    }
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

/// Layers `file` and `overrides` over the defaults of `id`.
pub fn resolve(
    id: ExperimentId,
    file: Option<&toml::Table>,
    overrides: &[(String, toml::Value)],
) -> Result<Settings, ExperimentError> {
    let mut table = toml::Table::try_from(Settings::defaults(id))
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    if let Some(f) = file {
        for (k, v) in f {
            table.insert(k.clone(), v.clone());
        }
    }
    for (k, v) in overrides {
        table.insert(k.clone(), v.clone());
    }
    let settings: Settings = table
        .try_into()
        .map_err(|e: toml::de::Error| ExperimentError::Config(e.message().to_string()))?;
    Ok(settings)
}

pub fn read_config_file(path: &Path) -> Result<toml::Table, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| ExperimentError::Config(format!("{}: {}", path.display(), e.message())))
}
