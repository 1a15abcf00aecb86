//! Uniform RC ladder and its heat-equation counterpart.

use serde::{Deserialize, Serialize};

use super::stamp::{StampMatrix, TridiagonalOde};
use super::MnaError;

/// Physical parameters of a uniform RC ladder with optional per-node leakage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    /// Series resistance between neighbouring nodes, ohms.
    pub resistance: f64,
    /// Grounded capacitance at each node, farads.
    pub capacitance: f64,
    /// Leakage parameter: each node leaks to ground through `R/epsilon`.
    pub epsilon: f64,
    pub node_count: usize,
}

impl CircuitSpec {
    pub fn new(
        resistance: f64,
        capacitance: f64,
        epsilon: f64,
        node_count: usize,
    ) -> Result<Self, MnaError> {
        let spec = Self {
            resistance,
            capacitance,
            epsilon,
            node_count,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), MnaError> {
        if !(self.resistance.is_finite() && self.resistance > 0.0) {
            return Err(MnaError::InvalidSpec(format!(
                "resistance must be positive, got {}",
                self.resistance
            )));
        }
        if !(self.capacitance.is_finite() && self.capacitance > 0.0) {
            return Err(MnaError::InvalidSpec(format!(
                "capacitance must be positive, got {}",
                self.capacitance
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(MnaError::InvalidSpec(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.node_count < 3 {
            return Err(MnaError::TooSmall {
                nodes: self.node_count,
                min: 3,
            });
        }
        Ok(())
    }

    /// Off-diagonal coefficient `1/(RC)`.
    pub fn a(&self) -> f64 {
        1.0 / (self.resistance * self.capacitance)
    }

    /// Diagonal coefficient `−(2+ε)·a`.
    pub fn b(&self) -> f64 {
        -(2.0 + self.epsilon) * self.a()
    }

    /// Leakage resistor `R/ε`; `None` when there is no leakage.
    pub fn leakage_resistance(&self) -> Option<f64> {
        (self.epsilon > 0.0).then(|| self.resistance / self.epsilon)
    }
}

/// How the finite ladder is closed at its two ends.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryClosure {
    /// End nodes only see one series resistor: `diag_end = −(1+ε)a`.
    Reflecting,
    /// End nodes are tied to ground through `R`, giving `−(2+ε)a` on every row.
    #[default]
    Uniform,
}

impl std::str::FromStr for BoundaryClosure {
    type Err = MnaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reflecting" => Ok(BoundaryClosure::Reflecting),
            "uniform" => Ok(BoundaryClosure::Uniform),
            other => Err(MnaError::InvalidSpec(format!(
                "unknown boundary closure `{other}`"
            ))),
        }
    }
}

/// Stamp every element of the truncated ladder.
pub fn ladder_stamps(spec: &CircuitSpec, closure: BoundaryClosure) -> Result<StampMatrix, MnaError> {
    spec.validate()?;
    let n = spec.node_count;
    let mut sm = StampMatrix::new(n);
    for i in 0..n {
        sm.stamp_capacitor(spec.capacitance, Some(i), None)?;
        if let Some(leak) = spec.leakage_resistance() {
            sm.stamp_resistor(leak, Some(i), None)?;
        }
    }
    for i in 0..n - 1 {
        sm.stamp_resistor(spec.resistance, Some(i), Some(i + 1))?;
    }
    if closure == BoundaryClosure::Uniform {
        sm.stamp_resistor(spec.resistance, Some(0), None)?;
        sm.stamp_resistor(spec.resistance, Some(n - 1), None)?;
    }
    Ok(sm)
}

pub fn build_rc_ladder(
    spec: &CircuitSpec,
    closure: BoundaryClosure,
) -> Result<TridiagonalOde, MnaError> {
    ladder_stamps(spec, closure)?.assemble()
}

/// Method-of-lines second difference `(v[i-1] − 2v[i] + v[i+1])/dx²` with
/// homogeneous Dirichlet ends.
pub fn heat_equation_system(mesh_points: usize, dx: f64) -> Result<TridiagonalOde, MnaError> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(MnaError::InvalidSpec(format!(
            "mesh spacing must be positive, got {dx}"
        )));
    }
    if mesh_points == 0 {
        return Err(MnaError::TooSmall { nodes: 0, min: 1 });
    }
    let a = 1.0 / (dx * dx);
    Ok(TridiagonalOde::uniform(mesh_points, a, -2.0 * a))
}
