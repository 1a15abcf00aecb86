//! Modified nodal analysis for RC networks.
//!
//! Elements are stamped into a sparse descriptor system and assembled into the
//! explicit tridiagonal ODE used by the rest of the crate. Only chain topologies
//! (every node grounded through a capacitor, resistors between neighbours) are
//! accepted by [`StampMatrix::assemble`].

mod ladder;
mod netlist;
mod stamp;

pub use ladder::{build_rc_ladder, heat_equation_system, ladder_stamps, BoundaryClosure, CircuitSpec};
pub use netlist::{Element, ElementKind, Netlist};
pub use stamp::{SourceTerm, SourceWaveform, StampMatrix, Terminal, TridiagonalOde};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MnaError {
    #[error("invalid {kind} value {value}")]
    InvalidElement { kind: &'static str, value: f64 },
    #[error("element connects terminal {terminal:?} to itself")]
    DegenerateElement { terminal: Terminal },
    #[error("node {node} out of range for a circuit with {order} nodes")]
    NodeOutOfRange { node: usize, order: usize },
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("node {node} has no capacitance to ground")]
    SingularMass { node: usize },
    #[error("circuit has {nodes} nodes, at least {min} required")]
    TooSmall { nodes: usize, min: usize },
    #[error("invalid circuit: {0}")]
    InvalidSpec(String),
    #[error("netlist line {line}: {message}")]
    Parse { line: usize, message: String },
}
