use serde::{Deserialize, Serialize};

use super::{IterationState, SolverError};

/// Iterate-`k` series needed at one interface, sampled at `t_1..t_steps`.
///
/// `u0`, `u1` come from the left piece (global nodes `cut−1`, `cut`), `wn`,
/// `wn1` from the right piece (nodes `cut+n−1`, `cut+n`). Without overlap `u1`
/// and `wn` are phantom values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTraces {
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub wn: Vec<f64>,
    pub wn1: Vec<f64>,
}

impl InterfaceTraces {
    pub fn zeros(steps: usize) -> Self {
        Self {
            u0: vec![0.0; steps],
            u1: vec![0.0; steps],
            wn: vec![0.0; steps],
            wn1: vec![0.0; steps],
        }
    }

    fn steps(&self) -> Option<usize> {
        let n = self.u0.len();
        (self.u1.len() == n && self.wn.len() == n && self.wn1.len() == n).then_some(n)
    }
}

/// Off-diagonal entries of the monolithic system cut at an interface: `left`
/// couples the left piece's last row to its phantom, `right` the right
/// piece's first row to its phantom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub left: f64,
    pub right: f64,
}

/// Boundary vectors for one interface: `left` is added to the last row of the
/// left piece, `right` to the first row of the right piece.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSources {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

fn traces<'a>(
    state: &'a IterationState,
    interface: usize,
) -> Result<&'a InterfaceTraces, SolverError> {
    let tr = state.interface_traces.get(interface).ok_or_else(|| {
        SolverError::Protocol(format!(
            "iterate {} has no traces for interface {interface}",
            state.iterate_index
        ))
    })?;
    if tr.steps().is_none() {
        return Err(SolverError::Protocol(format!(
            "traces of interface {interface} have inconsistent lengths"
        )));
    }
    Ok(tr)
}

/// Sources `c·w_{n+1}` and `c·u₀` of the classical exchange.
pub fn dirichlet_interface(
    state: &IterationState,
    interface: usize,
    coupling: Coupling,
) -> Result<InterfaceSources, SolverError> {
    let tr = traces(state, interface)?;
    Ok(InterfaceSources {
        left: tr.wn1.iter().map(|w| coupling.left * w).collect(),
        right: tr.u0.iter().map(|u| coupling.right * u).collect(),
    })
}

/// Sources `c·(w_{n+1} − w_n/(1+α))` and `c·(u₀ + u₁/(β−1))` of the optimized
/// exchange. The matching diagonal changes are applied by
/// [`optimized_diagonal_shift`].
pub fn optimized_interface(
    state: &IterationState,
    interface: usize,
    coupling: Coupling,
    alpha: f64,
    beta: f64,
) -> Result<InterfaceSources, SolverError> {
    check_params(alpha, beta)?;
    let tr = traces(state, interface)?;
    let ka = 1.0 / (1.0 + alpha);
    let kb = 1.0 / (beta - 1.0);
    Ok(InterfaceSources {
        left: tr
            .wn1
            .iter()
            .zip(&tr.wn)
            .map(|(w1, w0)| coupling.left * (w1 - ka * w0))
            .collect(),
        right: tr
            .u0
            .iter()
            .zip(&tr.u1)
            .map(|(u0, u1)| coupling.right * (u0 + kb * u1))
            .collect(),
    })
}

/// Diagonal increments `(c/(1+α), −c/(β−1))` for the left piece's last row and
/// the right piece's first row.
pub fn optimized_diagonal_shift(
    coupling: Coupling,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64), SolverError> {
    check_params(alpha, beta)?;
    Ok((coupling.left / (1.0 + alpha), -coupling.right / (beta - 1.0)))
}

fn check_params(alpha: f64, beta: f64) -> Result<(), SolverError> {
    if alpha == -1.0 || beta == 1.0 {
        return Err(SolverError::SingularTransmission { alpha, beta });
    }
    Ok(())
}
