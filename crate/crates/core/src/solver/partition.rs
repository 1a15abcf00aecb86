use serde::{Deserialize, Serialize};

use super::SolverError;

/// Transmission condition used at every interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TcKind {
    Dirichlet,
    Optimized { alpha: f64, beta: f64 },
}

impl TcKind {
    pub fn validate(&self) -> Result<(), SolverError> {
        if let TcKind::Optimized { alpha, beta } = *self {
            if !(alpha.is_finite() && beta.is_finite()) {
                return Err(SolverError::InvalidSetting(format!(
                    "transmission parameters must be finite, got alpha={alpha}, beta={beta}"
                )));
            }
            if alpha == -1.0 || beta == 1.0 {
                return Err(SolverError::SingularTransmission { alpha, beta });
            }
        }
        Ok(())
    }
}

/// Inclusive global node range of one sub-circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub first: usize,
    pub last: usize,
}

impl Piece {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: usize) -> bool {
        (self.first..=self.last).contains(&node)
    }
}

/// Geometry of the cut between pieces `left` and `left + 1`.
///
/// `cut` is the first node of the right piece. The left piece ends at
/// `cut + n − 1` and its phantom is `cut + n`; the right piece's phantom is
/// `cut − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interface {
    pub left: usize,
    pub cut: usize,
    pub overlap: usize,
}

impl Interface {
    pub fn right(&self) -> usize {
        self.left + 1
    }

    /// `u₀`: phantom of the right piece.
    pub fn u0(&self) -> usize {
        self.cut - 1
    }

    /// `u₁`, which is also the first node of the right piece.
    pub fn u1(&self) -> usize {
        self.cut
    }

    /// `w_n`: last node of the left piece.
    pub fn wn(&self) -> usize {
        self.cut + self.overlap - 1
    }

    /// `w_{n+1}`: phantom of the left piece.
    pub fn wn1(&self) -> usize {
        self.cut + self.overlap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub total_nodes: usize,
    pub pieces: Vec<Piece>,
    pub overlap: usize,
    pub tc_kind: TcKind,
}

impl PartitionPlan {
    pub fn n_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn interfaces(&self) -> Vec<Interface> {
        self.pieces
            .windows(2)
            .enumerate()
            .map(|(left, w)| Interface {
                left,
                cut: w[1].first,
                overlap: self.overlap,
            })
            .collect()
    }

    /// Nodes whose values are taken from piece `r` when composing a global
    /// iterate: from its first node up to the node before the next piece.
    pub fn core(&self, r: usize) -> Piece {
        let p = self.pieces[r];
        let last = match self.pieces.get(r + 1) {
            Some(next) => next.first - 1,
            None => p.last,
        };
        Piece { first: p.first, last }
    }
}

pub fn make_partition(
    total_nodes: usize,
    n_subcircuits: usize,
    overlap: usize,
    tc_kind: TcKind,
) -> Result<PartitionPlan, SolverError> {
    if n_subcircuits == 0 {
        return Err(SolverError::Partition("at least one sub-circuit is required".into()));
    }
    let need = n_subcircuits.saturating_mul(overlap + 2);
    if total_nodes < need {
        return Err(SolverError::Partition(format!(
            "{total_nodes} nodes cannot hold {n_subcircuits} sub-circuits with overlap {overlap} \
             (need at least {need})"
        )));
    }
    tc_kind.validate()?;
    let base = total_nodes / n_subcircuits;
    let extra = total_nodes % n_subcircuits;
    let mut pieces = Vec::with_capacity(n_subcircuits);
    let mut start = 0;
    for r in 0..n_subcircuits {
        let size = base + usize::from(r < extra);
        let end = start + size - 1;
        let last = if r + 1 < n_subcircuits { end + overlap } else { end };
        pieces.push(Piece { first: start, last });
        start = end + 1;
    }
    Ok(PartitionPlan {
        total_nodes,
        pieces,
        overlap,
        tc_kind,
    })
}
