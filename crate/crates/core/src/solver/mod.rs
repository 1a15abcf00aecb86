//! Time-domain WR/OWR on overlapping partitions of a tridiagonal RC system,
//! and the fixed-frequency iteration used to cross-check the Laplace analysis.

mod integrate;
mod interface;
mod iterate;
mod oracle;
mod partition;
mod waveform;

pub use integrate::{backward_euler_window, factor_shifted, RowForcing};
pub use interface::{
    dirichlet_interface, optimized_diagonal_shift, optimized_interface, Coupling,
    InterfaceSources, InterfaceTraces,
};
pub use iterate::{
    run_wr, run_wr_system, ConvergenceReport, InitialGuess, IterationState, PhantomTraces,
    RunSettings, WrSolver,
};
pub use oracle::{
    fixed_frequency_oracle, fixed_frequency_oracle_auto, OracleMeasurement, OracleTc,
    DEFAULT_HALF_LENGTH, ECHO_LIMIT, MAX_HALF_LENGTH,
};
pub use partition::{make_partition, Interface, PartitionPlan, Piece, TcKind};
pub use waveform::{weighted_l2, weighted_norm, Waveform};

use thiserror::Error;

use crate::mna::MnaError;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("partition error: {0}")]
    Partition(String),
    #[error("singular transmission condition (alpha={alpha}, beta={beta})")]
    SingularTransmission { alpha: f64, beta: f64 },
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("shifted matrix I - dt*A is singular")]
    SingularShiftedMatrix,
    #[error("non-finite values in the solution")]
    NonFinite,
    #[error("iteration {iteration} diverged: error {error:e} exceeds 1e6 x initial error {initial:e}")]
    Diverged { iteration: usize, error: f64, initial: f64 },
    #[error("truncation half_length={half_length} too short: boundary echo {echo:e} > 1e-8; increase the length")]
    TruncationTooShort { half_length: usize, echo: f64 },
    #[error(transparent)]
    Mna(#[from] MnaError),
}
