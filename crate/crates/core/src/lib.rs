//! Waveform relaxation (WR) and optimized waveform relaxation (OWR) for RC
//! ladder circuits split into overlapping sub-circuits.
//!
//! - [`mna`]: element stamping and the tridiagonal ODE of the ladder.
//! - [`spectral`]: Laplace-domain convergence factors.
//! - [`optimizer`]: closed-form and numerical transmission parameters.
//! - [`solver`]: time-domain sweeps and the fixed-frequency iteration.
//! - [`experiments`]: the named experiments behind the `wrladder` binary,
//!   their settings and CSV/JSON output.

pub mod mna;
pub mod experiments;
pub mod optimizer;
pub mod search;
pub mod solver;
pub mod spectral;
pub mod tridiag;
