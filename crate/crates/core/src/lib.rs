//! Measurement-based cooling of small spin-1/2 chains.
//!
//! Two-phase protocol on a full state vector: projective single-spin
//! measurements plus gated RF feedback polarize the chain in a strong field,
//! then an exponential field ramp carries the polarized state adiabatically
//! toward the ground state of the bare chain.
//!
//! Basis convention used everywhere: bit `m` of a basis index encodes spin `m`,
//! with `1` = up (`S^z = +1/2`) and `0` = down.

pub mod cli;
pub mod config;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod plot;
pub mod protocols;
pub mod rng;
pub mod schedule;
pub mod spectrum;
pub mod state;
pub mod statefile;
pub mod trace;

pub use error::{Error, Result};
pub use evolution::EvolutionContext;
pub use hamiltonian::{Axis, OperatorTermList, PauliTerm};
pub use rng::RngStream;
pub use schedule::DriveSchedule;
pub use spectrum::EigenResult;
pub use state::{Direction, MeasurementOutcome, StateVector};

/// Complex amplitude type.
pub type C64 = num_complex::Complex64;
