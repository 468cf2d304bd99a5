//! Phase-sensitive stabilizer states in CH form.
//!
//! Gates, Pauli projections, inner products and equatorial overlaps all keep
//! track of the global phase and amplitude, which the quasiprobability and
//! stabilizer-rank simulators need.

mod gate;
mod pauli;
mod state;

pub use gate::{inverse_circuit, Gate};
pub use pauli::{PauliOp, StabProjector};
pub use state::{ChScalar, EquatorialMatrix, StabState};

/// Largest register a [`StabState`] can hold (one machine word per tableau row).
pub const MAX_QUBITS: usize = 64;
