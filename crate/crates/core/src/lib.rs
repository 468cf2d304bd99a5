//! Stabilizer-circuit simulation with magic-state inputs.
//!
//! The crate contains a phase-sensitive stabilizer engine, three simulators
//! (dyadic quasiprobability sampling, stabilizer-rank bit-string sampling and a
//! constrained biased estimator), single-qubit magic monotones with an LP for
//! the robustness of magic, and distillation bounds.

pub mod channels;
pub mod constrained_sim;
pub mod dense_oracle;
pub mod distill;
pub mod dyadic_sim;
pub mod error;
pub mod monotones;
pub mod parallel;
pub mod rank_sim;
pub mod scalar;
pub mod stab_core;

pub use error::{Error, Result};
pub use scalar::Real;

/// Bloch state in double precision.
pub type Bloch = monotones::BlochState<f64>;
/// Bloch state in single precision.
pub type Bloch32 = monotones::BlochState<f32>;
