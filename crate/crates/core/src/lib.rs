//! Few-level quantum absorption refrigerators.
//!
//! Builds the two-qubit, qubit-qutrit and single-qutrit self-contained
//! refrigerators, solves their reset-model master equations for stationary
//! states and extracts temperatures and heat currents. The [`experiments`]
//! module turns that into parameter sweeps and reproducible figure presets.
//!
//! Units throughout: `hbar = k_B = 1`, so energies and temperatures share a
//! unit and time is measured in inverse energy.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod format;
pub mod models;
pub mod observables;
pub mod tensor;
pub mod validation;

pub use dynamics::{
    build_liouvillian, evolve, steady_state, Liouvillian, SolverOptions, SteadyStateResult,
    Trajectory,
};
pub use error::{FridgeError, Result};
pub use models::{
    build_model_i, build_model_ii, build_model_iii, BathChannel, ChannelKind, FridgeModel,
    InteractionTerm, ModelIIIParams, ModelIIParams, ModelIParams, ModelParams, ModelTag,
    ParticleSpec,
};
pub use observables::{
    heat_currents, perfect_insulation_limit, temperature_of, temperatures, HeatCurrentVector,
    TemperatureKind, TemperatureReading,
};
pub use tensor::{ComplexMatrix, SpaceShape};

/// Version string stamped into output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
