//! Deterministic one-round maps for ensemble coefficient vectors.

mod iterate;
mod noise;
mod quadratic;
mod state;
mod step;

pub use iterate::{iterate, RoundRecord, Trajectory, DEFAULT_MAX_ROUNDS, DEFAULT_TOL};
pub use noise::{BinaryNoise, NoiseModel};
pub use quadratic::{build_quadratic_map, QuadraticMap};
pub use state::{
    aggregate, cell, cell_names, conditional_fidelity, make_initial_flagged, make_werner, BinaryFlaggedState,
    Coefficients, FlaggedState16, IdealState, NORMALIZATION_TOL,
};
pub use step::{
    aggregate_step, aggregate_unnormalized, binary_step, binary_survival, binary_unnormalized, clamp_warnings,
    flagged_step, flagged_step_with, flagged_unnormalized, ideal_unnormalized, qpa_step_ideal, CLAMP_THRESHOLD,
};
