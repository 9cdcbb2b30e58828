//! Two-way entanglement purification (the QPA recurrence protocol) with noisy
//! apparatus, tracked at the level of lab-demon error flags.
//!
//! The crate is layered bottom-up:
//!
//! - [`bell_algebra`]: Bell labels, Pauli actions, the flag update table and an
//!   exact 4-qubit state-vector oracle that generates the protocol transition table.
//! - [`recurrence`]: deterministic one-round maps (ideal, binary flagged,
//!   16-dimensional flagged), noise models and trajectories.
//! - [`analysis`]: fixpoints, Jacobian spectra, critical noise thresholds,
//!   regime classification and resource curves.
//! - [`monte_carlo`]: seeded pair-level ensemble simulation.
//! - [`cli`]: experiment configuration and CSV reporting behind the `flagged-epp` binary.

pub mod analysis;
pub mod bell_algebra;
pub mod cli;
pub mod error;
pub mod monte_carlo;
pub mod recurrence;

pub use error::{Error, Result};
