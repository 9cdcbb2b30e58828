//! Fixpoints, Jacobian spectra, critical noise thresholds, regimes and resource curves.

mod critical;
mod fixpoint;
mod jacobian;
mod regime;
mod resources;

pub use critical::{
    binary_spectral_radius, critical_f0_binary, critical_f0_binary_iterative, critical_interval_white_noise,
    white_noise_lower_indicator, white_noise_upper_radius, CriticalInterval, CRITICAL_BINARY_BRACKET,
    CRITICAL_BINARY_TOL, CRITICAL_WHITE_TOL, MAX_BISECTIONS, WHITE_LOWER_BRACKET, WHITE_UPPER_HI,
};
pub use fixpoint::{
    binary_fixpoint_closed_form, find_fixpoint, fixpoint_residual, FixpointResult, FIXPOINT_MAX_ITER, FIXPOINT_TOL,
};
pub use jacobian::{finite_difference_jacobian, jacobian, max_eigenvalue_modulus, JacobianMatrix, FD_STEP};
pub use regime::{
    classify_regime, default_regime_initial, regime_histogram, sample_noise_with_f00, RegimeClassification,
    RegimeCriteria, RegimeHistogramRow, RegimeLabel, DEFAULT_REGIME_WERNER,
};
pub use resources::{resource_curve, PowerLawFit, ResourceCurve, ResourcePoint, DEFAULT_RESOURCE_ROUNDS, FIT_TAIL_EPS};
