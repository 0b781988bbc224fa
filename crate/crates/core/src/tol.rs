//! Numerical tolerances shared across modules.

/// Relative eigenvalue floor for accepting a covariance as PSD.
pub const PSD_REL: f64 = 1e-10;

/// Relative eigenvalue floor for treating a block as positive definite.
pub const PD_REL: f64 = 1e-12;

/// Relative asymmetry allowed before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_REL: f64 = 1e-12;

/// Negative mutual information down to this value is roundoff and clamps to 0.
pub const MI_CLAMP: f64 = 1e-10;

/// Slack for the closed-form consistency checks on genie parameters.
pub const GENIE_REL: f64 = 1e-12;
