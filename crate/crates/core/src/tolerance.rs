//! Numerical tolerances used throughout the crate.

/// Algebraic identities evaluated in double precision.
pub const TAU_NUM: f64 = 1e-10;

/// Group and Lie-algebra membership.
pub const TAU_GRP: f64 = 1e-9;

/// Agreement with central finite differences.
pub const TAU_FD: f64 = 1e-5;

/// Step used for central finite differences.
pub const FD_STEP: f64 = 1e-4;

/// Relator residual accepted for a representation of the surface group.
pub const TAU_REP: f64 = 1e-9;

/// Newton iterations for the relator equation.
pub const NEWTON_MAX_ITER: usize = 50;

/// Perturbation of crossing points, as a fraction of the polygon circumradius.
pub const PERTURBATION: f64 = 1e-3;

/// Attempts at reaching generic position before giving up.
pub const RETRY_BUDGET: usize = 32;

/// Default grid size for transport quadrature.
pub const DEFAULT_GRID: usize = 2000;

/// Default truncation order of the iterated-integral series.
pub const DEFAULT_ORDER: usize = 12;
