//! Default tolerances. Every threshold used by checks and field validation
//! is named here.

/// Relative error allowed for exact linear identities (round trips,
/// projector idempotence, multiplier commutation, Parseval).
pub const EXACT: f64 = 1e-13;

/// Relative residual `max|ξ·û| / max|û|` for a field flagged divergence-free.
pub const DIVERGENCE: f64 = 1e-12;

/// Divergence residual allowed along a time-stepped trajectory.
pub const DIVERGENCE_TRAJECTORY: f64 = 1e-11;

/// Relative Hermitian asymmetry accepted by the inverse transform.
pub const HERMITIAN: f64 = 1e-13;

/// Floor of the energy-inequality tolerance.
pub const ENERGY_FLOOR: f64 = 1e-8;

/// Coefficient `C` in the discretization budget `C * dt^2 * t * scale`.
pub const ENERGY_DT2_COEFF: f64 = 10.0;

/// Tolerance scaling used by the energy and ∂₃ inequality checks:
/// `max(1e-8, 10 dt² t) * scale`.
pub fn inequality_budget(dt: f64, t: f64, scale: f64) -> f64 {
    ENERGY_FLOOR.max(ENERGY_DT2_COEFF * dt * dt * t) * scale
}
