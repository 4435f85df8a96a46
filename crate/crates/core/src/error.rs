use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Material response requested off the positive real frequency axis.
    #[error("frequency must be positive and finite, got {0} eV")]
    Domain(f64),

    #[error("invalid material parameter `{name}`: {reason}")]
    InvalidMaterial { name: &'static str, reason: String },

    #[error("block length must be positive and finite, got {0} eV^-1")]
    InvalidLength(f64),

    /// `eps * mu` vanished exactly, so the refractive index has no branch.
    #[error("singular response: eps*mu = 0")]
    SingularResponse,

    #[error("degenerate geometry: scattering denominator {magnitude:e} at omega = {omega} eV")]
    DegenerateGeometry { omega: f64, magnitude: f64 },

    #[error("position x = {x} is outside the {expected} region of a block of length {length}")]
    Region {
        x: f64,
        length: f64,
        expected: &'static str,
    },

    #[error("resonance degeneracy: Wronskian magnitude {0:e}")]
    ResonanceDegeneracy(f64),

    #[error("mode algebra breaks down: |zeta| = {0} is not below 1")]
    AlgebraBreakdown(f64),

    /// Quadrature ran out of panels; the best available estimate is kept.
    #[error(
        "quadrature did not converge after {panels} panels: value {value:e}, error estimate {error_estimate:e}"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("principal value: the integrand does not cancel about the singular point {0}")]
    NonCancellation(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
