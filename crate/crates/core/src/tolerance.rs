//! Numerical thresholds shared by every module.
//!
//! All defaults live here so a caller (or the CLI `--tol` flag) can override
//! them in one place.

/// Stratum threshold on concurrence: `C <= CLASS` is unentangled,
/// `C >= 1 - CLASS` is fully entangled.
pub const CLASS: f64 = 1e-9;

/// Projective equality: two states are the same when `1 - fidelity <= PROJECTIVE`.
pub const PROJECTIVE: f64 = 1e-9;

/// Distance from the deleted pole below which a base point leaves a chart domain.
pub const POLE: f64 = 1e-6;

/// Largest tolerated weight outside the two-component support of a chart residual.
pub const RESIDUAL: f64 = 1e-8;

/// Widened stratum band used when tagging trajectory points.
pub const BAND: f64 = 1e-6;

/// Polar angle below which `phi` is meaningless and snapped to zero.
pub const POLAR_SNAP: f64 = 1e-9;

/// Unit-norm check for rotation axes.
pub const AXIS_NORM: f64 = 1e-9;

/// Hermiticity check for generators.
pub const HERMITIAN: f64 = 1e-10;

/// Bound on `|norm - 1|` accepted from the propagator.
pub const NORM_DRIFT: f64 = 1e-10;

/// A bundle of tolerances threaded through classification and coordinate maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub class: f64,
    pub projective: f64,
    pub pole: f64,
    pub residual: f64,
    pub band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            class: CLASS,
            projective: PROJECTIVE,
            pole: POLE,
            residual: RESIDUAL,
            band: BAND,
        }
    }
}

impl Tolerances {
    /// Defaults with the stratum threshold replaced.
    pub fn with_class(class: f64) -> Self {
        Self {
            class,
            ..Self::default()
        }
    }
}
