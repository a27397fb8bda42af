use thiserror::Error;

use crate::bundle::Chart;
use crate::entanglement::Stratum;

/// Errors raised by the state-space maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: amplitudes have zero norm")]
    DegenerateState,

    #[error("degenerate ket: single-qubit amplitudes have zero norm")]
    DegenerateKet,

    #[error("axis is not a unit vector (norm {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("eta = {eta} outside [0, pi/2]")]
    EtaOutOfRange { eta: f64 },

    #[error("non-finite coordinate value")]
    NonFinite,

    #[error("chart domain violation: qubit {qubit} at theta = {theta} is outside chart {chart}")]
    ChartDomainViolation { chart: Chart, qubit: u8, theta: f64 },

    #[error("base point is not in the overlap of charts {source_chart} and {target}")]
    NotInOverlap { source_chart: Chart, target: Chart },

    #[error("not a product state (stratum {found})")]
    NotProductState { found: Stratum },

    #[error("not a partially entangled state (stratum {found})")]
    NotPartiallyEntangled { found: Stratum },

    #[error("not a fully entangled state (stratum {found})")]
    NotFullyEntangled { found: Stratum },

    #[error("internal consistency error: chart residual has off-support weight {weight:e}")]
    ResidualMismatch { weight: f64 },

    #[error("generator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(&'static str),

    #[error("norm drift {drift:e} exceeds tolerance")]
    NormDrift { drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
