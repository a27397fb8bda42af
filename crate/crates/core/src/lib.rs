//! Entanglement strata and coordinate charts for pure states of two qubits.
//!
//! A state is classified by its concurrence into one of three strata, and
//! each stratum gets its own explicit coordinates:
//!
//! * unentangled: a pair of Bloch points ([`extremes::BlochPair`]),
//! * partially entangled: concurrence angle plus a point of a circle bundle
//!   over two Bloch spheres, written in one of four charts
//!   ([`bundle::BundleCoords`]),
//! * fully entangled: a rotation in SO(3) ([`extremes::AxisAngleRotation`]).
//!
//! [`dynamics`] turns a unitary evolution into a continuous coordinate
//! trajectory, switching charts when needed.

pub mod bundle;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod extremes;
pub mod linalg;
pub mod sampling;
pub mod tolerance;
pub mod verify;
pub mod wire;

pub use bundle::{extract, reconstruct, transition, BundleCoords, Chart};
pub use entanglement::{classify, classify_with, concurrence, schmidt, standard_state, EntanglementClass, Stratum};
pub use error::{Error, Result};
pub use linalg::{fidelity, BlochPoint, LocalUnitaryPair, SingleQubitUnitary, TwoQubitState};
pub use tolerance::Tolerances;
