//! Coordinates for the two boundary strata.
//!
//! Product states are a pair of Bloch points. Maximally entangled states are
//! in one-to-one correspondence with rotations: the rotation `R(n, phi)`
//! labels `(e^{-i n.sigma phi/2} (x) I) |singlet>`, and `+U`, `-U` give the
//! same ray.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::entanglement::{classify_with, schmidt, Stratum};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_local, bloch_point_of_ket, c, coefficient_matrix, su2_from_axis_angle, BlochPoint,
    LocalUnitaryPair, Mat2, SingleQubitUnitary, TwoQubitState,
};
use crate::tolerance::{self, Tolerances};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlochPoint {
    theta: f64,
    phi: f64,
}

impl Serialize for BlochPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawBlochPoint {
            theta: self.theta(),
            phi: self.phi(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlochPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawBlochPoint::deserialize(d)?;
        BlochPoint::new(raw.theta, raw.phi).map_err(serde::de::Error::custom)
    }
}

/// Coordinates of a product state: one Bloch point per qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochPair {
    #[serde(rename = "q1")]
    pub p1: BlochPoint,
    #[serde(rename = "q2")]
    pub p2: BlochPoint,
}

impl BlochPair {
    pub const PARAMETERS: usize = 4;

    pub fn real_parameters(&self) -> [f64; Self::PARAMETERS] {
        [self.p1.theta(), self.p1.phi(), self.p2.theta(), self.p2.phi()]
    }
}

/// Rank-one factorization of a product state.
pub fn factor_unentangled(state: &TwoQubitState) -> Result<BlochPair> {
    factor_unentangled_with(state, &Tolerances::default())
}

pub fn factor_unentangled_with(state: &TwoQubitState, tol: &Tolerances) -> Result<BlochPair> {
    let class = classify_with(state, tol.class);
    if class.stratum != Stratum::Unentangled {
        return Err(Error::NotProductState {
            found: class.stratum,
        });
    }
    let data = schmidt(state);
    Ok(BlochPair {
        p1: bloch_point_of_ket(&data.basis1[0])?,
        p2: bloch_point_of_ket(&data.basis2[0])?,
    })
}

/// Tensor product of the two Bloch kets.
pub fn compose_unentangled(pair: &BlochPair) -> TwoQubitState {
    let (a, b) = (pair.p1.ket(), pair.p2.ket());
    TwoQubitState::product(&a, &b).expect("Bloch kets are unit vectors")
}

/// A rotation by `angle` in `[0, pi]` about the unit vector `axis`.
///
/// Canonical form: at angle zero the axis is `z`; at angle `pi` the first
/// axis component larger than `1e-9` in magnitude is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRotation")]
pub struct AxisAngleRotation {
    axis: [f64; 3],
    angle: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRotation {
    axis: [f64; 3],
    angle: f64,
}

impl TryFrom<RawRotation> for AxisAngleRotation {
    type Error = Error;

    fn try_from(raw: RawRotation) -> Result<Self> {
        AxisAngleRotation::new(raw.axis, raw.angle)
    }
}

/// Angles this close to `0` or `pi` are snapped to the endpoint.
const ANGLE_SNAP: f64 = 1e-12;

impl AxisAngleRotation {
    pub const PARAMETERS: usize = 3;

    pub fn identity() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        }
    }

    /// Any finite angle is accepted and reduced into `[0, pi]`, flipping the
    /// axis when needed.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tolerance::AXIS_NORM {
            return Err(Error::NonUnitAxis { norm });
        }
        if !angle.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut axis = axis.map(|x| x / norm);
        let mut angle = angle.rem_euclid(TAU);
        if angle > PI {
            axis = axis.map(|x| -x);
            angle = TAU - angle;
        }
        Ok(Self::canonical(axis, angle))
    }

    fn canonical(axis: [f64; 3], angle: f64) -> Self {
        if angle <= ANGLE_SNAP {
            return Self::identity();
        }
        if PI - angle <= ANGLE_SNAP {
            let lead = axis
                .iter()
                .copied()
                .find(|x| x.abs() > 1e-9)
                .unwrap_or(1.0);
            let axis = if lead < 0.0 { axis.map(|x| -x) } else { axis };
            return Self { axis, angle: PI };
        }
        Self { axis, angle }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn real_parameters(&self) -> [f64; Self::PARAMETERS] {
        // Rotation vector: 3 reals.
        self.axis.map(|x| x * self.angle)
    }

    /// Unit quaternion `(cos(angle/2), sin(angle/2) axis)`; the SU(2) lift
    /// with non-negative scalar part.
    pub fn quaternion(&self) -> [f64; 4] {
        let (s, co) = (self.angle / 2.0).sin_cos();
        [co, s * self.axis[0], s * self.axis[1], s * self.axis[2]]
    }

    pub fn su2(&self) -> SingleQubitUnitary {
        su2_from_axis_angle(self.axis, self.angle).expect("axis is unit by construction")
    }

    /// Angle of the relative rotation `self^{-1} other`, in `[0, pi]`.
    pub fn distance(&self, other: &AxisAngleRotation) -> f64 {
        let (a, b) = (self.quaternion(), other.quaternion());
        let diff = |sign: f64| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| (x - sign * y).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let chord = diff(1.0).min(diff(-1.0));
        4.0 * (chord / 2.0).min(1.0).asin()
    }
}

/// `(R (x) I) |singlet>` for the SU(2) lift `R` of `rot`.
pub fn state_from_rotation(rot: &AxisAngleRotation) -> TwoQubitState {
    let pair = LocalUnitaryPair::new(rot.su2(), SingleQubitUnitary::IDENTITY);
    apply_local(&pair, &TwoQubitState::singlet())
}

/// Inverse of [`state_from_rotation`] on the fully entangled stratum.
pub fn rotation_from_state(state: &TwoQubitState) -> Result<AxisAngleRotation> {
    rotation_from_state_with(state, &Tolerances::default())
}

pub fn rotation_from_state_with(
    state: &TwoQubitState,
    tol: &Tolerances,
) -> Result<AxisAngleRotation> {
    let class = classify_with(state, tol.class);
    if class.stratum != Stratum::Full {
        return Err(Error::NotFullyEntangled {
            found: class.stratum,
        });
    }
    // The singlet's coefficient matrix is (1/sqrt 2)[[0, 1], [-1, 0]].
    let r2 = std::f64::consts::SQRT_2;
    let singlet_inv = Mat2::new(c(0.0, 0.0), c(-r2, 0.0), c(r2, 0.0), c(0.0, 0.0));
    let u0 = coefficient_matrix(state) * singlet_inv;
    let root = u0.det().sqrt();
    let u = u0.scale(root.inv()).0;

    // u = q0 I - i (q . sigma); project onto that form and renormalize.
    let mut q = [
        (u[0][0].re + u[1][1].re) / 2.0,
        -(u[0][1].im + u[1][0].im) / 2.0,
        (u[1][0].re - u[0][1].re) / 2.0,
        (u[1][1].im - u[0][0].im) / 2.0,
    ];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q = q.map(|x| x / n);
    if q[0] < 0.0 {
        q = q.map(|x| -x);
    }
    let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if v == 0.0 {
        return Ok(AxisAngleRotation::identity());
    }
    let angle = 2.0 * v.atan2(q[0]);
    Ok(AxisAngleRotation::canonical(
        [q[1] / v, q[2] / v, q[3] / v],
        angle,
    ))
}

/// One row of the Bell table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellEntry {
    pub name: &'static str,
    pub rotation: AxisAngleRotation,
    pub state: TwoQubitState,
}

const BELL_NAMES: [(&str, [f64; 4]); 4] = [
    ("psi-minus", [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]),
    ("phi-minus", [FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]),
    ("phi-plus", [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]),
    ("psi-plus", [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]),
];

/// The identity and the half-turns about `x`, `y`, `z`, with the states they
/// label. Each row is named after the textbook Bell state it matches.
pub fn bell_table() -> Vec<BellEntry> {
    let rotations = [
        AxisAngleRotation::identity(),
        AxisAngleRotation::new([1.0, 0.0, 0.0], PI).unwrap(),
        AxisAngleRotation::new([0.0, 1.0, 0.0], PI).unwrap(),
        AxisAngleRotation::new([0.0, 0.0, 1.0], PI).unwrap(),
    ];
    rotations
        .into_iter()
        .map(|rotation| {
            let state = state_from_rotation(&rotation);
            let name = BELL_NAMES
                .iter()
                .map(|(name, amps)| {
                    let bell = TwoQubitState::from_real(*amps).expect("unit vector");
                    (*name, crate::linalg::fidelity(&bell, &state))
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(name, _)| name)
                .expect("table is nonempty");
            BellEntry {
                name,
                rotation,
                state,
            }
        })
        .collect()
}
