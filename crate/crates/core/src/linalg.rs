//! Small dense complex algebra for one and two qubits.
//!
//! Basis order for two qubits is `(++, +-, -+, --)`, with `|+>` the first
//! component of each single-qubit ket (the sigma_z = +1 eigenstate). The
//! amplitude of `|i j>` lives at index `2 i + j`.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;

/// Amplitudes of a single qubit, `(c_+, c_-)`.
pub type QubitKet = [C64; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const SIGMA_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Mat2 = Mat2([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, ket: &QubitKet) -> QubitKet {
        let m = &self.0;
        [
            m[0][0] * ket[0] + m[0][1] * ket[1],
            m[1][0] * ket[0] + m[1][1] * ket[1],
        ]
    }

    /// Inverse of a nonsingular matrix; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        let inv = d.inv();
        Some(Mat2([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ]))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `M^dagger M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// `exp(-i sigma_z angle / 2)`.
pub fn rz(angle: f64) -> Mat2 {
    let h = angle / 2.0;
    Mat2::new(C64::from_polar(1.0, -h), ZERO, ZERO, C64::from_polar(1.0, h))
}

/// `exp(-i sigma_y angle / 2)`, a real rotation matrix.
pub fn ry(angle: f64) -> Mat2 {
    let (s, co) = (angle / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// A 2x2 unitary acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitUnitary(Mat2);

impl SingleQubitUnitary {
    pub const IDENTITY: SingleQubitUnitary = SingleQubitUnitary(Mat2::IDENTITY);

    /// Checked constructor; rejects matrices with `|U^dagger U - I| > 1e-10`.
    pub fn new(m: Mat2) -> Option<Self> {
        (m.unitarity_defect() <= 1e-10).then_some(Self(m))
    }

    /// Wraps a matrix already known to be unitary by construction.
    pub(crate) fn from_unitary(m: Mat2) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn apply(&self, ket: &QubitKet) -> QubitKet {
        self.0.apply(ket)
    }

    pub fn then(&self, after: &SingleQubitUnitary) -> Self {
        Self(after.0 * self.0)
    }
}

impl Mul for SingleQubitUnitary {
    type Output = SingleQubitUnitary;

    fn mul(self, rhs: SingleQubitUnitary) -> SingleQubitUnitary {
        SingleQubitUnitary(self.0 * rhs.0)
    }
}

/// One unitary per qubit; acts as `u1 (x) u2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUnitaryPair {
    pub u1: SingleQubitUnitary,
    pub u2: SingleQubitUnitary,
}

impl LocalUnitaryPair {
    pub fn new(u1: SingleQubitUnitary, u2: SingleQubitUnitary) -> Self {
        Self { u1, u2 }
    }

    pub fn identity() -> Self {
        Self::new(SingleQubitUnitary::IDENTITY, SingleQubitUnitary::IDENTITY)
    }
}

/// A normalized pure state of two qubits.
///
/// Only the ray is physical: two values with fidelity one describe the same
/// state even when their amplitudes differ by a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [C64; 4],
}

impl TwoQubitState {
    /// Normalizes `amps`. Fails on a zero (or non-finite) norm.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        normalize(amps)
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|x| c(x, 0.0)))
    }

    pub(crate) fn from_normalized(amps: [C64; 4]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    /// Computational product state `|i j>` with `i, j` in `{0 (+), 1 (-)}`.
    pub fn basis(i: usize, j: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[2 * i + j] = ONE;
        Self { amps }
    }

    /// `(|+-> - |-+>) / sqrt 2`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: [ZERO, c(h, 0.0), c(-h, 0.0), ZERO],
        }
    }

    /// Tensor product `a (x) b` of two single-qubit kets.
    pub fn product(a: &QubitKet, b: &QubitKet) -> Result<Self> {
        Self::new([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub fn inner(&self, other: &TwoQubitState) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `1 - fidelity`, the projective distance used in tests and reports.
    pub fn deviation(&self, other: &TwoQubitState) -> f64 {
        (1.0 - fidelity(self, other)).max(0.0)
    }

    pub fn same_ray(&self, other: &TwoQubitState, tol: f64) -> bool {
        self.deviation(other) <= tol
    }
}

/// Rescales to unit norm.
pub fn normalize(amps: [C64; 4]) -> Result<TwoQubitState> {
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok(TwoQubitState {
        amps: amps.map(|a| a / n),
    })
}

/// Transition probability `|<a|b>|^2`.
pub fn fidelity(a: &TwoQubitState, b: &TwoQubitState) -> f64 {
    a.inner(b).norm_sqr().min(1.0)
}

/// `(u1 (x) u2) |state>`.
pub fn apply_local(pair: &LocalUnitaryPair, state: &TwoQubitState) -> TwoQubitState {
    let a = pair.u1.matrix().0;
    let b = pair.u2.matrix().0;
    let s = state.amps;
    let mut out = [ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    acc += a[i][k] * b[j][l] * s[2 * k + l];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    TwoQubitState { amps: out }
}

/// `exp(-i (n . sigma) angle / 2)`, the SU(2) lift of a counterclockwise
/// rotation by `angle` about `axis`.
pub fn su2_from_axis_angle(axis: [f64; 3], angle: f64) -> Result<SingleQubitUnitary> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > tolerance::AXIS_NORM || !angle.is_finite() {
        return Err(Error::NonUnitAxis { norm });
    }
    let [x, y, z] = axis.map(|v| v / norm);
    let (s, co) = (angle / 2.0).sin_cos();
    Ok(SingleQubitUnitary(Mat2::new(
        c(co, -s * z),
        c(-s * y, -s * x),
        c(s * y, -s * x),
        c(co, s * z),
    )))
}

/// Reshape of the amplitudes into `M[i][j] = c_ij`, qubit 1 indexing rows.
pub fn coefficient_matrix(state: &TwoQubitState) -> Mat2 {
    let a = state.amps;
    Mat2::new(a[0], a[1], a[2], a[3])
}

/// Inverse of [`coefficient_matrix`].
pub fn state_from_coefficients(m: &Mat2) -> Result<TwoQubitState> {
    TwoQubitState::new([m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]])
}

/// A point on the Bloch sphere in polar angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    pub const NORTH: BlochPoint = BlochPoint { theta: 0.0, phi: 0.0 };
    pub const SOUTH: BlochPoint = BlochPoint { theta: PI, phi: 0.0 };

    /// Builds a point from polar angles. `theta` must lie in `[0, pi]`
    /// (a rounding overshoot is clamped); `phi` is wrapped into `[0, 2 pi)`
    /// and zeroed at the poles.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::NonFinite);
        }
        Ok(Self::canonical(theta.clamp(0.0, PI), phi))
    }

    fn canonical(theta: f64, phi: f64) -> Self {
        if theta <= tolerance::POLAR_SNAP || PI - theta <= tolerance::POLAR_SNAP {
            return Self { theta, phi: 0.0 };
        }
        Self {
            theta,
            phi: wrap_positive(phi),
        }
    }

    /// Direction of a nonzero 3-vector.
    pub fn from_cartesian(v: [f64; 3]) -> Option<Self> {
        let rho = v[0].hypot(v[1]);
        if rho == 0.0 && v[2] == 0.0 {
            return None;
        }
        let theta = rho.atan2(v[2]);
        Some(Self::canonical(theta, v[1].atan2(v[0])))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `(cos(theta/2), e^{i phi} sin(theta/2))`.
    pub fn ket(&self) -> QubitKet {
        let (s, co) = (self.theta / 2.0).sin_cos();
        [c(co, 0.0), C64::from_polar(s, self.phi)]
    }

    /// Great-circle angle to another point.
    pub fn angle_to(&self, other: &BlochPoint) -> f64 {
        let a = self.cartesian();
        let b = other.cartesian();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        cn.atan2(dot)
    }
}

/// Bloch point of a nonzero single-qubit ket (global phase ignored).
pub fn bloch_point_of_ket(ket: &QubitKet) -> Result<BlochPoint> {
    let (a, b) = (ket[0].norm(), ket[1].norm());
    if !(a.is_finite() && b.is_finite()) || (a == 0.0 && b == 0.0) {
        return Err(Error::DegenerateKet);
    }
    let theta = 2.0 * b.atan2(a);
    let phi = if a == 0.0 || b == 0.0 {
        0.0
    } else {
        (ket[1] * ket[0].conj()).arg()
    };
    Ok(BlochPoint::canonical(theta, phi))
}

/// Wraps into `[0, 2 pi)`.
pub fn wrap_positive(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps into `(-pi, pi]`.
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_positive(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}
