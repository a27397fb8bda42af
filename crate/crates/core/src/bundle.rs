//! Coordinates on the partially entangled stratum.
//!
//! For fixed concurrence the states form a circle bundle over two Bloch
//! spheres. Each sphere is covered by two patches, `N` (south pole deleted)
//! and `S` (north pole deleted), which gives four product charts. In chart
//! `ij` a state is written
//!
//! ```text
//! NN:  T_N(q1) e^{-i sz g/2}           (x) T_N(q2)            |psi0(eta)>
//! NS:  T_N(q1) e^{-i sz g/2}           (x) T_S(q2) e^{-i sy pi/2} |psi0(eta)>
//! SN:  T_S(q1) e^{+i sz g/2} e^{-i sy pi/2} (x) T_N(q2)       |psi0(eta)>
//! SS:  T_S(q1) e^{+i sz g/2} e^{-i sy pi/2} (x) T_S(q2) e^{-i sy pi/2} |psi0(eta)>
//! ```
//!
//! and fibre coordinates of the same state in two charts differ by a
//! `U(1)` transition factor built from `e^{2 i phi_1}` and `e^{2 i phi_2}`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entanglement::{classify_with, schmidt, standard_state, Stratum};
use crate::error::{Error, Result};
use crate::linalg::{
    bloch_point_of_ket, c, rz, ry, wrap_signed, BlochPoint, LocalUnitaryPair, Mat2,
    SingleQubitUnitary, TwoQubitState, C64,
};
use crate::tolerance::Tolerances;

/// Patch of a single Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hemisphere {
    /// Sphere minus the south pole.
    North,
    /// Sphere minus the north pole.
    South,
}

impl Hemisphere {
    /// Patch centred on the hemisphere containing `point` (`z >= 0` is north).
    pub fn containing(point: &BlochPoint) -> Self {
        if point.theta() <= PI / 2.0 {
            Hemisphere::North
        } else {
            Hemisphere::South
        }
    }

    /// Whether `theta` stays at least `pole` away from the deleted pole.
    pub fn contains(&self, theta: f64, pole: f64) -> bool {
        match self {
            Hemisphere::North => theta <= PI - pole,
            Hemisphere::South => theta >= pole,
        }
    }

    fn letter(&self) -> char {
        match self {
            Hemisphere::North => 'N',
            Hemisphere::South => 'S',
        }
    }
}

/// One of the four product charts on the base `S^2 x S^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    NN,
    NS,
    SN,
    SS,
}

impl Chart {
    pub const ALL: [Chart; 4] = [Chart::NN, Chart::NS, Chart::SN, Chart::SS];

    pub fn from_hemispheres(first: Hemisphere, second: Hemisphere) -> Self {
        use Hemisphere::*;
        match (first, second) {
            (North, North) => Chart::NN,
            (North, South) => Chart::NS,
            (South, North) => Chart::SN,
            (South, South) => Chart::SS,
        }
    }

    pub fn first(&self) -> Hemisphere {
        match self {
            Chart::NN | Chart::NS => Hemisphere::North,
            Chart::SN | Chart::SS => Hemisphere::South,
        }
    }

    pub fn second(&self) -> Hemisphere {
        match self {
            Chart::NN | Chart::SN => Hemisphere::North,
            Chart::NS | Chart::SS => Hemisphere::South,
        }
    }

    /// Chart whose patches are centred on the hemispheres of the two points.
    pub fn select(p1: &BlochPoint, p2: &BlochPoint) -> Self {
        Self::from_hemispheres(Hemisphere::containing(p1), Hemisphere::containing(p2))
    }

    /// Checks the chart domain, reporting the first offending qubit.
    pub fn check_domain(&self, theta1: f64, theta2: f64, pole: f64) -> Result<()> {
        for (qubit, half, theta) in [(1u8, self.first(), theta1), (2, self.second(), theta2)] {
            if !half.contains(theta, pole) {
                return Err(Error::ChartDomainViolation {
                    chart: *self,
                    qubit,
                    theta,
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, theta1: f64, theta2: f64, pole: f64) -> bool {
        self.check_domain(theta1, theta2, pole).is_ok()
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first().letter(), self.second().letter())
    }
}

impl FromStr for Chart {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "NN" => Ok(Chart::NN),
            "NS" => Ok(Chart::NS),
            "SN" => Ok(Chart::SN),
            "SS" => Ok(Chart::SS),
            other => Err(format!("unknown chart {other:?}")),
        }
    }
}

/// `T_N(theta, phi) = e^{-i sz phi/2} e^{-i sy theta/2} e^{i sz phi/2}`.
///
/// Maps `|+>` to the Bloch ket at `(theta, phi)` up to phase; smooth away
/// from the south pole.
pub fn t_north(theta: f64, phi: f64) -> SingleQubitUnitary {
    SingleQubitUnitary::from_unitary(rz(phi) * ry(theta) * rz(-phi))
}

/// `T_S(theta, phi) = e^{-i sz phi/2} e^{-i sy (theta - pi)/2} e^{i sz phi/2}`.
///
/// Maps `|->` to the Bloch ket at `(theta, phi)` up to phase; smooth away
/// from the north pole.
pub fn t_south(theta: f64, phi: f64) -> SingleQubitUnitary {
    SingleQubitUnitary::from_unitary(rz(phi) * ry(theta - PI) * rz(-phi))
}

fn patch_operator(half: Hemisphere, theta: f64, phi: f64) -> Mat2 {
    match half {
        Hemisphere::North => *t_north(theta, phi).matrix(),
        Hemisphere::South => *t_south(theta, phi).matrix(),
    }
}

/// Fixed factor to the right of the patch operator: `I` on north slots,
/// `e^{-i sy pi/2}` on south slots.
fn slot_flip(half: Hemisphere) -> Mat2 {
    match half {
        Hemisphere::North => Mat2::IDENTITY,
        Hemisphere::South => ry(PI),
    }
}

/// Sign `s` in the fibre factor `e^{-i s sz gamma/2}` on qubit 1.
fn fibre_sign(half: Hemisphere) -> f64 {
    match half {
        Hemisphere::North => 1.0,
        Hemisphere::South => -1.0,
    }
}

/// Coordinates `(eta, theta1, phi1, theta2, phi2, gamma)` in a named chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleCoords {
    pub chart: Chart,
    pub eta: f64,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub gamma: f64,
}

impl BundleCoords {
    /// Number of real parameters carried.
    pub const PARAMETERS: usize = 6;

    pub fn real_parameters(&self) -> [f64; Self::PARAMETERS] {
        [self.eta, self.theta1, self.phi1, self.theta2, self.phi2, self.gamma]
    }

    pub fn base1(&self) -> Result<BlochPoint> {
        BlochPoint::new(self.theta1, self.phi1)
    }

    pub fn base2(&self) -> Result<BlochPoint> {
        BlochPoint::new(self.theta2, self.phi2)
    }

    /// `e^{i gamma}`.
    pub fn fibre_phase(&self) -> C64 {
        C64::from_polar(1.0, self.gamma)
    }

    /// The local operator pair that carries `|psi0(eta)>` to this state.
    pub fn local_operators(&self) -> LocalUnitaryPair {
        let (h1, h2) = (self.chart.first(), self.chart.second());
        let u1 = patch_operator(h1, self.theta1, self.phi1)
            * rz(fibre_sign(h1) * self.gamma)
            * slot_flip(h1);
        let u2 = patch_operator(h2, self.theta2, self.phi2) * slot_flip(h2);
        LocalUnitaryPair::new(
            SingleQubitUnitary::from_unitary(u1),
            SingleQubitUnitary::from_unitary(u2),
        )
    }

    fn validate(&self, pole: f64) -> Result<()> {
        if !self.real_parameters().iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(0.0..=PI / 2.0).contains(&self.eta) {
            return Err(Error::EtaOutOfRange { eta: self.eta });
        }
        for (qubit, theta) in [(1u8, self.theta1), (2, self.theta2)] {
            if !(0.0..=PI).contains(&theta) {
                return Err(Error::ChartDomainViolation {
                    chart: self.chart,
                    qubit,
                    theta,
                });
            }
        }
        self.chart.check_domain(self.theta1, self.theta2, pole)
    }
}

/// Evaluates the chart formula for `coords`.
pub fn reconstruct(coords: &BundleCoords) -> Result<TwoQubitState> {
    reconstruct_with(coords, &Tolerances::default())
}

pub fn reconstruct_with(coords: &BundleCoords, tol: &Tolerances) -> Result<TwoQubitState> {
    coords.validate(tol.pole)?;
    let psi0 = standard_state(coords.eta)?;
    let out = crate::linalg::apply_local(&coords.local_operators(), &psi0);
    TwoQubitState::new(*out.amplitudes())
}

/// Bloch points of the dominant Schmidt kets of qubit 1 and qubit 2.
pub fn base_points(state: &TwoQubitState) -> Result<(BlochPoint, BlochPoint)> {
    let data = schmidt(state);
    Ok((
        bloch_point_of_ket(&data.basis1[0])?,
        bloch_point_of_ket(&data.basis2[0])?,
    ))
}

/// Coordinates of a partially entangled state in the chart centred on its
/// base point.
pub fn extract(state: &TwoQubitState) -> Result<BundleCoords> {
    extract_with(state, None, &Tolerances::default())
}

/// Coordinates of a partially entangled state in a prescribed chart.
pub fn extract_in_chart(state: &TwoQubitState, chart: Chart) -> Result<BundleCoords> {
    extract_with(state, Some(chart), &Tolerances::default())
}

/// Inverse of [`reconstruct`]. With `chart = None` the chart is picked per
/// qubit from the hemisphere of its base point.
pub fn extract_with(
    state: &TwoQubitState,
    chart: Option<Chart>,
    tol: &Tolerances,
) -> Result<BundleCoords> {
    let class = classify_with(state, tol.class);
    if class.stratum != Stratum::Partial {
        return Err(Error::NotPartiallyEntangled {
            found: class.stratum,
        });
    }
    let (p1, p2) = base_points(state)?;
    let chart = chart.unwrap_or_else(|| Chart::select(&p1, &p2));
    chart.check_domain(p1.theta(), p2.theta(), tol.pole)?;

    let (h1, h2) = (chart.first(), chart.second());
    let outer1 = patch_operator(h1, p1.theta(), p1.phi());
    let outer2 = patch_operator(h2, p2.theta(), p2.phi());
    let strip = LocalUnitaryPair::new(
        SingleQubitUnitary::from_unitary(outer1.adjoint()),
        SingleQubitUnitary::from_unitary(outer2.adjoint()),
    );
    let residual = *crate::linalg::apply_local(&strip, state).amplitudes();

    // (K1 (x) K2)|psi0> with gamma = 0.
    let inner = LocalUnitaryPair::new(
        SingleQubitUnitary::from_unitary(slot_flip(h1)),
        SingleQubitUnitary::from_unitary(slot_flip(h2)),
    );
    let base = *crate::linalg::apply_local(&inner, &standard_state(class.eta)?).amplitudes();

    // The base is supported on one index with qubit-1 bit 0 and one with bit 1.
    let support = |bit: usize| -> usize {
        let (a, b) = (2 * bit, 2 * bit + 1);
        if base[a].norm() >= base[b].norm() {
            a
        } else {
            b
        }
    };
    let (p, q) = (support(0), support(1));
    let off: f64 = (0..4)
        .filter(|&k| k != p && k != q)
        .map(|k| residual[k].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if off > tol.residual {
        return Err(Error::ResidualMismatch { weight: off });
    }

    // The fibre factor multiplies bit-0 amplitudes by e^{-i s g/2} and bit-1
    // amplitudes by e^{+i s g/2}.
    let sign_b = if base[p].re * base[q].re < 0.0 { -1.0 } else { 1.0 };
    let rel = residual[q] * residual[p].conj() * sign_b;
    let gamma = if rel.norm() == 0.0 {
        0.0
    } else {
        wrap_signed(fibre_sign(h1) * rel.arg())
    };

    Ok(BundleCoords {
        chart,
        eta: class.eta,
        theta1: p1.theta(),
        phi1: p1.phi(),
        theta2: p2.theta(),
        phi2: p2.phi(),
        gamma,
    })
}

/// The four published transition rules, named by which hemisphere labels change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionRule {
    /// `t_{NN,SN} = t_{NS,SS} = e^{2 i phi1}`.
    FirstFlip,
    /// `t_{NN,NS} = t_{SN,SS} = e^{2 i phi2}`.
    SecondFlip,
    /// `t_{NN,SS} = e^{2 i phi1} e^{2 i phi2}`.
    BothAligned,
    /// `t_{NS,SN} = e^{2 i phi1} e^{-2 i phi2}`.
    BothCrossed,
}

impl TransitionRule {
    pub const ALL: [TransitionRule; 4] = [
        TransitionRule::FirstFlip,
        TransitionRule::SecondFlip,
        TransitionRule::BothAligned,
        TransitionRule::BothCrossed,
    ];
}

/// Multiples of `(phi1, phi2)` in the exponent of each transition rule.
///
/// The published table is the only one used in production; the other
/// constructors exist to build deliberately broken tables for mutation checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionTable {
    first_flip: [f64; 2],
    second_flip: [f64; 2],
    both_aligned: [f64; 2],
    both_crossed: [f64; 2],
}

impl Default for TransitionTable {
    fn default() -> Self {
        Self::published()
    }
}

impl TransitionTable {
    pub const fn published() -> Self {
        Self {
            first_flip: [2.0, 0.0],
            second_flip: [0.0, 2.0],
            both_aligned: [2.0, 2.0],
            both_crossed: [2.0, -2.0],
        }
    }

    /// Copy with the exponent of one rule negated.
    pub fn with_flipped_sign(mut self, rule: TransitionRule) -> Self {
        let slot = match rule {
            TransitionRule::FirstFlip => &mut self.first_flip,
            TransitionRule::SecondFlip => &mut self.second_flip,
            TransitionRule::BothAligned => &mut self.both_aligned,
            TransitionRule::BothCrossed => &mut self.both_crossed,
        };
        *slot = slot.map(|k| -k);
        self
    }

    /// `t_{a,b}` at longitudes `(phi1, phi2)`: `e^{i gamma_a} = t_{a,b} e^{i gamma_b}`.
    /// Rules are listed for one ordering; the reverse ordering is the conjugate.
    pub fn factor(&self, a: Chart, b: Chart, phi1: f64, phi2: f64) -> C64 {
        use Chart::*;
        let (exps, conj) = match (a, b) {
            _ if a == b => return c(1.0, 0.0),
            (NN, SN) | (NS, SS) => (self.first_flip, false),
            (SN, NN) | (SS, NS) => (self.first_flip, true),
            (NN, NS) | (SN, SS) => (self.second_flip, false),
            (NS, NN) | (SS, SN) => (self.second_flip, true),
            (NN, SS) => (self.both_aligned, false),
            (SS, NN) => (self.both_aligned, true),
            (NS, SN) => (self.both_crossed, false),
            (SN, NS) => (self.both_crossed, true),
            _ => unreachable!("diagonal handled above"),
        };
        let angle = exps[0] * phi1 + exps[1] * phi2;
        C64::from_polar(1.0, if conj { -angle } else { angle })
    }
}

/// A structure-group element relating the fibre coordinates of two charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFactor {
    pub value: C64,
    pub source: Chart,
    pub target: Chart,
}

impl TransitionFactor {
    /// `e^{i gamma_target} = value * e^{i gamma_source}`.
    pub fn between(source: Chart, target: Chart, phi1: f64, phi2: f64) -> Self {
        Self {
            value: TransitionTable::published().factor(target, source, phi1, phi2),
            source,
            target,
        }
    }
}

/// Re-expresses `coords` in `target`; base point and `eta` are unchanged.
pub fn transition(coords: &BundleCoords, target: Chart) -> Result<BundleCoords> {
    transition_with(
        &TransitionTable::published(),
        coords,
        target,
        &Tolerances::default(),
    )
}

pub fn transition_with(
    table: &TransitionTable,
    coords: &BundleCoords,
    target: Chart,
    tol: &Tolerances,
) -> Result<BundleCoords> {
    let in_both = coords.chart.contains(coords.theta1, coords.theta2, tol.pole)
        && target.contains(coords.theta1, coords.theta2, tol.pole);
    if !in_both {
        return Err(Error::NotInOverlap {
            source_chart: coords.chart,
            target,
        });
    }
    let t = table.factor(target, coords.chart, coords.phi1, coords.phi2);
    Ok(BundleCoords {
        chart: target,
        gamma: wrap_signed(coords.gamma + t.arg()),
        ..*coords
    })
}
