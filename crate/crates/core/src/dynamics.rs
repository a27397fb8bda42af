//! Unitary evolution and continuous coordinate trajectories.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::bundle::{base_points, extract_with, BundleCoords, Chart, Hemisphere, TransitionTable};
use crate::entanglement::{concurrence, Stratum};
use crate::error::{Error, Result};
use crate::extremes::{
    factor_unentangled_with, rotation_from_state_with, AxisAngleRotation, BlochPair,
};
use crate::linalg::{c, wrap_signed, BlochPoint, Mat2, TwoQubitState, C64};
use crate::tolerance::{self, Tolerances};

/// Time-independent Hamiltonian on two qubits (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianGenerator {
    m: [[C64; 4]; 4],
}

impl HermitianGenerator {
    pub fn new(m: [[C64; 4]; 4]) -> Result<Self> {
        let mut deviation: f64 = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !(x.re.is_finite() && x.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                deviation = deviation.max((x - m[j][i].conj()).norm());
            }
        }
        if deviation > tolerance::HERMITIAN {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { m })
    }

    pub fn zero() -> Self {
        Self {
            m: [[c(0.0, 0.0); 4]; 4],
        }
    }

    /// `A (x) I + I (x) B`.
    pub fn local(a: &Mat2, b: &Mat2) -> Result<Self> {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let id_jl = if j == l { 1.0 } else { 0.0 };
                        let id_ik = if i == k { 1.0 } else { 0.0 };
                        m[2 * i + j][2 * k + l] = a.0[i][k] * id_jl + b.0[j][l] * id_ik;
                    }
                }
            }
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &[[C64; 4]; 4] {
        &self.m
    }
}

/// `exp(-i H tau)` through the spectral decomposition of `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vector4<f64>,
    modes: Matrix4<C64>,
}

impl Propagator {
    pub fn new(h: &HermitianGenerator) -> Self {
        let m = Matrix4::from_fn(|i, j| h.m[i][j]);
        let eig = SymmetricEigen::new(m);
        Self {
            energies: eig.eigenvalues,
            modes: eig.eigenvectors,
        }
    }

    /// Unnormalized `exp(-i H tau) amps`.
    pub fn apply(&self, amps: &[C64; 4], tau: f64) -> [C64; 4] {
        let v = Vector4::from_column_slice(amps);
        let mut coeffs = self.modes.adjoint() * v;
        for (k, x) in coeffs.iter_mut().enumerate() {
            *x *= C64::from_polar(1.0, -self.energies[k] * tau);
        }
        let out = self.modes * coeffs;
        [out[0], out[1], out[2], out[3]]
    }
}

/// States on the grid `t0, t0 + dt, ...`, closed by `t1`.
///
/// Every state is propagated directly from `initial`, so errors do not
/// accumulate along the grid.
pub fn evolve(
    h: &HermitianGenerator,
    initial: &TwoQubitState,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<(f64, TwoQubitState)>> {
    if !(t0.is_finite() && t1.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidTimeGrid("non-finite time"));
    }
    if dt <= 0.0 {
        return Err(Error::InvalidTimeGrid("dt must be positive"));
    }
    if t1 <= t0 {
        return Err(Error::InvalidTimeGrid("t1 must exceed t0"));
    }
    let prop = Propagator::new(h);
    let steps = ((t1 - t0) / dt * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| t0 + k as f64 * dt).collect();
    match times.last_mut() {
        Some(last) if (t1 - *last).abs() <= 1e-9 * dt => *last = t1,
        _ => times.push(t1),
    }
    times
        .into_iter()
        .map(|t| {
            let amps = prop.apply(initial.amplitudes(), t - t0);
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let drift = (norm - 1.0).abs();
            if drift > tolerance::NORM_DRIFT {
                return Err(Error::NormDrift { drift });
            }
            Ok((t, TwoQubitState::new(amps)?))
        })
        .collect()
}

/// Stratum-appropriate coordinates of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coordinates {
    Unentangled(BlochPair),
    Partial(BundleCoords),
    Full(AxisAngleRotation),
}

impl Coordinates {
    pub fn stratum(&self) -> Stratum {
        match self {
            Coordinates::Unentangled(_) => Stratum::Unentangled,
            Coordinates::Partial(_) => Stratum::Partial,
            Coordinates::Full(_) => Stratum::Full,
        }
    }
}

/// Bookkeeping at a chart change: the fibre coordinate of the same state in
/// the chart that was just left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartSwitch {
    pub from: Chart,
    pub gamma_from: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub stratum: Stratum,
    pub concurrence: f64,
    pub coords: Coordinates,
    /// Set on the first point expressed in a new chart.
    pub chart_switch: Option<ChartSwitch>,
    /// Previous stratum, set on the first point of a new stratum.
    pub stratum_change: Option<Stratum>,
    /// Concurrence lies in the widened band around 0 or 1 but outside the
    /// strict stratum threshold.
    pub near_boundary: bool,
}

impl TrajectoryPoint {
    pub fn chart(&self) -> Option<Chart> {
        match self.coords {
            Coordinates::Partial(k) => Some(k.chart),
            _ => None,
        }
    }
}

/// A chart patch is kept until its qubit's polar angle passes this far
/// towards the deleted pole (`z = -1/2` for `N`, `z = +1/2` for `S`).
pub const CHART_KEEP_THETA: f64 = 2.0 * PI / 3.0;

fn keep_hemisphere(half: Hemisphere, p: &BlochPoint) -> Hemisphere {
    match half {
        Hemisphere::North if p.theta() > CHART_KEEP_THETA => Hemisphere::South,
        Hemisphere::South if p.theta() < PI - CHART_KEEP_THETA => Hemisphere::North,
        kept => kept,
    }
}

/// Coordinatizes a sampled evolution.
///
/// Strata are assigned with the widened band `tol.band`. On the partial
/// stratum each qubit's chart patch is held until the base point crosses
/// [`CHART_KEEP_THETA`], so the chart flips only on genuine hemisphere
/// changes and never chatters near the equator.
pub fn coordinate_trajectory(
    states: &[(f64, TwoQubitState)],
    tol: &Tolerances,
) -> Result<Vec<TrajectoryPoint>> {
    let banded = Tolerances {
        class: tol.band.max(tol.class),
        ..*tol
    };
    let mut out: Vec<TrajectoryPoint> = Vec::with_capacity(states.len());
    for (t, state) in states {
        let conc = concurrence(state);
        let stratum = Stratum::of_concurrence(conc, banded.class);
        let strict = Stratum::of_concurrence(conc, tol.class);
        let prev = out.last();

        let mut chart_switch = None;
        let coords = match stratum {
            Stratum::Unentangled => Coordinates::Unentangled(factor_unentangled_with(state, &banded)?),
            Stratum::Full => Coordinates::Full(rotation_from_state_with(state, &banded)?),
            Stratum::Partial => {
                let (p1, p2) = base_points(state)?;
                let chart = match prev.and_then(TrajectoryPoint::chart) {
                    Some(old) => Chart::from_hemispheres(
                        keep_hemisphere(old.first(), &p1),
                        keep_hemisphere(old.second(), &p2),
                    ),
                    None => Chart::select(&p1, &p2),
                };
                if let Some(old) = prev.and_then(TrajectoryPoint::chart) {
                    if old != chart {
                        let gamma_from = extract_with(state, Some(old), &banded)
                            .ok()
                            .map(|k| k.gamma);
                        chart_switch = Some(ChartSwitch {
                            from: old,
                            gamma_from,
                        });
                    }
                }
                Coordinates::Partial(extract_with(state, Some(chart), &banded)?)
            }
        };
        let stratum_change = prev.filter(|p| p.stratum != stratum).map(|p| p.stratum);
        out.push(TrajectoryPoint {
            t: *t,
            stratum,
            concurrence: conc,
            coords,
            chart_switch,
            stratum_change,
            near_boundary: strict != stratum,
        });
    }
    Ok(out)
}

/// Largest coordinate jumps observed along a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContinuityReport {
    /// Largest step in any within-chart coordinate (radians).
    pub max_step: f64,
    /// Largest `|e^{i gamma_new} - t e^{i gamma_old}|` at a chart switch.
    pub max_switch_error: f64,
    pub chart_switches: usize,
    pub stratum_changes: usize,
}

fn base_step(a: (f64, f64), b: (f64, f64)) -> f64 {
    // theta directly; phi through the great-circle distance, since phi is
    // degenerate at the poles.
    let pa = BlochPoint::new(a.0, a.1);
    let pb = BlochPoint::new(b.0, b.1);
    let arc = match (pa, pb) {
        (Ok(pa), Ok(pb)) => pa.angle_to(&pb),
        _ => f64::INFINITY,
    };
    (a.0 - b.0).abs().max(arc)
}

/// Measures step sizes between consecutive points of the same stratum and
/// checks each chart switch against the published transition factors.
pub fn continuity(points: &[TrajectoryPoint]) -> ContinuityReport {
    let table = TransitionTable::published();
    let mut report = ContinuityReport::default();
    for pair in points.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if cur.stratum_change.is_some() {
            report.stratum_changes += 1;
            continue;
        }
        let step = match (prev.coords, cur.coords) {
            (Coordinates::Unentangled(a), Coordinates::Unentangled(b)) => base_step(
                (a.p1.theta(), a.p1.phi()),
                (b.p1.theta(), b.p1.phi()),
            )
            .max(base_step(
                (a.p2.theta(), a.p2.phi()),
                (b.p2.theta(), b.p2.phi()),
            )),
            (Coordinates::Full(a), Coordinates::Full(b)) => a.distance(&b),
            (Coordinates::Partial(a), Coordinates::Partial(b)) => {
                let gamma_prev_chart = match cur.chart_switch {
                    Some(sw) => {
                        report.chart_switches += 1;
                        match sw.gamma_from {
                            Some(g_old) => {
                                let t = table.factor(b.chart, sw.from, b.phi1, b.phi2);
                                let err =
                                    (C64::from_polar(1.0, b.gamma) - t * C64::from_polar(1.0, g_old)).norm();
                                report.max_switch_error = report.max_switch_error.max(err);
                                g_old
                            }
                            None => {
                                report.max_switch_error = f64::INFINITY;
                                a.gamma
                            }
                        }
                    }
                    None => b.gamma,
                };
                [
                    (a.eta - b.eta).abs(),
                    base_step((a.theta1, a.phi1), (b.theta1, b.phi1)),
                    base_step((a.theta2, a.phi2), (b.theta2, b.phi2)),
                    wrap_signed(gamma_prev_chart - a.gamma).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            }
            _ => unreachable!("stratum changes are skipped above"),
        };
        report.max_step = report.max_step.max(step);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::standard_state;
    use crate::linalg::fidelity;
    use crate::sampling;

    #[test]
    fn zero_generator_gives_constant_trajectory() {
        let mut rng = sampling::rng(1);
        let s = sampling::haar_state(&mut rng);
        let run = evolve(&HermitianGenerator::zero(), &s, 0.0, 1.0, 0.1).unwrap();
        assert_eq!(run.len(), 11);
        assert!(run.iter().all(|(_, x)| x.deviation(&s) < 1e-15));
        assert_eq!(run.last().unwrap().0, 1.0);

        let pts = coordinate_trajectory(&run, &Tolerances::default()).unwrap();
        let chart = pts[0].chart();
        assert!(pts.iter().all(|p| p.chart() == chart && p.chart_switch.is_none()));
        assert_eq!(continuity(&pts).max_step, 0.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn diagonal_generator_gives_pure_phases() {
        let e = [0.3, -1.2, 0.7, 2.0];
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            m[k][k] = c(e[k], 0.0);
        }
        let h = HermitianGenerator::new(m).unwrap();
        let s = TwoQubitState::from_real([0.1, 0.5, -0.3, 0.8]).unwrap();
        for (t, x) in evolve(&h, &s, 0.0, 2.0, 0.25).unwrap() {
            for k in 0..4 {
                let expected = s.amplitudes()[k] * C64::from_polar(1.0, -e[k] * t);
                assert!((x.amplitudes()[k] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        m[0][1] = c(1.0, 0.0);
        assert!(matches!(
            HermitianGenerator::new(m),
            Err(Error::NonHermitian { .. })
        ));
        let s = TwoQubitState::basis(0, 0);
        let h = HermitianGenerator::zero();
        assert!(evolve(&h, &s, 0.0, 1.0, 0.0).is_err());
        assert!(evolve(&h, &s, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn grid_ends_at_t1() {
        let s = TwoQubitState::basis(0, 0);
        let run = evolve(&HermitianGenerator::zero(), &s, 0.0, 1.05, 0.1).unwrap();
        assert_eq!(run.len(), 12);
        assert_eq!(run.last().unwrap().0, 1.05);
    }

    #[test]
    fn standard_state_sweep_stays_at_origin() {
        let states: Vec<_> = (0..=200)
            .map(|k| {
                let eta = 0.1 + (PI / 2.0 - 0.2) * k as f64 / 200.0;
                (k as f64, standard_state(eta).unwrap())
            })
            .collect();
        let pts = coordinate_trajectory(&states, &Tolerances::default()).unwrap();
        for (p, (_, s)) in pts.iter().zip(&states) {
            let Coordinates::Partial(k) = p.coords else {
                panic!("expected partial stratum")
            };
            assert_eq!(k.chart, Chart::NN);
            assert_eq!((k.theta1, k.theta2, k.gamma), (0.0, 0.0, 0.0));
            assert!((p.concurrence - k.eta.sin()).abs() < 1e-12);
            assert!((p.concurrence - concurrence(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn chart_switches_through_both_poles() {
        // Qubit 1 precesses about x, carrying its base point over both poles.
        let omega = 1.3;
        let h = HermitianGenerator::local(
            &Mat2::SIGMA_X.scale(c(omega / 2.0, 0.0)),
            &Mat2::SIGMA_Z.scale(c(0.4, 0.0)),
        )
        .unwrap();
        let run = evolve(&h, &standard_state(0.9).unwrap(), 0.0, 2.0 * PI / omega, 1e-3).unwrap();
        for w in run.windows(2) {
            assert!(fidelity(&w[0].1, &w[1].1) >= 1.0 - 1e-4);
        }
        let pts = coordinate_trajectory(&run, &Tolerances::default()).unwrap();
        let report = continuity(&pts);
        assert_eq!(report.chart_switches, 2);
        assert!(report.max_switch_error < 1e-9, "{report:?}");
        assert!(report.max_step < 0.1, "{report:?}");
        assert_eq!(report.stratum_changes, 0);
    }

    #[test]
    fn stratum_changes_are_recorded() {
        let states = vec![
            (0.0, standard_state(0.3).unwrap()),
            (1.0, standard_state(0.0).unwrap()),
            (2.0, standard_state(PI / 2.0).unwrap()),
            (3.0, standard_state(PI / 2.0 - 0.1).unwrap()),
        ];
        let pts = coordinate_trajectory(&states, &Tolerances::default()).unwrap();
        let strata: Vec<_> = pts.iter().map(|p| p.stratum).collect();
        assert_eq!(
            strata,
            [Stratum::Partial, Stratum::Unentangled, Stratum::Full, Stratum::Partial]
        );
        assert_eq!(pts[1].stratum_change, Some(Stratum::Partial));
        assert_eq!(pts[0].stratum_change, None);
        assert_eq!(continuity(&pts).stratum_changes, 3);
    }

    #[test]
    fn band_points_are_tagged() {
        let states = vec![
            (0.0, standard_state(5e-7).unwrap()),
            (1.0, standard_state(PI / 2.0 - 1e-3).unwrap()),
        ];
        let pts = coordinate_trajectory(&states, &Tolerances::default()).unwrap();
        assert_eq!(pts[0].stratum, Stratum::Unentangled);
        assert!(pts[0].near_boundary);
        // 1 - cos(1e-3) ~ 5e-7 sits inside the band as well.
        assert_eq!(pts[1].stratum, Stratum::Full);
        assert!(pts[1].near_boundary);
    }
}
