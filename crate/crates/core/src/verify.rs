//! Randomized property suite behind the `verify` subcommand.
//!
//! Each property draws from its own generator seeded from the suite seed and
//! the property's position, so results do not depend on scheduling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rayon::prelude::*;

use crate::bundle::{
    extract_with, reconstruct_with, BundleCoords, Chart, TransitionTable,
};
use crate::dynamics::{continuity, coordinate_trajectory, evolve, HermitianGenerator};
use crate::entanglement::{classify_with, concurrence, schmidt, standard_state, Stratum};
use crate::extremes::{
    bell_table, compose_unentangled, factor_unentangled_with, rotation_from_state_with,
    state_from_rotation, AxisAngleRotation, BlochPair,
};
use crate::linalg::{
    apply_local, c, fidelity, rz, su2_from_axis_angle, wrap_signed, BlochPoint,
    LocalUnitaryPair, Mat2, SingleQubitUnitary, TwoQubitState, C64,
};
use crate::sampling::{self, SeededRng};
use crate::tolerance::Tolerances;

/// Whether the observed value must stay below or above the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub trials: usize,
    /// Worst value seen: the maximum for [`Bound::Below`], the minimum for
    /// [`Bound::Above`].
    pub observed: f64,
    pub bound: f64,
    pub kind: Bound,
}

impl PropertyReport {
    fn below(name: &'static str, trials: usize, observed: f64, bound: f64) -> Self {
        Self {
            name,
            trials,
            observed,
            bound,
            kind: Bound::Below,
        }
    }

    fn above(name: &'static str, trials: usize, observed: f64, bound: f64) -> Self {
        Self {
            name,
            trials,
            observed,
            bound,
            kind: Bound::Above,
        }
    }

    pub fn passed(&self) -> bool {
        match self.kind {
            Bound::Below => self.observed < self.bound,
            Bound::Above => self.observed > self.bound,
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (label, rel) = match self.kind {
            Bound::Below => ("max_err", "<"),
            Bound::Above => ("min_dev", ">"),
        };
        write!(
            f,
            "{} {:<32} trials={:<7} {}={:.3e} (need {} {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials,
            label,
            self.observed,
            rel,
            self.bound
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: Tolerances,
    pub table: TransitionTable,
}

impl SuiteConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self {
            seed,
            trials: trials.max(1),
            tol: Tolerances::default(),
            table: TransitionTable::published(),
        }
    }
}

pub const DYNAMICS_SPAN: f64 = 4.0;
pub const DYNAMICS_DT: f64 = 2.5e-4;

type Property = fn(&mut SeededRng, &SuiteConfig) -> PropertyReport;

const PROPERTIES: [Property; 23] = [
    overlap_invariance,
    su2_special_unitary,
    bloch_ket_round_trip,
    concurrence_lu_invariance,
    section_identity,
    schmidt_reassembly,
    stabilizer_unentangled,
    stabilizer_partial,
    stabilizer_partial_same_sign,
    stabilizer_full_partner,
    singlet_universality,
    non_singlet_not_universal,
    bundle_round_trip,
    transition_transport,
    transition_cocycle,
    structure_group_action,
    product_round_trip,
    rotation_round_trip,
    axis_invariance,
    bell_assignments,
    parameter_counts,
    dynamics_continuity,
    local_dynamics_concurrence,
];

/// Runs every property; output order is fixed.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<PropertyReport> {
    PROPERTIES
        .par_iter()
        .enumerate()
        .map(|(k, prop)| {
            let mut rng = sampling::rng(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k as u64);
            prop(&mut rng, cfg)
        })
        .collect()
}

fn su2_pair(u1: SingleQubitUnitary, u2: SingleQubitUnitary) -> LocalUnitaryPair {
    LocalUnitaryPair::new(u1, u2)
}

fn z_rotation(angle: f64) -> SingleQubitUnitary {
    su2_from_axis_angle([0.0, 0.0, 1.0], angle).expect("unit axis")
}

fn partial_state(rng: &mut SeededRng, cfg: &SuiteConfig) -> TwoQubitState {
    loop {
        let s = sampling::haar_state(rng);
        if classify_with(&s, cfg.tol.class).stratum == Stratum::Partial {
            return s;
        }
    }
}

fn random_rotation(rng: &mut SeededRng) -> AxisAngleRotation {
    let axis = sampling::unit_vector::<3, _>(rng);
    AxisAngleRotation::new(axis, sampling::uniform(rng, 0.0, PI)).expect("unit axis")
}

fn overlap_invariance(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let (a, b) = (sampling::haar_state(rng), sampling::haar_state(rng));
            let p = sampling::haar_pair(rng);
            (fidelity(&apply_local(&p, &a), &apply_local(&p, &b)) - fidelity(&a, &b)).abs()
        })
        .fold(0.0, f64::max);
    PropertyReport::below("overlap-lu-invariance", n, worst, 1e-10)
}

fn su2_special_unitary(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let axis = sampling::unit_vector::<3, _>(rng);
            let u = su2_from_axis_angle(axis, sampling::uniform(rng, -TAU, TAU)).expect("unit axis");
            (u.matrix().det() - c(1.0, 0.0)).norm().max(u.matrix().unitarity_defect())
        })
        .fold(0.0, f64::max);
    PropertyReport::below("su2-special-unitary", n, worst, 1e-10)
}

fn bloch_ket_round_trip(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let theta = sampling::uniform(rng, 1e-3, PI - 1e-3);
            let phi = sampling::uniform(rng, 0.0, TAU);
            let p = BlochPoint::new(theta, phi).expect("in range");
            let q = crate::linalg::bloch_point_of_ket(&p.ket()).expect("unit ket");
            (q.theta() - theta).abs().max(wrap_signed(q.phi() - phi).abs())
        })
        .fold(0.0, f64::max);
    PropertyReport::below("bloch-ket-round-trip", n, worst, 1e-9)
}

fn concurrence_lu_invariance(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let s = sampling::haar_state(rng);
            let p = sampling::haar_pair(rng);
            (concurrence(&apply_local(&p, &s)) - concurrence(&s)).abs()
        })
        .fold(0.0, f64::max);
    PropertyReport::below("concurrence-lu-invariance", n, worst, 1e-10)
}

fn section_identity(_: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials.max(2);
    let worst = (0..n)
        .map(|k| {
            let eta = FRAC_PI_2 * k as f64 / (n - 1) as f64;
            (concurrence(&standard_state(eta).expect("in range")) - eta.sin()).abs()
        })
        .fold(0.0, f64::max);
    PropertyReport::below("section-identity", n, worst, 1e-12)
}

fn schmidt_reassembly(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let s = sampling::haar_state(rng);
            let d = schmidt(&s);
            s.deviation(&d.reassemble())
                .max((2.0 * d.lambda1 * d.lambda2 - concurrence(&s)).abs())
        })
        .fold(0.0, f64::max);
    PropertyReport::below("schmidt-reassembly", n, worst, 1e-10)
}

fn stabilizer_unentangled(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let s = standard_state(0.0).expect("in range");
    let worst = (0..n)
        .map(|_| {
            let (a, b) = (sampling::uniform(rng, -PI, PI), sampling::uniform(rng, -PI, PI));
            let first = su2_pair(z_rotation(a), SingleQubitUnitary::IDENTITY);
            let second = su2_pair(SingleQubitUnitary::IDENTITY, z_rotation(b));
            s.deviation(&apply_local(&first, &s))
                .max(s.deviation(&apply_local(&second, &s)))
        })
        .fold(0.0, f64::max);
    PropertyReport::below("stabilizer-unentangled", n, worst, 1e-10)
}

fn stabilizer_partial(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let s = standard_state(sampling::uniform(rng, 1e-3, FRAC_PI_2 - 1e-3)).expect("in range");
            let a = sampling::uniform(rng, -PI, PI);
            s.deviation(&apply_local(&su2_pair(z_rotation(a), z_rotation(-a)), &s))
        })
        .fold(0.0, f64::max);
    PropertyReport::below("stabilizer-partial", n, worst, 1e-10)
}

/// Same-sign pairs must move generic partial standard states.
fn stabilizer_partial_same_sign(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let least = (0..n)
        .map(|_| {
            let s = standard_state(sampling::uniform(rng, 0.3, FRAC_PI_2 - 0.3)).expect("in range");
            let a = sampling::uniform(rng, 0.3, PI - 0.3);
            s.deviation(&apply_local(&su2_pair(z_rotation(a), z_rotation(a)), &s))
        })
        .fold(f64::INFINITY, f64::min);
    PropertyReport::above("stabilizer-partial-same-sign", n, least, 1e-3)
}

/// Every `U` on qubit 1 has a partner `conj(U)` on qubit 2 fixing the
/// maximally entangled standard state.
fn stabilizer_full_partner(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let s = standard_state(FRAC_PI_2).expect("in range");
    let worst = (0..n)
        .map(|_| {
            let u = sampling::haar_su2(rng);
            let v = SingleQubitUnitary::new(u.matrix().conj()).expect("conjugate of unitary");
            s.deviation(&apply_local(&su2_pair(u, v), &s))
        })
        .fold(0.0, f64::max);
    PropertyReport::below("stabilizer-full-partner", n, worst, 1e-10)
}

fn singlet_universality(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let s = TwoQubitState::singlet();
    let worst = (0..n)
        .map(|_| {
            let u = sampling::haar_su2(rng);
            s.deviation(&apply_local(&su2_pair(u, u), &s))
        })
        .fold(0.0, f64::max);
    PropertyReport::below("singlet-universality", n, worst, 1e-10)
}

/// Non-singlet fully entangled states are moved by some identical pair.
/// Observed value: least (over states) of the largest deviation over draws.
fn non_singlet_not_universal(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let draws = cfg.trials.clamp(1, 200);
    let mut states: Vec<TwoQubitState> = bell_table().iter().skip(1).map(|e| e.state).collect();
    for _ in 0..20 {
        let r = random_rotation(rng);
        if r.angle() > 0.1 {
            states.push(state_from_rotation(&r));
        }
    }
    let least = states
        .iter()
        .map(|s| {
            (0..draws)
                .map(|_| {
                    let u = sampling::haar_su2(rng);
                    s.deviation(&apply_local(&su2_pair(u, u), s))
                })
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    PropertyReport::above("non-singlet-not-universal", states.len() * draws, least, 1e-3)
}

fn bundle_round_trip(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let s = partial_state(rng, cfg);
            match extract_with(&s, None, &cfg.tol).and_then(|k| reconstruct_with(&k, &cfg.tol)) {
                Ok(back) => 1.0 - fidelity(&s, &back),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max);
    PropertyReport::below("bundle-round-trip", n, worst, 1e-9)
}

/// Largest transport error `|t_{b,a} e^{i g_a} - e^{i g_b}|` over all chart
/// pairs, with each `g` extracted independently in its own chart.
pub fn transport_error(state: &TwoQubitState, table: &TransitionTable, tol: &Tolerances) -> f64 {
    let coords: Vec<BundleCoords> = match Chart::ALL
        .iter()
        .map(|&chart| extract_with(state, Some(chart), tol))
        .collect()
    {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let mut worst: f64 = 0.0;
    for a in &coords {
        for b in &coords {
            let t = table.factor(b.chart, a.chart, a.phi1, a.phi2);
            worst = worst.max((t * a.fibre_phase() - b.fibre_phase()).norm());
        }
    }
    worst
}

/// Largest cocycle defect `|t_{a,c} - t_{a,b} t_{b,c}|` over all chart triples.
pub fn cocycle_error(table: &TransitionTable, phi1: f64, phi2: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in Chart::ALL {
        for b in Chart::ALL {
            for c3 in Chart::ALL {
                let direct = table.factor(a, c3, phi1, phi2);
                let composed = table.factor(a, b, phi1, phi2) * table.factor(b, c3, phi1, phi2);
                worst = worst.max((direct - composed).norm());
            }
        }
    }
    worst
}

fn overlap_state(rng: &mut SeededRng, cfg: &SuiteConfig) -> TwoQubitState {
    // Haar draws land in all four chart domains except on a null set; keep
    // a margin from the poles so every chart is valid.
    loop {
        let s = partial_state(rng, cfg);
        if let Ok((p1, p2)) = crate::bundle::base_points(&s) {
            let margin = |p: &BlochPoint| p.theta() > 1e-3 && p.theta() < PI - 1e-3;
            if margin(&p1) && margin(&p2) {
                return s;
            }
        }
    }
}

fn transition_transport(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| transport_error(&overlap_state(rng, cfg), &cfg.table, &cfg.tol))
        .fold(0.0, f64::max);
    PropertyReport::below("transition-transport", n, worst, 1e-8)
}

fn transition_cocycle(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let (p1, p2) = (sampling::uniform(rng, 0.0, TAU), sampling::uniform(rng, 0.0, TAU));
            cocycle_error(&cfg.table, p1, p2)
        })
        .fold(0.0, f64::max);
    PropertyReport::below("transition-cocycle", n, worst, 1e-10)
}

/// Shifting `gamma` by `d` equals conjugating the fibre rotation into the
/// qubit-1 patch operator; transition factors have unit modulus.
fn structure_group_action(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let s = overlap_state(rng, cfg);
            let chart = Chart::ALL[(sampling::uniform(rng, 0.0, 4.0) as usize).min(3)];
            let Ok(k) = extract_with(&s, Some(chart), &cfg.tol) else {
                return f64::INFINITY;
            };
            let d = sampling::uniform(rng, -PI, PI);
            let shifted = BundleCoords {
                gamma: k.gamma + d,
                ..k
            };
            let sign = if chart.first() == crate::bundle::Hemisphere::North { 1.0 } else { -1.0 };
            let patch = patch_for(&k);
            let action = patch * rz(sign * d) * patch.adjoint();
            let moved = apply_local(
                &su2_pair(SingleQubitUnitary::new(action).expect("unitary"), SingleQubitUnitary::IDENTITY),
                &s,
            );
            let direct = reconstruct_with(&shifted, &cfg.tol).map(|x| moved.deviation(&x));
            let modulus = Chart::ALL
                .iter()
                .map(|&b| (cfg.table.factor(b, chart, k.phi1, k.phi2).norm() - 1.0).abs())
                .fold(0.0, f64::max);
            direct.unwrap_or(f64::INFINITY).max(modulus)
        })
        .fold(0.0, f64::max);
    PropertyReport::below("structure-group-action", n, worst, 1e-10)
}

fn patch_for(k: &BundleCoords) -> Mat2 {
    match k.chart.first() {
        crate::bundle::Hemisphere::North => *crate::bundle::t_north(k.theta1, k.phi1).matrix(),
        crate::bundle::Hemisphere::South => *crate::bundle::t_south(k.theta1, k.phi1).matrix(),
    }
}

fn product_round_trip(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let pair = BlochPair {
                p1: BlochPoint::from_cartesian(sampling::unit_vector(rng)).expect("nonzero"),
                p2: BlochPoint::from_cartesian(sampling::unit_vector(rng)).expect("nonzero"),
            };
            let s = compose_unentangled(&pair);
            match factor_unentangled_with(&s, &cfg.tol) {
                Ok(back) => (1.0 - fidelity(&s, &compose_unentangled(&back))).max(concurrence(&s)),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max);
    PropertyReport::below("product-round-trip", n, worst, 1e-10)
}

fn rotation_round_trip(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let r = random_rotation(rng);
            match rotation_from_state_with(&state_from_rotation(&r), &cfg.tol) {
                Ok(back) => back.distance(&r),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max);
    PropertyReport::below("rotation-round-trip", n, worst, 1e-8)
}

fn axis_invariance(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let n = cfg.trials;
    let worst = (0..n)
        .map(|_| {
            let r = random_rotation(rng);
            let s = state_from_rotation(&r);
            let u = su2_from_axis_angle(r.axis(), sampling::uniform(rng, -PI, PI)).expect("unit axis");
            s.deviation(&apply_local(&su2_pair(u, u), &s))
        })
        .fold(0.0, f64::max);
    PropertyReport::below("axis-invariance", n, worst, 1e-10)
}

fn bell_assignments(_: &mut SeededRng, _: &SuiteConfig) -> PropertyReport {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let table = bell_table();
    let singlet = &table[0];
    let x = &table[1];
    let phi_minus = TwoQubitState::from_real([h, 0.0, 0.0, -h]).expect("unit");
    let worst = [
        singlet.rotation.distance(&AxisAngleRotation::identity()),
        singlet.state.deviation(&TwoQubitState::singlet()),
        x.rotation.distance(&AxisAngleRotation::new([1.0, 0.0, 0.0], PI).expect("unit")),
        x.state.deviation(&phi_minus),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    PropertyReport::below("bell-assignments", table.len(), worst, 1e-10)
}

/// Structural: payload sizes are 4 / 6 / 3 reals.
fn parameter_counts(_: &mut SeededRng, _: &SuiteConfig) -> PropertyReport {
    let expected = [
        (BlochPair::PARAMETERS, Stratum::Unentangled),
        (BundleCoords::PARAMETERS, Stratum::Partial),
        (AxisAngleRotation::PARAMETERS, Stratum::Full),
    ];
    let want = [4usize, 6, 3];
    let mismatches = expected
        .iter()
        .zip(want)
        .filter(|((len, stratum), want)| *len != *want || stratum.parameter_count() != *want)
        .count();
    PropertyReport::below("parameter-counts", 3, mismatches as f64, 0.5)
}

/// Generic evolution: within-chart steps and chart-switch consistency.
/// Observed value: `max(max_step / 0.1, switch_error / 1e-6)`, must stay below 1.
///
/// `gamma` moves at a rate of order `1 / sin(eta / 2)` near the unentangled
/// boundary, so the step is well below the fidelity threshold alone.
fn dynamics_continuity(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let h = HermitianGenerator::new(sampling::hermitian4(rng)).expect("Hermitian by construction");
    let initial = partial_state(rng, cfg);
    let run = match evolve(&h, &initial, 0.0, DYNAMICS_SPAN, DYNAMICS_DT) {
        Ok(run) => run,
        Err(_) => return PropertyReport::below("dynamics-continuity", 0, f64::INFINITY, 1.0),
    };
    let min_fid = run
        .windows(2)
        .map(|w| fidelity(&w[0].1, &w[1].1))
        .fold(1.0, f64::min);
    let score = match coordinate_trajectory(&run, &cfg.tol) {
        Ok(points) => {
            let r = continuity(&points);
            (r.max_step / 0.1).max(r.max_switch_error / 1e-6)
        }
        Err(_) => f64::INFINITY,
    };
    let score = if min_fid >= 1.0 - 1e-4 { score } else { f64::INFINITY };
    PropertyReport::below("dynamics-continuity", run.len(), score, 1.0)
}

fn local_dynamics_concurrence(rng: &mut SeededRng, cfg: &SuiteConfig) -> PropertyReport {
    let herm = |rng: &mut SeededRng| {
        let v = [(); 4].map(|_| sampling::uniform(rng, -1.0, 1.0));
        Mat2::new(
            c(v[0] + v[3], 0.0),
            C64::new(v[1], -v[2]),
            C64::new(v[1], v[2]),
            c(v[0] - v[3], 0.0),
        )
    };
    let h = HermitianGenerator::local(&herm(rng), &herm(rng)).expect("Hermitian by construction");
    let initial = partial_state(rng, cfg);
    let c0 = concurrence(&initial);
    let run = evolve(&h, &initial, 0.0, 10.0, 1e-2).unwrap_or_default();
    let worst = run
        .iter()
        .map(|(_, s)| (concurrence(s) - c0).abs())
        .fold(if run.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
    PropertyReport::below("local-dynamics-concurrence", run.len(), worst, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::TransitionRule;

    #[test]
    fn suite_passes_at_small_n() {
        for report in run_suite(&SuiteConfig::new(7, 50)) {
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(&SuiteConfig::new(3, 20));
        let b = run_suite(&SuiteConfig::new(3, 20));
        assert_eq!(a, b);
    }

    #[test]
    fn flipped_rule_fails_transport_and_cocycle() {
        for rule in TransitionRule::ALL {
            let mut cfg = SuiteConfig::new(1, 20);
            cfg.table = TransitionTable::published().with_flipped_sign(rule);
            let reports = run_suite(&cfg);
            for name in ["transition-transport", "transition-cocycle"] {
                let report = reports.iter().find(|r| r.name == name).unwrap();
                assert!(!report.passed(), "{rule:?}: {report}");
            }
        }
    }
}
