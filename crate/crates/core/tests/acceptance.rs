//! Acceptance gate. One test per criterion; each prints a single PASS/FAIL
//! line before asserting.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use qubit_bundle::bundle::{base_points, extract_with, reconstruct_with, Chart, TransitionRule, TransitionTable};
use qubit_bundle::dynamics::{continuity, coordinate_trajectory, evolve, HermitianGenerator};
use qubit_bundle::extremes::{
    bell_table, factor_unentangled, rotation_from_state, state_from_rotation, AxisAngleRotation,
};
use qubit_bundle::linalg::{apply_local, su2_from_axis_angle, Mat2};
use qubit_bundle::sampling::{self, SeededRng};
use qubit_bundle::{
    classify, concurrence, fidelity, standard_state, BundleCoords, LocalUnitaryPair,
    SingleQubitUnitary, Stratum, Tolerances, TwoQubitState,
};

fn verdict(id: u8, name: &str, ok: bool, detail: String) {
    println!("{} criterion {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// `2 sqrt(det rho_A)` from the partial trace, independent of the library's
/// coefficient formula.
fn concurrence_oracle(s: &TwoQubitState) -> f64 {
    let a = s.amplitudes();
    let r00 = a[0].norm_sqr() + a[1].norm_sqr();
    let r11 = a[2].norm_sqr() + a[3].norm_sqr();
    let r01 = a[0] * a[2].conj() + a[1] * a[3].conj();
    2.0 * (r00 * r11 - r01.norm_sqr()).max(0.0).sqrt()
}

fn z(angle: f64) -> SingleQubitUnitary {
    su2_from_axis_angle([0.0, 0.0, 1.0], angle).unwrap()
}

fn partial_state(rng: &mut SeededRng) -> TwoQubitState {
    loop {
        let s = sampling::haar_state(rng);
        if classify(&s).stratum == Stratum::Partial {
            return s;
        }
    }
}

#[test]
fn criterion_1_concurrence_lu_invariance() {
    let start = Instant::now();
    let mut rng = sampling::rng(101);
    let (mut worst, mut oracle_gap) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let s = sampling::haar_state(&mut rng);
        let moved = apply_local(&sampling::haar_pair(&mut rng), &s);
        worst = worst.max((concurrence(&moved) - concurrence(&s)).abs());
        oracle_gap = oracle_gap.max((concurrence(&s) - concurrence_oracle(&s)).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && oracle_gap < 1e-10 && within(elapsed, 5.0);
    verdict(
        1,
        "concurrence LU invariance",
        ok,
        format!("draws=10000 max_diff={worst:.2e} oracle_gap={oracle_gap:.2e} time={elapsed:.2?} (limits 1e-10, 5s)"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_section_identity() {
    let n = 1000;
    let worst = (0..n)
        .map(|k| {
            let eta = FRAC_PI_2 * k as f64 / (n - 1) as f64;
            (concurrence(&standard_state(eta).unwrap()) - eta.sin()).abs()
        })
        .fold(0.0f64, f64::max);
    let ok = worst < 1e-12;
    verdict(2, "section identity", ok, format!("grid=1000 max_err={worst:.2e} (limit 1e-12)"));
    assert!(ok);
}

#[test]
fn criterion_3_bundle_round_trip() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut rng = sampling::rng(303);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let s = partial_state(&mut rng);
        let back = reconstruct_with(&extract_with(&s, None, &tol).unwrap(), &tol).unwrap();
        worst = worst.max(1.0 - fidelity(&s, &back));
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-9 && within(elapsed, 10.0);
    verdict(
        3,
        "bundle round trip",
        ok,
        format!("states=10000 max_infidelity={worst:.2e} time={elapsed:.2?} (limits 1e-9, 10s)"),
    );
    assert!(ok);
}

fn overlap_state(rng: &mut SeededRng) -> TwoQubitState {
    loop {
        let s = partial_state(rng);
        let (p1, p2) = base_points(&s).unwrap();
        if [p1.theta(), p2.theta()].iter().all(|t| *t > 1e-3 && *t < PI - 1e-3) {
            return s;
        }
    }
}

/// Transport error and cocycle error over 1000 overlap points.
fn transition_laws(table: &TransitionTable) -> (f64, f64) {
    let tol = Tolerances::default();
    let mut rng = sampling::rng(404);
    let (mut transport, mut cocycle) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let s = overlap_state(&mut rng);
        let coords: Vec<BundleCoords> = Chart::ALL
            .iter()
            .map(|&chart| extract_with(&s, Some(chart), &tol).unwrap())
            .collect();
        for a in &coords {
            for b in &coords {
                let t = table.factor(b.chart, a.chart, a.phi1, a.phi2);
                let carried = t * C64::from_polar(1.0, a.gamma);
                transport = transport.max((carried - C64::from_polar(1.0, b.gamma)).norm());
            }
        }
        let (p1, p2) = (coords[0].phi1, coords[0].phi2);
        for a in Chart::ALL {
            for b in Chart::ALL {
                for c in Chart::ALL {
                    let lhs = table.factor(a, c, p1, p2);
                    let rhs = table.factor(a, b, p1, p2) * table.factor(b, c, p1, p2);
                    cocycle = cocycle.max((lhs - rhs).norm());
                }
            }
        }
    }
    (transport, cocycle)
}

#[test]
fn criterion_4_transition_laws() {
    let (transport, cocycle) = transition_laws(&TransitionTable::published());
    let ok = transport < 1e-8 && cocycle < 1e-10;
    verdict(
        4,
        "transition-function laws",
        ok,
        format!("points=1000 transport_err={transport:.2e} cocycle_err={cocycle:.2e} (limits 1e-8, 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_rotation_correspondence() {
    let start = Instant::now();
    let mut rng = sampling::rng(505);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let axis = sampling::unit_vector::<3, _>(&mut rng);
        let r = AxisAngleRotation::new(axis, sampling::uniform(&mut rng, 0.0, PI)).unwrap();
        worst = worst.max(rotation_from_state(&state_from_rotation(&r)).unwrap().distance(&r));
    }

    let table = bell_table();
    let singlet = TwoQubitState::singlet();
    let phi_minus = TwoQubitState::from_real([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).unwrap();
    let identity_row = table.iter().find(|e| e.rotation.angle() == 0.0).unwrap();
    let x_row = table
        .iter()
        .find(|e| e.rotation.distance(&AxisAngleRotation::new([1.0, 0.0, 0.0], PI).unwrap()) < 1e-12)
        .unwrap();
    let f_singlet = fidelity(&identity_row.state, &singlet);
    let f_x = fidelity(&x_row.state, &phi_minus);
    let elapsed = start.elapsed();
    let ok = worst < 1e-8
        && f_singlet >= 1.0 - 1e-10
        && f_x >= 1.0 - 1e-10
        && identity_row.name == "psi-minus"
        && x_row.name == "phi-minus";
    verdict(
        5,
        "SO(3) correspondence",
        ok,
        format!(
            "rotations=10000 max_distance={worst:.2e} singlet_fid={f_singlet:.12} x_fid={f_x:.12} time={elapsed:.2?} (limits 1e-8, 1-1e-10)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_stabilizers() {
    let mut rng = sampling::rng(606);
    let n = 1000;

    let plus_plus = TwoQubitState::basis(0, 0);
    let mut fixed = 0.0f64;
    for _ in 0..n {
        let (a, b) = (sampling::uniform(&mut rng, -PI, PI), sampling::uniform(&mut rng, -PI, PI));
        let moved = apply_local(&LocalUnitaryPair::new(z(a), z(b)), &plus_plus);
        fixed = fixed.max(moved.deviation(&plus_plus));
    }

    let mut opposite = 0.0f64;
    let mut same_sign = f64::INFINITY;
    for _ in 0..n {
        let s = standard_state(sampling::uniform(&mut rng, 0.3, FRAC_PI_2 - 0.3)).unwrap();
        let a = sampling::uniform(&mut rng, 0.3, PI - 0.3);
        opposite = opposite.max(apply_local(&LocalUnitaryPair::new(z(a), z(-a)), &s).deviation(&s));
        same_sign = same_sign.min(apply_local(&LocalUnitaryPair::new(z(a), z(a)), &s).deviation(&s));
    }

    let singlet = TwoQubitState::singlet();
    let mut universal = 0.0f64;
    for _ in 0..n {
        let u = sampling::haar_su2(&mut rng);
        universal = universal.max(apply_local(&LocalUnitaryPair::new(u, u), &singlet).deviation(&singlet));
    }

    // Median over generic U for each non-singlet Bell state; the weakest state counts.
    let mut bell_control = f64::INFINITY;
    for entry in bell_table().iter().filter(|e| e.name != "psi-minus") {
        let mut devs: Vec<f64> = (0..n)
            .map(|_| {
                let u = sampling::haar_su2(&mut rng);
                apply_local(&LocalUnitaryPair::new(u, u), &entry.state).deviation(&entry.state)
            })
            .collect();
        devs.sort_by(f64::total_cmp);
        bell_control = bell_control.min(devs[n / 2]);
    }

    let ok = fixed < 1e-10 && opposite < 1e-10 && universal < 1e-10 && same_sign > 1e-3 && bell_control > 1e-3;
    verdict(
        6,
        "stabilizer suite",
        ok,
        format!(
            "z-pair/++={fixed:.2e} opposite-z/partial={opposite:.2e} UxU/singlet={universal:.2e} (limit 1e-10); \
             controls: same-sign min={same_sign:.2e} UxU/bell median={bell_control:.2e} (need > 1e-3)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_parameter_counts() {
    let mut rng = sampling::rng(707);
    let tol = Tolerances::default();
    let partial = extract_with(&partial_state(&mut rng), None, &tol).unwrap();
    let pair = factor_unentangled(&TwoQubitState::basis(0, 1)).unwrap();
    let rot = rotation_from_state(&TwoQubitState::singlet()).unwrap();
    let counts = [
        partial.real_parameters().len(),
        pair.real_parameters().len(),
        rot.real_parameters().len(),
    ];
    let ok = counts == [6, 4, 3]
        && [Stratum::Partial, Stratum::Unentangled, Stratum::Full].map(|s| s.parameter_count()) == [6, 4, 3];
    verdict(7, "parameter counts", ok, format!("partial/unentangled/full = {counts:?} (need [6, 4, 3])"));
    assert!(ok);
}

fn random_hermitian2(rng: &mut SeededRng) -> Mat2 {
    let v = [(); 4].map(|_| sampling::uniform(rng, -1.0, 1.0));
    Mat2::new(
        C64::new(v[0] + v[3], 0.0),
        C64::new(v[1], -v[2]),
        C64::new(v[1], v[2]),
        C64::new(v[0] - v[3], 0.0),
    )
}

#[test]
fn criterion_8_dynamics_continuity() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut rng = sampling::rng(808);

    let h = HermitianGenerator::new(sampling::hermitian4(&mut rng)).unwrap();
    let initial = partial_state(&mut rng);
    let run = evolve(&h, &initial, 0.0, 4.0, 2.5e-4).unwrap();
    let min_fid = run.windows(2).map(|w| fidelity(&w[0].1, &w[1].1)).fold(1.0, f64::min);
    let report = continuity(&coordinate_trajectory(&run, &tol).unwrap());

    let local = HermitianGenerator::local(&random_hermitian2(&mut rng), &random_hermitian2(&mut rng)).unwrap();
    let start_local = partial_state(&mut rng);
    let c0 = concurrence(&start_local);
    let local_run = evolve(&local, &start_local, 0.0, 20.0, 1e-2).unwrap();
    let drift = local_run
        .iter()
        .map(|(_, s)| (concurrence(s) - c0).abs())
        .fold(0.0f64, f64::max);

    let elapsed = start.elapsed();
    let ok = min_fid >= 1.0 - 1e-4
        && report.max_step < 0.1
        && report.max_switch_error < 1e-6
        && local_run.len() > 1000
        && drift < 1e-9
        && within(elapsed, 5.0);
    verdict(
        8,
        "dynamics continuity",
        ok,
        format!(
            "steps={} min_fid={min_fid:.8} max_step={:.3e} switches={} switch_err={:.2e}; local steps={} conc_drift={drift:.2e}; time={elapsed:.2?} (limits 0.1, 1e-6, 1e-9, 5s)",
            run.len() - 1,
            report.max_step,
            report.chart_switches,
            report.max_switch_error,
            local_run.len() - 1,
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_9_mutation_canary() {
    let mut caught = Vec::new();
    for rule in TransitionRule::ALL {
        let (transport, cocycle) = transition_laws(&TransitionTable::published().with_flipped_sign(rule));
        let criterion_4_fails = !(transport < 1e-8 && cocycle < 1e-10);
        caught.push((rule, criterion_4_fails, transport));
    }
    let ok = caught.iter().all(|(_, fails, _)| *fails);
    let detail = caught
        .iter()
        .map(|(rule, fails, err)| format!("{rule:?}:{}(transport_err={err:.2e})", if *fails { "caught" } else { "missed" }))
        .collect::<Vec<_>>()
        .join(" ");
    verdict(9, "mutation canary", ok, detail);
    assert!(ok);
}
