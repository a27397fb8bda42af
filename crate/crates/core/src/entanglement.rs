//! Concurrence, the classification map onto `[0, 1]`, Schmidt data, and the
//! standard representative of each class.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, coefficient_matrix, BlochPoint, QubitKet, TwoQubitState, C64};
use crate::tolerance;

/// Which of the three local-unitary strata a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Unentangled,
    Partial,
    Full,
}

impl Stratum {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stratum::Unentangled => "unentangled",
            Stratum::Partial => "partial",
            Stratum::Full => "full",
        }
    }

    /// Stratum for a concurrence value under threshold `eps`.
    pub fn of_concurrence(concurrence: f64, eps: f64) -> Self {
        if concurrence <= eps {
            Stratum::Unentangled
        } else if concurrence >= 1.0 - eps {
            Stratum::Full
        } else {
            Stratum::Partial
        }
    }

    /// Real degrees of freedom needed to pin down a state within the stratum,
    /// concurrence included for the partial stratum.
    pub fn parameter_count(&self) -> usize {
        match self {
            Stratum::Unentangled => 4,
            Stratum::Partial => 6,
            Stratum::Full => 3,
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The image of a state in the class space `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementClass {
    pub concurrence: f64,
    pub eta: f64,
    pub stratum: Stratum,
}

/// `C = 2 |c_{++} c_{--} - c_{+-} c_{-+}|`, clamped into `[0, 1]`.
pub fn concurrence(state: &TwoQubitState) -> f64 {
    let a = state.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// Classifies with the default stratum threshold.
pub fn classify(state: &TwoQubitState) -> EntanglementClass {
    classify_with(state, tolerance::CLASS)
}

/// Classifies with stratum threshold `eps`; `eta` is the principal `arcsin C`.
pub fn classify_with(state: &TwoQubitState, eps: f64) -> EntanglementClass {
    let concurrence = concurrence(state);
    EntanglementClass {
        concurrence,
        eta: concurrence.asin(),
        stratum: Stratum::of_concurrence(concurrence, eps),
    }
}

/// `cos(eta/2) |++> + sin(eta/2) |-->`, the chosen representative of the
/// class with `C = sin eta`.
pub fn standard_state(eta: f64) -> Result<TwoQubitState> {
    if !(0.0..=FRAC_PI_2).contains(&eta) {
        return Err(Error::EtaOutOfRange { eta });
    }
    let (s, co) = (eta / 2.0).sin_cos();
    Ok(TwoQubitState::from_normalized([
        c(co, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(s, 0.0),
    ]))
}

/// Schmidt coefficients and local bases, `state ~ sum_k lambda_k |a_k> (x) |b_k>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtData {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Qubit-1 kets `a_1, a_2`.
    pub basis1: [QubitKet; 2],
    /// Qubit-2 kets `b_1, b_2`.
    pub basis2: [QubitKet; 2],
}

impl SchmidtData {
    /// `sum_k lambda_k a_k (x) b_k`.
    pub fn reassemble(&self) -> TwoQubitState {
        let mut amps = [c(0.0, 0.0); 4];
        for (k, lambda) in [self.lambda1, self.lambda2].into_iter().enumerate() {
            let (a, b) = (self.basis1[k], self.basis2[k]);
            for i in 0..2 {
                for j in 0..2 {
                    amps[2 * i + j] += a[i] * b[j] * lambda;
                }
            }
        }
        TwoQubitState::from_normalized(amps)
    }
}

const PHASE_FLOOR: f64 = 1e-12;

/// Rotates the global phase so the first non-negligible component is real positive.
pub(crate) fn fix_phase(ket: QubitKet) -> QubitKet {
    let lead = if ket[0].norm() > PHASE_FLOOR { ket[0] } else { ket[1] };
    let n = lead.norm();
    if n == 0.0 {
        return ket;
    }
    let g = lead.conj() / n;
    [ket[0] * g, ket[1] * g]
}

fn orthogonal(ket: &QubitKet) -> QubitKet {
    [-ket[1].conj(), ket[0].conj()]
}

fn unit(v: QubitKet) -> Option<QubitKet> {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

/// Closed-form two-qubit Schmidt decomposition.
///
/// The dominant qubit-1 ket points along the Bloch vector of the reduced
/// state `M M^dagger`; the partner kets follow by contraction with `M`.
/// Coefficients come from `sigma_1 sigma_2 = C / 2` and
/// `sigma_1^2 + sigma_2^2 = 1`, which keeps `2 lambda_1 lambda_2 = C` exact
/// near product states.
pub fn schmidt(state: &TwoQubitState) -> SchmidtData {
    let m = coefficient_matrix(state).0;
    let conc = concurrence(state);

    // Reduced state of qubit 1: rho = (I + r . sigma) / 2.
    let rho00 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
    let rho11 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
    let rho01 = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
    let r = [2.0 * rho01.re, -2.0 * rho01.im, rho00 - rho11];
    let a1 = BlochPoint::from_cartesian(r)
        .map(|p| p.ket())
        .unwrap_or([c(1.0, 0.0), c(0.0, 0.0)]);
    let a1 = fix_phase(a1);
    let a2 = fix_phase(orthogonal(&a1));

    let contract = |a: &QubitKet| -> QubitKet {
        [
            a[0].conj() * m[0][0] + a[1].conj() * m[1][0],
            a[0].conj() * m[0][1] + a[1].conj() * m[1][1],
        ]
    };
    let u = contract(&a1);
    let w = contract(&a2);

    let u_hat = unit(u).unwrap_or([c(1.0, 0.0), c(0.0, 0.0)]);
    let b1 = fix_phase(u_hat);
    // u_hat = phase1 * b1
    let phase1 = inner(&b1, &u_hat);
    let b1_perp = orthogonal(&b1);
    let proj = inner(&b1_perp, &w);
    let b2 = if proj.norm() > 0.0 {
        let rel = proj / proj.norm() * phase1.conj();
        [b1_perp[0] * rel, b1_perp[1] * rel]
    } else {
        fix_phase(b1_perp)
    };

    let gap = ((1.0 - conc) * (1.0 + conc)).sqrt();
    let lambda1 = ((1.0 + gap) / 2.0).sqrt();
    let lambda2 = conc / (2.0 * lambda1);

    SchmidtData {
        lambda1,
        lambda2,
        basis1: [a1, a2],
        basis2: [b1, b2],
    }
}

fn inner(a: &QubitKet, b: &QubitKet) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply_local, fidelity, rz, LocalUnitaryPair, SingleQubitUnitary};
    use crate::sampling;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn concurrence_examples() {
        assert_eq!(concurrence(&TwoQubitState::basis(0, 0)), 0.0);
        assert!((concurrence(&TwoQubitState::singlet()) - 1.0).abs() < 1e-15);
        let s = standard_state(PI / 3.0).unwrap();
        assert!((concurrence(&s) - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let k = classify(&TwoQubitState::basis(0, 1));
        assert_eq!((k.stratum, k.concurrence), (Stratum::Unentangled, 0.0));

        let bell = TwoQubitState::from_real([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).unwrap();
        let k = classify(&bell);
        assert_eq!(k.stratum, Stratum::Full);
        assert!((k.concurrence - 1.0).abs() < 1e-15);

        let k = classify(&standard_state(PI / 6.0).unwrap());
        assert_eq!(k.stratum, Stratum::Partial);
        assert!((k.concurrence - 0.5).abs() < 1e-15);
        assert!((k.eta - PI / 6.0).abs() < 1e-14);
    }

    #[test]
    fn classify_threshold_is_configurable() {
        let s = standard_state(1e-4).unwrap();
        assert_eq!(classify(&s).stratum, Stratum::Partial);
        assert_eq!(classify_with(&s, 1e-3).stratum, Stratum::Unentangled);
    }

    #[test]
    fn standard_state_examples() {
        assert_eq!(standard_state(0.0).unwrap(), TwoQubitState::basis(0, 0));
        let s = standard_state(PI / 2.0).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let s = standard_state(PI / 3.0).unwrap();
        assert!((s.amplitudes()[0].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn standard_state_rejects_out_of_range() {
        assert!(standard_state(-0.1).is_err());
        assert!(standard_state(1.6).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let d = schmidt(&TwoQubitState::basis(0, 0));
        assert_eq!((d.lambda1, d.lambda2), (1.0, 0.0));
        assert_eq!(d.basis1[0], [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(d.basis2[0], [c(1.0, 0.0), c(0.0, 0.0)]);

        let d = schmidt(&TwoQubitState::singlet());
        assert!((d.lambda1 - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.lambda2 - FRAC_1_SQRT_2).abs() < 1e-15);

        for eta in [0.2, 0.7, 1.3] {
            let d = schmidt(&standard_state(eta).unwrap());
            assert!((d.lambda1 - (eta / 2.0).cos()).abs() < 1e-14);
            assert!((d.lambda2 - (eta / 2.0).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn schmidt_phase_convention() {
        let mut rng = sampling::rng(3);
        for _ in 0..200 {
            let d = schmidt(&sampling::haar_state(&mut rng));
            for k in [d.basis1[0], d.basis1[1], d.basis2[0]] {
                let lead = if k[0].norm() > PHASE_FLOOR { k[0] } else { k[1] };
                assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
            }
        }
    }

    #[test]
    fn schmidt_reassembles_random_states() {
        let mut rng = sampling::rng(11);
        for _ in 0..2000 {
            let s = sampling::haar_state(&mut rng);
            let d = schmidt(&s);
            assert!(s.deviation(&d.reassemble()) < 1e-12);
            assert!((2.0 * d.lambda1 * d.lambda2 - concurrence(&s)).abs() < 1e-12);
            assert!(d.lambda1 >= d.lambda2);
            assert!((d.lambda1.powi(2) + d.lambda2.powi(2) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn schmidt_near_product_keeps_coefficient_identity() {
        let s = standard_state(1e-9).unwrap();
        let d = schmidt(&s);
        assert!((2.0 * d.lambda1 * d.lambda2 - concurrence(&s)).abs() < 1e-18);
    }

    #[test]
    fn opposite_z_pair_fixes_partial_standard_state() {
        let s = standard_state(0.9).unwrap();
        let pair = LocalUnitaryPair::new(
            SingleQubitUnitary::new(rz(0.4)).unwrap(),
            SingleQubitUnitary::new(rz(-0.4)).unwrap(),
        );
        assert!((fidelity(&apply_local(&pair, &s), &s) - 1.0).abs() < 1e-15);
    }
}
