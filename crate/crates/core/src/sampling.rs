//! Seeded random draws used by the verification suite and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::linalg::{c, LocalUnitaryPair, Mat2, SingleQubitUnitary, TwoQubitState, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-uniform state: a normalized complex Gaussian quadruple.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    loop {
        let amps = [(); 4].map(|_| c(gaussian(rng), gaussian(rng)));
        if let Ok(s) = TwoQubitState::new(amps) {
            return s;
        }
    }
}

/// Haar-uniform element of SU(2) from a uniform unit quaternion.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> SingleQubitUnitary {
    let q = unit_vector::<4, R>(rng);
    let a = c(q[0], q[1]);
    let b = c(q[2], q[3]);
    SingleQubitUnitary::from_unitary(Mat2::new(a, -b.conj(), b, a.conj()))
}

pub fn haar_pair<R: Rng + ?Sized>(rng: &mut R) -> LocalUnitaryPair {
    LocalUnitaryPair::new(haar_su2(rng), haar_su2(rng))
}

/// Uniform point on the unit sphere in `N` dimensions.
pub fn unit_vector<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [f64; N] {
    loop {
        let v = [(); N].map(|_| gaussian(rng));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    Uniform::new(lo, hi).sample(rng)
}

/// Random Hermitian 4x4 matrix with Gaussian entries (GUE-like).
#[allow(clippy::needless_range_loop)]
pub fn hermitian4<R: Rng + ?Sized>(rng: &mut R) -> [[C64; 4]; 4] {
    let mut h = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        h[i][i] = c(gaussian(rng), 0.0);
        for j in (i + 1)..4 {
            let z = c(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2;
            h[i][j] = z;
            h[j][i] = z.conj();
        }
    }
    h
}
