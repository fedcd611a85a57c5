//! Seeded random states for testing and verification.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::math::{CMatrix, Complex64};
use crate::sim::{DensityMatrix, StateVector};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn haar_state(width: usize, rng: &mut impl Rng) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1usize << width).map(|_| gaussian(rng)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(width, amps).expect("length matches width")
}

/// Full-rank random mixed state `G G† / tr(G G†)` with Gaussian `G`.
pub fn wishart_density(width: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1usize << width;
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DensityMatrix::from_matrix(rho.map(|z| z / tr)).expect("square power-of-two matrix")
}

/// Haar-random unitary: QR of a Gaussian matrix with the phases of `R`'s
/// diagonal absorbed into `Q`.
pub fn haar_unitary(width: usize, rng: &mut impl Rng) -> CMatrix {
    let d = 1usize << width;
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}
