//! Small dense complex linear algebra helpers shared by the IR, the passes and
//! the simulator.
//!
//! Multi-qubit matrices are indexed little-endian over their operand list:
//! local index bit `i` is the value of operand `i`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

/// `σ_k` for k in 0..4: identity, X, Y, Z.
pub fn pauli(k: usize) -> CMatrix {
    match k {
        0 => identity(2),
        1 => mat2(ZERO, ONE, ONE, ZERO),
        2 => mat2(ZERO, -I, I, ZERO),
        3 => mat2(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn hadamard() -> CMatrix {
    let h = c(FRAC_1_SQRT_2, 0.0);
    mat2(h, h, h, -h)
}

/// Diagonal `diag(1, e^{iθ})`.
pub fn phase(theta: f64) -> CMatrix {
    mat2(ONE, ZERO, ZERO, Complex64::from_polar(1.0, theta))
}

/// `cos(θ/2)·1 − i·sin(θ/2)·X`.
pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    mat2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// `cos(θ/2)·1 − i·sin(θ/2)·Y`.
pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    mat2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `diag(e^{iθ/2}, e^{−iθ/2})`.
pub fn rz(theta: f64) -> CMatrix {
    mat2(
        Complex64::from_polar(1.0, theta / 2.0),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, -theta / 2.0),
    )
}

/// Tensor product of per-operand matrices, first operand least significant.
pub fn kron_lsb(factors: &[CMatrix]) -> CMatrix {
    let mut out = identity(1);
    for f in factors {
        out = f.kronecker(&out);
    }
    out
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Max-entry deviation of `U†U` from the identity; infinite for non-square input.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(m.adjoint() * m), &identity(m.nrows()))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// Whether `b = e^{iφ}·a` entrywise to `tol` for some global phase `φ`.
pub fn equal_up_to_global_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let Some((k, _)) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
    else {
        return true;
    };
    if a[k].norm() <= tol {
        return b.iter().all(|z| z.norm() <= tol);
    }
    let ratio = b[k] / a[k];
    if (ratio.norm() - 1.0).abs() > tol {
        return false;
    }
    let rot = ratio / ratio.norm();
    max_abs_diff(&a.map(|z| z * rot), b) <= tol
}

pub fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Euler angles `(φ, a, b, c)` with `U = e^{iφ}·rz(a)·rx(b)·rz(c)` using the
/// [`rz`] and [`rx`] conventions of this module.
pub fn zxz_decompose(u: &CMatrix) -> (f64, f64, f64, f64) {
    assert_eq!(u.shape(), (2, 2));
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    // Standard form U = e^{iφ} Rz(α) Rx(β) Rz(γ) with Rz(α) = diag(e^{-iα/2}, e^{iα/2}).
    let beta = 2.0 * u10.norm().atan2(u00.norm());
    let eps = 1e-12;
    let (sum, diff) = if u10.norm() < eps {
        (u11.arg() - u00.arg(), u11.arg() - u00.arg())
    } else if u00.norm() < eps {
        (u10.arg() - u01.arg(), u10.arg() - u01.arg())
    } else {
        (u11.arg() - u00.arg(), u10.arg() - u01.arg())
    };
    // the half-angle split is ambiguous by π; keep the candidate that fits
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    for shift in [0.0, TAU] {
        let (alpha, gamma) = ((sum + diff + shift) / 2.0, (sum - diff - shift) / 2.0);
        let w = rz(-alpha) * rx(beta) * rz(-gamma);
        let overlap: Complex64 = w.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
        let global = overlap.arg();
        let err = max_abs_diff(&w.map(|z| z * Complex64::from_polar(1.0, global)), u);
        if err < best.0 {
            best = (err, global, alpha, gamma);
        }
    }
    let (_, global, alpha, gamma) = best;
    // rz here is the standard Rz with the angle negated.
    (reduce_phase(global), -alpha, beta, -gamma)
}
