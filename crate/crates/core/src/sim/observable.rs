use super::density::DensityMatrix;
use super::statevector::StateVector;
use crate::error::{Error, Result};
use crate::math::{self, CMatrix, Complex64};

/// Hermitian observable on a register.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// One 2×2 factor per qubit, qubit 0 first.
    Product(Vec<CMatrix>),
    Dense(CMatrix),
}

const HERMITIAN_TOL: f64 = 1e-10;

impl Observable {
    pub fn product(factors: Vec<CMatrix>) -> Result<Self> {
        for f in &factors {
            if f.shape() != (2, 2) || math::hermiticity_deviation(f) > HERMITIAN_TOL {
                return Err(Error::InvalidStage(
                    "observable factor must be a Hermitian 2x2 matrix".into(),
                ));
            }
        }
        Ok(Observable::Product(factors))
    }

    pub fn dense(m: CMatrix) -> Result<Self> {
        if !m.is_square()
            || !m.nrows().is_power_of_two()
            || math::hermiticity_deviation(&m) > HERMITIAN_TOL
        {
            return Err(Error::InvalidStage(
                "observable must be a Hermitian 2^n x 2^n matrix".into(),
            ));
        }
        Ok(Observable::Dense(m))
    }

    /// `Z ⊗ Z ⊗ …` on `width` qubits.
    pub fn all_z(width: usize) -> Self {
        Observable::Product(vec![math::pauli(3); width])
    }

    pub fn width(&self) -> usize {
        match self {
            Observable::Product(f) => f.len(),
            Observable::Dense(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            Observable::Product(f) => math::kron_lsb(f),
            Observable::Dense(m) => m.clone(),
        }
    }

    fn check(&self, width: usize) -> Result<()> {
        if self.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                found: self.width(),
            });
        }
        Ok(())
    }

    /// `⟨ψ|A|ψ⟩` (not normalized by `⟨ψ|ψ⟩`).
    pub fn expectation_state(&self, psi: &StateVector) -> Result<f64> {
        self.check(psi.width())?;
        let mut a_psi = psi.clone();
        match self {
            Observable::Product(f) => {
                for (q, m) in f.iter().enumerate() {
                    a_psi.apply_matrix(m, &[q]);
                }
            }
            Observable::Dense(m) => {
                let targets: Vec<usize> = (0..psi.width()).collect();
                a_psi.apply_matrix(m, &targets);
            }
        }
        Ok(psi.inner(&a_psi).re)
    }

    /// `tr(A ρ)`.
    pub fn expectation_density(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check(rho.width())?;
        let a = self.to_dense();
        let r = rho.matrix();
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..a.nrows() {
            for k in 0..a.ncols() {
                t += a[(i, k)] * r[(k, i)];
            }
        }
        Ok(t.re)
    }
}

/// Expectation of a diagonal observable with eigenvalue `values[z]` under
/// outcome distribution `dist`.
pub fn expectation_from_distribution(dist: &[f64], values: impl Fn(usize) -> f64) -> f64 {
    dist.iter().enumerate().map(|(z, p)| p * values(z)).sum()
}

/// `(-1)^{popcount(z)}`, the eigenvalue of `Z⊗…⊗Z` on `|z⟩`.
pub fn parity_sign(z: usize) -> f64 {
    if z.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{c, pauli};

    #[test]
    fn product_and_dense_agree() {
        let psi = StateVector::from_amplitudes(
            2,
            vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        let obs = Observable::product(vec![pauli(1), pauli(3)]).unwrap();
        let dense = Observable::dense(obs.to_dense()).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let a = obs.expectation_state(&psi).unwrap();
        assert!((a - dense.expectation_state(&psi).unwrap()).abs() < 1e-14);
        assert!((a - obs.expectation_density(&rho).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn z_parity_on_basis() {
        let obs = Observable::all_z(3);
        let psi = StateVector::basis(3, 0b101);
        assert_eq!(obs.expectation_state(&psi).unwrap(), parity_sign(0b101));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = pauli(1);
        m[(0, 1)] = c(2.0, 0.0);
        assert!(Observable::product(vec![m]).is_err());
    }
}
