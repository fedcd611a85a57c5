use super::statevector::{apply_to_amplitudes, StateVector};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::basis::BasisState;
use crate::ir::gate::GateKind;
use crate::ir::program::resolve_preparations;
use crate::ir::Circuit;
use crate::math::{CMatrix, Complex64};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    width: usize,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(rho: CMatrix) -> Result<Self> {
        let dim = rho.nrows();
        if !rho.is_square() || !dim.is_power_of_two() {
            return Err(Error::InvalidStage(format!(
                "{}x{} is not a register density matrix",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(DensityMatrix {
            width: dim.trailing_zeros() as usize,
            rho,
        })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = CMatrix::from_column_slice(state.amplitudes().len(), 1, state.amplitudes());
        DensityMatrix {
            width: state.width(),
            rho: &v * v.adjoint(),
        }
    }

    pub fn basis(width: usize, index: usize) -> Self {
        Self::from_pure(&StateVector::basis(width, index))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `ρ ↦ G ρ G†` with `G` acting on `targets`.
    pub fn apply_operator(&mut self, g: &CMatrix, targets: &[usize]) {
        let dim = self.rho.nrows();
        // left multiply column by column
        for j in 0..dim {
            let mut col: Vec<Complex64> = self.rho.column(j).iter().copied().collect();
            apply_to_amplitudes(&mut col, g, targets);
            self.rho.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        // ρ G† = (G ρ†)†
        let mut adj = self.rho.adjoint();
        for j in 0..dim {
            let mut col: Vec<Complex64> = adj.column(j).iter().copied().collect();
            apply_to_amplitudes(&mut col, g, targets);
            adj.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        self.rho = adj.adjoint();
    }
}

/// Exact `(P…)ρ(P…)†` evolution of each variant from the basis input. Only
/// gates and operator insertions are allowed; traces may drop below 1.
pub fn apply_operator_terms(
    variants: &[Circuit],
    input: &BasisState,
    caps: &Caps,
) -> Result<Vec<DensityMatrix>> {
    variants
        .iter()
        .map(|c| {
            Caps::check("density matrix", c.width, caps.density_width)?;
            if input.width() != c.width {
                return Err(Error::WidthMismatch {
                    expected: c.width,
                    found: input.width(),
                });
            }
            let mut rho = DensityMatrix::basis(
                c.width,
                resolve_preparations(&c.preparations, input.index()),
            );
            evolve_density(&mut rho, c)?;
            Ok(rho)
        })
        .collect()
}

/// Evolve `rho` through every gate of `circuit` (no measurements or classical control).
pub fn evolve_density(rho: &mut DensityMatrix, circuit: &Circuit) -> Result<()> {
    for (i, g) in circuit.gates.iter().enumerate() {
        match g.kind {
            GateKind::Measure | GateKind::ClassicallyControlled(_) => {
                return Err(Error::UnresolvedClassicalControl(i));
            }
            _ => {
                let m = g.local_matrix().expect("quantum gate has a matrix");
                rho.apply_operator(&m, &g.operands);
            }
        }
    }
    Ok(())
}
