use super::basis::with_bit;
use super::circuit::{validate_circuit, Circuit};
use super::stage::ClassicalStage;
use crate::error::{Error, Result};

/// A quantum circuit together with classical pre- and post-processing.
///
/// Running the program on a requested basis input `x`:
/// 1. qubits with a fixed entry in `input_preparations` are overwritten;
/// 2. `input_premap`, if any, maps the resulting bitstring to the state the
///    circuit actually starts from (a stochastic premap samples it);
/// 3. the circuit runs and its terminal measurements are read out;
/// 4. `post_stages` are applied in order;
/// 5. the distribution is scaled by `weight`, which is 1 except for cut
///    variants whose operator insertions were folded away.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridProgram {
    pub input_preparations: Vec<Option<bool>>,
    pub input_premap: Option<ClassicalStage>,
    pub circuit: Circuit,
    pub post_stages: Vec<ClassicalStage>,
    pub weight: f64,
}

impl HybridProgram {
    pub fn from_circuit(circuit: Circuit) -> Self {
        HybridProgram {
            input_preparations: circuit.preparations.clone(),
            input_premap: None,
            circuit,
            post_stages: Vec::new(),
            weight: 1.0,
        }
    }

    pub fn width(&self) -> usize {
        self.circuit.width
    }

    pub fn num_outputs(&self) -> usize {
        self.circuit.num_outputs()
    }

    /// Requested input with fixed preparations applied.
    pub fn resolve_input(&self, x: usize) -> usize {
        resolve_preparations(&self.input_preparations, x)
    }

    pub fn validate(&self) -> Result<()> {
        let violations = validate_circuit(&self.circuit);
        if !violations.is_empty() {
            return Err(Error::InvalidCircuit(violations));
        }
        if self.input_preparations.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: self.input_preparations.len(),
            });
        }
        if let Some(p) = &self.input_premap {
            if p.width() != self.width() {
                return Err(Error::WidthMismatch {
                    expected: self.width(),
                    found: p.width(),
                });
            }
        }
        for s in &self.post_stages {
            if s.width() != self.num_outputs() {
                return Err(Error::WidthMismatch {
                    expected: self.num_outputs(),
                    found: s.width(),
                });
            }
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(Error::InvalidStage(format!(
                "weight {} must be positive",
                self.weight
            )));
        }
        Ok(())
    }
}

pub fn resolve_preparations(preparations: &[Option<bool>], x: usize) -> usize {
    preparations
        .iter()
        .enumerate()
        .fold(x, |acc, (q, p)| match p {
            Some(b) => with_bit(acc, q, *b),
            None => acc,
        })
}

/// All basis indices consistent with the fixed preparations.
pub fn admissible_inputs(preparations: &[Option<bool>]) -> Vec<usize> {
    let free: Vec<usize> = (0..preparations.len())
        .filter(|&q| preparations[q].is_none())
        .collect();
    let base = resolve_preparations(preparations, 0);
    (0..1usize << free.len())
        .map(|v| super::basis::scatter_bits(base, &free, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_overrides_fixed_bits() {
        let preps = [Some(true), None, Some(false)];
        assert_eq!(resolve_preparations(&preps, 0b110), 0b011);
        let mut adm = admissible_inputs(&preps);
        adm.sort();
        assert_eq!(adm, vec![0b001, 0b011]);
    }

    #[test]
    fn stage_width_checked() {
        let mut p = HybridProgram::from_circuit(Circuit::new(2).measure_all());
        p.post_stages.push(ClassicalStage::identity(1));
        assert!(p.validate().is_err());
        p.post_stages[0] = ClassicalStage::identity(2);
        assert!(p.validate().is_ok());
    }
}
