use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::basis::{gather_bits, scatter_bits, BasisState};
use crate::ir::gate::{Gate, GateKind};
use crate::ir::program::resolve_preparations;
use crate::ir::Circuit;
use crate::math::{CMatrix, Complex64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(width: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << width];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { width, amps }
    }

    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << width {
            return Err(Error::WidthMismatch {
                expected: 1 << width,
                found: amps.len(),
            });
        }
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Apply a `2^k × 2^k` matrix (not necessarily unitary) to `targets`,
    /// local bit `i` being `targets[i]`.
    pub fn apply_matrix(&mut self, m: &CMatrix, targets: &[usize]) {
        apply_to_amplitudes(&mut self.amps, m, targets);
    }

    /// Zero out components where `qubit` differs from `value`.
    pub fn project(&mut self, qubit: usize, value: bool) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i >> qubit) & 1 == 1) != value {
                *a = ZERO;
            }
        }
    }

    /// Same state on `width + extra` qubits with the new qubits in `|0⟩`.
    pub fn extend(&self, extra: usize) -> StateVector {
        let mut amps = vec![ZERO; 1 << (self.width + extra)];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        StateVector {
            width: self.width + extra,
            amps,
        }
    }
}

pub(crate) fn apply_to_amplitudes(amps: &mut [Complex64], m: &CMatrix, targets: &[usize]) {
    let k = targets.len();
    let ld = 1usize << k;
    debug_assert_eq!(m.nrows(), ld);
    let mask = targets.iter().fold(0usize, |acc, &t| acc | (1 << t));
    if k == 1 {
        let t = 1usize << targets[0];
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        for i in 0..amps.len() {
            if i & t == 0 {
                let (x0, x1) = (amps[i], amps[i | t]);
                amps[i] = a * x0 + b * x1;
                amps[i | t] = c * x0 + d * x1;
            }
        }
        return;
    }
    let mut idx = vec![0usize; ld];
    let mut buf = vec![ZERO; ld];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (j, slot) in idx.iter_mut().enumerate() {
            *slot = scatter_bits(base, targets, j);
        }
        for (r, out) in buf.iter_mut().enumerate() {
            *out = (0..ld).map(|col| m[(r, col)] * amps[idx[col]]).sum();
        }
        for (j, &i) in idx.iter().enumerate() {
            amps[i] = buf[j];
        }
    }
}

/// Initial state for a requested basis input: fixed preparations override
/// the corresponding bits.
pub fn initial_basis_state(circuit: &Circuit, input: &BasisState) -> Result<StateVector> {
    if input.width() != circuit.width {
        return Err(Error::WidthMismatch {
            expected: circuit.width,
            found: input.width(),
        });
    }
    Ok(StateVector::basis(
        circuit.width,
        resolve_preparations(&circuit.preparations, input.index()),
    ))
}

/// Full-width state from amplitudes over the free (unprepared) qubits, taken
/// in ascending qubit order; fixed qubits hold their prepared values.
pub fn embed_free_state(preparations: &[Option<bool>], free: &StateVector) -> Result<StateVector> {
    let positions: Vec<usize> = (0..preparations.len())
        .filter(|&q| preparations[q].is_none())
        .collect();
    if free.width() != positions.len() {
        return Err(Error::WidthMismatch {
            expected: positions.len(),
            found: free.width(),
        });
    }
    let base = resolve_preparations(preparations, 0);
    let mut amps = vec![ZERO; 1 << preparations.len()];
    for (v, a) in free.amplitudes().iter().enumerate() {
        amps[scatter_bits(base, &positions, v)] = *a;
    }
    StateVector::from_amplitudes(preparations.len(), amps)
}

/// Exact amplitudes of the gate sequence applied to `|input⟩`. Mid-circuit
/// measurements and classical control are rejected; use
/// [`crate::sim::measurement_distribution`] for those.
pub fn simulate_statevector(
    circuit: &Circuit,
    input: &BasisState,
    caps: &Caps,
) -> Result<StateVector> {
    Caps::check("statevector", circuit.width, caps.statevector_width)?;
    let mut state = initial_basis_state(circuit, input)?;
    for (i, g) in circuit.gates.iter().enumerate() {
        match &g.kind {
            GateKind::Measure | GateKind::ClassicallyControlled(_) => {
                return Err(Error::UnresolvedClassicalControl(i));
            }
            _ => apply_gate(&mut state, g),
        }
    }
    Ok(state)
}

pub(crate) fn apply_gate(state: &mut StateVector, g: &Gate) {
    if let Some(m) = g.local_matrix() {
        state.apply_matrix(&m, &g.operands);
    }
}

/// One measurement-outcome history of the circuit, with its unnormalized state.
#[derive(Debug, Clone)]
pub(crate) struct Branch {
    pub state: StateVector,
    pub wires: Vec<(usize, bool)>,
}

impl Branch {
    fn read(&self, wires: &[usize]) -> usize {
        wires.iter().enumerate().fold(0, |acc, (i, w)| {
            let b = self
                .wires
                .iter()
                .find(|(x, _)| x == w)
                .is_some_and(|&(_, b)| b);
            acc | ((b as usize) << i)
        })
    }
}

/// Exhaustive branching over mid-circuit measurement outcomes.
pub(crate) fn evolve_branches(circuit: &Circuit, init: StateVector) -> Vec<Branch> {
    let mut branches = vec![Branch {
        state: init,
        wires: Vec::new(),
    }];
    for g in &circuit.gates {
        match &g.kind {
            GateKind::Measure => {
                let (q, w) = (g.operands[0], g.wires[0]);
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    for value in [false, true] {
                        let mut s = b.state.clone();
                        s.project(q, value);
                        if s.norm_sqr() > 0.0 {
                            let mut wires = b.wires.clone();
                            wires.push((w, value));
                            next.push(Branch { state: s, wires });
                        }
                    }
                }
                branches = next;
            }
            GateKind::ClassicallyControlled(arms) => {
                for b in &mut branches {
                    let mu = b.read(&g.wires);
                    for sub in &arms[mu] {
                        apply_gate(&mut b.state, sub);
                    }
                }
            }
            _ => {
                for b in &mut branches {
                    apply_gate(&mut b.state, g);
                }
            }
        }
    }
    branches
}

/// Outcome distribution over the terminal wires, starting from `init`.
/// Sums to the squared norm of the evolved state (1 for unitary circuits).
pub fn distribution_from_state(
    circuit: &Circuit,
    init: StateVector,
    caps: &Caps,
) -> Result<Vec<f64>> {
    Caps::check("statevector", circuit.width, caps.statevector_width)?;
    if init.width() != circuit.width {
        return Err(Error::WidthMismatch {
            expected: circuit.width,
            found: init.width(),
        });
    }
    let qubits: Vec<usize> = circuit
        .output_layout()
        .into_iter()
        .map(|(q, _)| q)
        .collect();
    let mut dist = vec![0.0; 1 << qubits.len()];
    for b in evolve_branches(circuit, init) {
        for (i, a) in b.state.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p != 0.0 {
                dist[gather_bits(i, &qubits)] += p;
            }
        }
    }
    Ok(dist)
}

/// Exact outcome distribution over the terminal wires for a basis input.
pub fn measurement_distribution(
    circuit: &Circuit,
    input: &BasisState,
    caps: &Caps,
) -> Result<Vec<f64>> {
    distribution_from_state(circuit, initial_basis_state(circuit, input)?, caps)
}
