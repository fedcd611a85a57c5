use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::gate::{Gate, GateKind};
use crate::math;

/// Unitarity tolerance for MATRIX and CONTROLLED_BLOCK payloads.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub width: usize,
    /// `Some(b)`: the qubit always starts in `|b⟩`. `None`: taken from the input.
    pub preparations: Vec<Option<bool>>,
    pub gates: Vec<Gate>,
    /// Terminal `(qubit, wire)` measurements. Outcome bit `j` of the measured
    /// distribution is the `j`-th smallest wire.
    pub measurements: Vec<(usize, usize)>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            preparations: vec![None; width],
            gates: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn with_preparations(mut self, preparations: Vec<Option<bool>>) -> Self {
        self.preparations = preparations;
        self
    }

    pub fn prepare(mut self, qubit: usize, value: bool) -> Self {
        self.preparations[qubit] = Some(value);
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn with_gates(mut self, gates: impl IntoIterator<Item = Gate>) -> Self {
        self.gates.extend(gates);
        self
    }

    /// Terminally measure every qubit, qubit `k` into wire `k`.
    pub fn measure_all(mut self) -> Self {
        self.measurements = (0..self.width).map(|q| (q, q)).collect();
        self
    }

    pub fn measure(mut self, qubit: usize, wire: usize) -> Self {
        self.measurements.push((qubit, wire));
        self
    }

    /// Terminal output wires in ascending order.
    pub fn output_wires(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.measurements.iter().map(|&(_, w)| w).collect();
        w.sort_unstable();
        w
    }

    /// `(qubit, outcome bit)` for each terminal measurement, sorted by bit.
    pub fn output_layout(&self) -> Vec<(usize, usize)> {
        let mut m = self.measurements.clone();
        m.sort_by_key(|&(_, w)| w);
        m.iter()
            .enumerate()
            .map(|(bit, &(q, _))| (q, bit))
            .collect()
    }

    /// Outcome bit position of a terminally measured qubit.
    pub fn output_bit(&self, qubit: usize) -> Option<usize> {
        self.output_layout()
            .into_iter()
            .find(|&(q, _)| q == qubit)
            .map(|(_, b)| b)
    }

    pub fn num_outputs(&self) -> usize {
        self.measurements.len()
    }

    pub fn terminally_measured(&self) -> BTreeSet<usize> {
        self.measurements.iter().map(|&(q, _)| q).collect()
    }

    /// Quantum gate count; mid-circuit measurements are not counted.
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_quantum_gate()).count()
    }

    pub fn multi_qubit_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.is_quantum_gate() && g.operands.len() > 1)
            .count()
    }

    /// One past the largest classical wire in use.
    pub fn next_wire(&self) -> usize {
        let gate_wires = self.gates.iter().flat_map(|g| g.wires.iter().copied());
        let term = self.measurements.iter().map(|&(_, w)| w);
        gate_wires.chain(term).map(|w| w + 1).max().unwrap_or(0)
    }

    pub fn has_classical_ops(&self) -> bool {
        self.gates
            .iter()
            .any(|g| g.is_measurement() || g.is_classically_controlled())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    OperandOutOfRange(usize),
    DuplicateOperand,
    ArityMismatch { expected: usize, found: usize },
    MatrixShape,
    NonUnitary(f64),
    BlockCount { expected: usize, found: usize },
    BranchCount { expected: usize, found: usize },
    NestedClassicalControl,
    MeasurementInBranch,
    WireWrittenTwice(usize),
    ControlBeforeMeasurement(usize),
    QubitMeasuredTwice(usize),
    PreparationLength { expected: usize, found: usize },
}

/// A broken Circuit or Gate invariant; `gate` is `None` for circuit-level rules.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub gate: Option<usize>,
    pub rule: Rule,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::OperandOutOfRange(_) => "operand-out-of-range",
            Rule::DuplicateOperand => "duplicate-operand",
            Rule::ArityMismatch { .. } => "arity-mismatch",
            Rule::MatrixShape => "matrix-shape",
            Rule::NonUnitary(_) => "non-unitary",
            Rule::BlockCount { .. } => "block-count",
            Rule::BranchCount { .. } => "branch-count",
            Rule::NestedClassicalControl => "nested-classical-control",
            Rule::MeasurementInBranch => "measurement-in-branch",
            Rule::WireWrittenTwice(_) => "wire-written-twice",
            Rule::ControlBeforeMeasurement(_) => "control-before-measurement",
            Rule::QubitMeasuredTwice(_) => "qubit-measured-twice",
            Rule::PreparationLength { .. } => "preparation-length",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gate {
            Some(g) => write!(f, "{} at gate {}", self.rule.name(), g)?,
            None => write!(f, "{}", self.rule.name())?,
        }
        match &self.rule {
            Rule::OperandOutOfRange(q) => write!(f, " (qubit {q})"),
            Rule::NonUnitary(d) => write!(f, " (deviation {d:.3e})"),
            Rule::WireWrittenTwice(w) | Rule::ControlBeforeMeasurement(w) => {
                write!(f, " (wire {w})")
            }
            Rule::QubitMeasuredTwice(q) => write!(f, " (qubit {q})"),
            Rule::ArityMismatch { expected, found }
            | Rule::BlockCount { expected, found }
            | Rule::BranchCount { expected, found }
            | Rule::PreparationLength { expected, found } => {
                write!(f, " (expected {expected}, found {found})")
            }
            _ => Ok(()),
        }
    }
}

/// Every broken invariant of `circuit`; empty iff the circuit is well formed.
pub fn validate_circuit(circuit: &Circuit) -> Vec<Violation> {
    let mut out = Vec::new();
    if circuit.preparations.len() != circuit.width {
        out.push(Violation {
            gate: None,
            rule: Rule::PreparationLength {
                expected: circuit.width,
                found: circuit.preparations.len(),
            },
        });
    }

    let mut written: HashSet<usize> = HashSet::new();
    for (i, g) in circuit.gates.iter().enumerate() {
        let mut rules = Vec::new();
        match &g.kind {
            GateKind::Measure => {
                check_gate(g, circuit.width, &mut rules);
                if let [w] = g.wires[..] {
                    if !written.insert(w) {
                        rules.push(Rule::WireWrittenTwice(w));
                    }
                } else {
                    rules.push(Rule::ArityMismatch {
                        expected: 1,
                        found: g.wires.len(),
                    });
                }
            }
            GateKind::ClassicallyControlled(branches) => {
                for &w in &g.wires {
                    if !written.contains(&w) {
                        rules.push(Rule::ControlBeforeMeasurement(w));
                    }
                }
                let expected = 1usize << g.wires.len().min(20);
                if branches.len() != expected {
                    rules.push(Rule::BranchCount {
                        expected,
                        found: branches.len(),
                    });
                }
                for sub in branches.iter().flatten() {
                    match sub.kind {
                        GateKind::ClassicallyControlled(_) => {
                            rules.push(Rule::NestedClassicalControl)
                        }
                        GateKind::Measure => rules.push(Rule::MeasurementInBranch),
                        _ => check_gate(sub, circuit.width, &mut rules),
                    }
                }
            }
            _ => check_gate(g, circuit.width, &mut rules),
        }
        out.extend(rules.into_iter().map(|rule| Violation {
            gate: Some(i),
            rule,
        }));
    }

    let mut measured = HashSet::new();
    for &(q, w) in &circuit.measurements {
        if q >= circuit.width {
            out.push(Violation {
                gate: None,
                rule: Rule::OperandOutOfRange(q),
            });
        }
        if !measured.insert(q) {
            out.push(Violation {
                gate: None,
                rule: Rule::QubitMeasuredTwice(q),
            });
        }
        if !written.insert(w) {
            out.push(Violation {
                gate: None,
                rule: Rule::WireWrittenTwice(w),
            });
        }
    }
    out
}

fn check_gate(g: &Gate, width: usize, rules: &mut Vec<Rule>) {
    for &q in &g.operands {
        if q >= width {
            rules.push(Rule::OperandOutOfRange(q));
        }
    }
    let distinct: HashSet<_> = g.operands.iter().collect();
    if distinct.len() != g.operands.len() {
        rules.push(Rule::DuplicateOperand);
    }
    match &g.kind {
        GateKind::Matrix(m) | GateKind::Operator(m) => {
            let dim = 1usize << g.operands.len().min(20);
            if m.nrows() != dim || m.ncols() != dim {
                rules.push(Rule::MatrixShape);
                return;
            }
            if let GateKind::Matrix(m) = &g.kind {
                let dev = math::unitarity_deviation(m);
                if dev > UNITARY_TOL {
                    rules.push(Rule::NonUnitary(dev));
                }
            }
        }
        GateKind::ControlledBlock { controls, blocks } => {
            if *controls > g.operands.len() || *controls == 0 {
                rules.push(Rule::ArityMismatch {
                    expected: controls + 1,
                    found: g.operands.len(),
                });
                return;
            }
            let expected = 1usize << (*controls).min(20);
            if blocks.len() != expected {
                rules.push(Rule::BlockCount {
                    expected,
                    found: blocks.len(),
                });
            }
            let dim = 1usize << (g.operands.len() - controls).min(20);
            for b in blocks {
                if b.nrows() != dim || b.ncols() != dim {
                    rules.push(Rule::MatrixShape);
                    return;
                }
                let dev = math::unitarity_deviation(b);
                if dev > UNITARY_TOL {
                    rules.push(Rule::NonUnitary(dev));
                }
            }
        }
        _ => {
            if let Some(expected) = g.expected_arity() {
                if g.operands.len() != expected {
                    rules.push(Rule::ArityMismatch {
                        expected,
                        found: g.operands.len(),
                    });
                }
            }
        }
    }
}
