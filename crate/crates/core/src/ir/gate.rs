use std::f64::consts::PI;

use crate::math::{self, CMatrix, Complex64, ONE, ZERO};

/// Gate payload. Matrix payloads use the little-endian operand convention of
/// [`crate::math`].
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Phase(f64),
    Cx,
    Cz,
    /// Controlled `diag(1, e^{2πi/2^m})`.
    Cr(u32),
    Swap,
    Toffoli,
    Matrix(CMatrix),
    /// `Σ_i |i⟩⟨i| ⊗ U_i`; the first `controls` operands are controls, the
    /// rest targets. Control value `i` is read little-endian from the controls.
    ControlledBlock {
        controls: usize,
        blocks: Vec<CMatrix>,
    },
    /// Branch `μ` runs when the controlling wires read `μ` (first wire least
    /// significant).
    ClassicallyControlled(Vec<Vec<Gate>>),
    /// Mid-circuit computational-basis measurement into a classical wire.
    Measure,
    /// Arbitrary (possibly non-unitary) operator insertion, used by cut variants.
    Operator(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Qubit operands, 0-based. For classically controlled gates this is the
    /// sorted union of the branch operands.
    pub operands: Vec<usize>,
    /// Classical wires: the target wire of a measurement, or the controlling
    /// wires of a classically controlled gate.
    pub wires: Vec<usize>,
}

/// A gate seen as `Σ_i |i⟩⟨i| ⊗ U_i` over its controls.
#[derive(Debug, Clone)]
pub struct ControlledView {
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    pub blocks: Vec<CMatrix>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Self {
        Gate {
            kind,
            operands,
            wires: Vec::new(),
        }
    }

    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Gate::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Gate::new(GateKind::Z, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Gate::new(GateKind::S, vec![q])
    }
    pub fn t(q: usize) -> Self {
        Gate::new(GateKind::T, vec![q])
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rx(theta), vec![q])
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Ry(theta), vec![q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rz(theta), vec![q])
    }
    pub fn phase(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Phase(theta), vec![q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cx, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Cz, vec![a, b])
    }
    pub fn cr(control: usize, target: usize, m: u32) -> Self {
        Gate::new(GateKind::Cr(m), vec![control, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }
    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::new(GateKind::Toffoli, vec![c1, c2, target])
    }
    pub fn matrix(operands: Vec<usize>, m: CMatrix) -> Self {
        Gate::new(GateKind::Matrix(m), operands)
    }
    pub fn operator(operands: Vec<usize>, m: CMatrix) -> Self {
        Gate::new(GateKind::Operator(m), operands)
    }
    pub fn controlled_block(
        controls: Vec<usize>,
        targets: Vec<usize>,
        blocks: Vec<CMatrix>,
    ) -> Self {
        let n = controls.len();
        let mut operands = controls;
        operands.extend(targets);
        Gate::new(
            GateKind::ControlledBlock {
                controls: n,
                blocks,
            },
            operands,
        )
    }
    pub fn measure(qubit: usize, wire: usize) -> Self {
        Gate {
            kind: GateKind::Measure,
            operands: vec![qubit],
            wires: vec![wire],
        }
    }
    pub fn classically_controlled(wires: Vec<usize>, branches: Vec<Vec<Gate>>) -> Self {
        let mut operands: Vec<usize> = branches
            .iter()
            .flatten()
            .flat_map(|g| g.operands.iter().copied())
            .collect();
        operands.sort_unstable();
        operands.dedup();
        Gate {
            kind: GateKind::ClassicallyControlled(branches),
            operands,
            wires,
        }
    }

    /// Interchange-format name of the gate kind.
    pub fn name(&self) -> &'static str {
        match self.kind {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Phase(_) => "PHASE",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
            GateKind::Cr(_) => "CR",
            GateKind::Swap => "SWAP",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Matrix(_) => "MATRIX",
            GateKind::ControlledBlock { .. } => "CONTROLLED_BLOCK",
            GateKind::ClassicallyControlled(_) => "CLASSICALLY_CONTROLLED",
            GateKind::Measure => "MEASURE",
            GateKind::Operator(_) => "OPERATOR",
        }
    }

    /// Operand count fixed by the kind, if any.
    pub fn expected_arity(&self) -> Option<usize> {
        match &self.kind {
            GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::T
            | GateKind::Rx(_)
            | GateKind::Ry(_)
            | GateKind::Rz(_)
            | GateKind::Phase(_)
            | GateKind::Measure => Some(1),
            GateKind::Cx | GateKind::Cz | GateKind::Cr(_) | GateKind::Swap => Some(2),
            GateKind::Toffoli => Some(3),
            GateKind::Matrix(m) | GateKind::Operator(m) => {
                Some(m.nrows().trailing_zeros() as usize)
            }
            GateKind::ControlledBlock { .. } | GateKind::ClassicallyControlled(_) => None,
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, GateKind::Measure)
    }

    pub fn is_classically_controlled(&self) -> bool {
        matches!(self.kind, GateKind::ClassicallyControlled(_))
    }

    /// Counts toward circuit gate statistics; mid-circuit measurements do not.
    pub fn is_quantum_gate(&self) -> bool {
        !self.is_measurement()
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.operands.contains(&qubit)
    }

    /// Local matrix over the operands, little-endian. `None` for measurements
    /// and classically controlled gates.
    pub fn local_matrix(&self) -> Option<CMatrix> {
        let m = match &self.kind {
            GateKind::X => math::pauli(1),
            GateKind::Y => math::pauli(2),
            GateKind::Z => math::pauli(3),
            GateKind::H => math::hadamard(),
            GateKind::S => math::phase(PI / 2.0),
            GateKind::T => math::phase(PI / 4.0),
            GateKind::Rx(t) => math::rx(*t),
            GateKind::Ry(t) => math::ry(*t),
            GateKind::Rz(t) => math::rz(*t),
            GateKind::Phase(t) => math::phase(*t),
            GateKind::Matrix(m) | GateKind::Operator(m) => m.clone(),
            GateKind::Swap => permutation_matrix(2, |x| ((x & 1) << 1) | (x >> 1)),
            GateKind::Cx
            | GateKind::Cz
            | GateKind::Cr(_)
            | GateKind::Toffoli
            | GateKind::ControlledBlock { .. } => {
                let view = self.controlled_view()?;
                controlled_matrix(view.controls.len(), &view.blocks)
            }
            GateKind::Measure | GateKind::ClassicallyControlled(_) => return None,
        };
        Some(m)
    }

    pub fn controlled_view(&self) -> Option<ControlledView> {
        let ops = &self.operands;
        let (nc, blocks) = match &self.kind {
            GateKind::Cx => (1, vec![math::identity(2), math::pauli(1)]),
            GateKind::Cz => (1, vec![math::identity(2), math::pauli(3)]),
            GateKind::Cr(m) => (1, vec![math::identity(2), math::phase(cr_angle(*m))]),
            GateKind::Toffoli => {
                let mut b = vec![math::identity(2); 4];
                b[3] = math::pauli(1);
                (2, b)
            }
            GateKind::ControlledBlock { controls, blocks } => (*controls, blocks.clone()),
            _ => return None,
        };
        if ops.len() < nc {
            return None;
        }
        Some(ControlledView {
            controls: ops[..nc].to_vec(),
            targets: ops[nc..].to_vec(),
            blocks,
        })
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn remap_qubits(&self, map: &impl Fn(usize) -> usize) -> Gate {
        let kind = match &self.kind {
            GateKind::ClassicallyControlled(branches) => GateKind::ClassicallyControlled(
                branches
                    .iter()
                    .map(|b| b.iter().map(|g| g.remap_qubits(map)).collect())
                    .collect(),
            ),
            k => k.clone(),
        };
        Gate {
            kind,
            operands: self.operands.iter().map(|&q| map(q)).collect(),
            wires: self.wires.clone(),
        }
    }
}

pub fn cr_angle(m: u32) -> f64 {
    2.0 * PI / 2f64.powi(m as i32)
}

/// 0/1 matrix sending basis state `x` to `f(x)`.
pub fn permutation_matrix(width: usize, f: impl Fn(usize) -> usize) -> CMatrix {
    let dim = 1 << width;
    let mut m = CMatrix::from_element(dim, dim, ZERO);
    for x in 0..dim {
        m[(f(x), x)] = ONE;
    }
    m
}

/// Block-diagonal `Σ_i |i⟩⟨i| ⊗ U_i` with the control register in the low bits.
pub fn controlled_matrix(controls: usize, blocks: &[CMatrix]) -> CMatrix {
    let nc = 1usize << controls;
    let td = blocks.first().map_or(1, |b| b.nrows());
    let dim = nc * td;
    let mut m = CMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (i, u) in blocks.iter().enumerate() {
        for r in 0..td {
            for col in 0..td {
                m[(i + nc * r, i + nc * col)] = u[(r, col)];
            }
        }
    }
    m
}
