//! Phase polynomial representation `(p, f)` of incoherent unitaries:
//! `U|x⟩ = e^{i p(x)} |f(x)⟩`.
//!
//! `p` is an arbitrary real table; no polynomial structure is assumed.

use std::f64::consts::PI;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::basis::{gather_bits, scatter_bits};
use crate::ir::gate::{cr_angle, Gate, GateKind};
use crate::math::{self, CMatrix, Complex64};

/// Largest width accepted by [`phase_poly_to_unitary`].
pub const MAX_UNITARY_WIDTH: usize = 12;

/// Tolerance used when reading a representation off a gate matrix.
pub const MATRIX_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePolyRep {
    width: usize,
    phase: Vec<f64>,
    perm: Vec<usize>,
}

impl PhasePolyRep {
    pub fn identity(width: usize) -> Self {
        PhasePolyRep {
            width,
            phase: vec![0.0; 1 << width],
            perm: (0..1 << width).collect(),
        }
    }

    /// Validates that `perm` is a bijection and reduces phases to `[0, 2π)`.
    pub fn new(width: usize, phase: Vec<f64>, perm: Vec<usize>) -> Result<Self> {
        let dim = 1usize << width;
        if phase.len() != dim || perm.len() != dim {
            return Err(Error::WidthMismatch {
                expected: dim,
                found: phase.len().max(perm.len()),
            });
        }
        let mut seen = vec![false; dim];
        for &y in &perm {
            if y >= dim || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidStage(format!(
                    "basis map is not a bijection at {y}"
                )));
            }
        }
        Ok(PhasePolyRep {
            width,
            phase: phase.into_iter().map(math::reduce_phase).collect(),
            perm,
        })
    }

    pub fn from_fns(
        width: usize,
        p: impl Fn(usize) -> f64,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let dim = 1usize << width;
        Self::new(width, (0..dim).map(p).collect(), (0..dim).map(f).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity_perm(&self) -> bool {
        self.perm.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Same `(p, f)` acting on `positions` of a `width`-qubit register,
    /// identity on the other qubits.
    pub fn embed(&self, width: usize, positions: &[usize]) -> PhasePolyRep {
        debug_assert_eq!(positions.len(), self.width);
        let dim = 1usize << width;
        let mut phase = Vec::with_capacity(dim);
        let mut perm = Vec::with_capacity(dim);
        for x in 0..dim {
            let local = gather_bits(x, positions);
            phase.push(self.phase[local]);
            perm.push(scatter_bits(x, positions, self.perm[local]));
        }
        PhasePolyRep { width, phase, perm }
    }
}

/// Representation of `gate` over its own operands, if it has one.
pub fn gate_phase_poly(gate: &Gate) -> Option<PhasePolyRep> {
    let x1 = |x: usize| (x & 1) as f64;
    let both = |x: usize| ((x & 1) & ((x >> 1) & 1)) as f64;
    let rep = match &gate.kind {
        GateKind::X => PhasePolyRep::from_fns(1, |_| 0.0, |x| x ^ 1),
        GateKind::Y => PhasePolyRep::from_fns(1, |x| PI * x1(x), |x| x ^ 1),
        GateKind::Z => PhasePolyRep::from_fns(1, |x| PI * x1(x), |x| x),
        GateKind::S => PhasePolyRep::from_fns(1, |x| PI / 2.0 * x1(x), |x| x),
        GateKind::T => PhasePolyRep::from_fns(1, |x| PI / 4.0 * x1(x), |x| x),
        // Matches the defining matrix diag(e^{iθ/2}, e^{-iθ/2}) exactly.
        GateKind::Rz(t) => PhasePolyRep::from_fns(1, |x| t / 2.0 - t * x1(x), |x| x),
        GateKind::Phase(t) => PhasePolyRep::from_fns(1, |x| t * x1(x), |x| x),
        GateKind::Cx => PhasePolyRep::from_fns(2, |_| 0.0, |x| x ^ ((x & 1) << 1)),
        GateKind::Cz => PhasePolyRep::from_fns(2, |x| PI * both(x), |x| x),
        GateKind::Cr(m) => {
            let a = cr_angle(*m);
            PhasePolyRep::from_fns(2, |x| a * both(x), |x| x)
        }
        GateKind::Swap => PhasePolyRep::from_fns(2, |_| 0.0, |x| ((x & 1) << 1) | (x >> 1)),
        GateKind::Toffoli => PhasePolyRep::from_fns(3, |_| 0.0, |x| x ^ ((x & (x >> 1) & 1) << 2)),
        GateKind::Matrix(_) | GateKind::ControlledBlock { .. } => {
            let m = gate.local_matrix()?;
            return incoherent_check(&m, MATRIX_TOL).ok().flatten();
        }
        GateKind::H
        | GateKind::Rx(_)
        | GateKind::Ry(_)
        | GateKind::Operator(_)
        | GateKind::Measure
        | GateKind::ClassicallyControlled(_) => return None,
    };
    rep.ok()
}

/// Representation of `first` followed by `second`: `(p1 + p2∘f1, f2∘f1)`.
pub fn compose_phase_poly(first: &PhasePolyRep, second: &PhasePolyRep) -> Result<PhasePolyRep> {
    if first.width != second.width {
        return Err(Error::WidthMismatch {
            expected: first.width,
            found: second.width,
        });
    }
    let phase = first
        .phase
        .iter()
        .zip(&first.perm)
        .map(|(&p1, &y)| math::reduce_phase(p1 + second.phase[y]))
        .collect();
    let perm = first.perm.iter().map(|&y| second.perm[y]).collect();
    Ok(PhasePolyRep {
        width: first.width,
        phase,
        perm,
    })
}

/// Representation of a gate sequence over `support` (sorted or not; local bit
/// `i` is `support[i]`), composed gate by gate from the identity. `None` when
/// some gate has no representation.
pub fn segment_to_phase_poly(
    gates: &[Gate],
    support: &[usize],
    caps: &Caps,
) -> Result<Option<PhasePolyRep>> {
    Caps::check("phase polynomial segment", support.len(), caps.table_width)?;
    let mut acc = PhasePolyRep::identity(support.len());
    for g in gates {
        let Some(local) = gate_phase_poly(g) else {
            return Ok(None);
        };
        let positions = g
            .operands
            .iter()
            .map(|q| {
                support
                    .iter()
                    .position(|s| s == q)
                    .ok_or_else(|| Error::Unsupported {
                        index: 0,
                        reason: format!("gate operand {q} outside the segment support"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        acc = compose_phase_poly(&acc, &local.embed(support.len(), &positions))?;
    }
    Ok(Some(acc))
}

/// Column `x` is `e^{ip(x)}` at row `f(x)`.
pub fn phase_poly_to_unitary(rep: &PhasePolyRep) -> Result<CMatrix> {
    Caps::check("phase polynomial unitary", rep.width, MAX_UNITARY_WIDTH)?;
    let dim = 1usize << rep.width;
    let mut m = CMatrix::from_element(dim, dim, math::ZERO);
    for x in 0..dim {
        m[(rep.perm[x], x)] = Complex64::from_polar(1.0, rep.phase[x]);
    }
    Ok(m)
}

/// `(p, f)` of `matrix` if every column holds exactly one entry of modulus at
/// least `1 - tol`. Errors on non-unitary input.
pub fn incoherent_check(matrix: &CMatrix, tol: f64) -> Result<Option<PhasePolyRep>> {
    let deviation = math::unitarity_deviation(matrix);
    if deviation > tol {
        return Err(Error::NonUnitary { deviation });
    }
    let dim = matrix.nrows();
    if !dim.is_power_of_two() {
        return Err(Error::InvalidStage(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let width = dim.trailing_zeros() as usize;
    let mut phase = Vec::with_capacity(dim);
    let mut perm = Vec::with_capacity(dim);
    for x in 0..dim {
        let col = matrix.column(x);
        let mut hits = col
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() >= 1.0 - tol);
        let (Some((row, z)), None) = (hits.next(), hits.next()) else {
            return Ok(None);
        };
        perm.push(row);
        phase.push(z.arg());
    }
    let rep = PhasePolyRep::new(width, phase, perm)?;
    if width <= MAX_UNITARY_WIDTH
        && math::max_abs_diff(&phase_poly_to_unitary(&rep)?, matrix) > tol.max(1e-12) * 10.0
    {
        return Ok(None);
    }
    Ok(Some(rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{c, hadamard, phase};

    fn rep(width: usize, p: impl Fn(usize) -> f64, f: impl Fn(usize) -> usize) -> PhasePolyRep {
        PhasePolyRep::from_fns(width, p, f).unwrap()
    }

    fn assert_phases(r: &PhasePolyRep, expected: &[f64]) {
        for (a, b) in r.phase().iter().zip(expected) {
            assert!(
                math::phase_distance(*a, *b) < 1e-12,
                "{:?} vs {:?}",
                r.phase(),
                expected
            );
        }
    }

    #[test]
    fn t_gate_entry() {
        let r = gate_phase_poly(&Gate::t(0)).unwrap();
        assert_phases(&r, &[0.0, PI / 4.0]);
        assert!(r.is_identity_perm());
    }

    #[test]
    fn cx_entry() {
        let r = gate_phase_poly(&Gate::cx(0, 1)).unwrap();
        assert_phases(&r, &[0.0; 4]);
        // (x1, x2) -> (x1, x1 ^ x2)
        for x1 in 0..2 {
            for x2 in 0..2 {
                assert_eq!(r.perm()[x1 | (x2 << 1)], x1 | ((x1 ^ x2) << 1));
            }
        }
    }

    #[test]
    fn toffoli_entry() {
        let r = gate_phase_poly(&Gate::toffoli(0, 1, 2)).unwrap();
        for x in 0..8 {
            let (x1, x2, x3) = (x & 1, (x >> 1) & 1, (x >> 2) & 1);
            assert_eq!(r.perm()[x], x1 | (x2 << 1) | ((x3 ^ (x1 & x2)) << 2));
        }
    }

    #[test]
    fn non_incoherent_gates_absent() {
        assert!(gate_phase_poly(&Gate::h(0)).is_none());
        assert!(gate_phase_poly(&Gate::rx(0, 0.3)).is_none());
        assert!(gate_phase_poly(&Gate::ry(0, 0.3)).is_none());
        assert!(gate_phase_poly(&Gate::matrix(vec![0], hadamard())).is_none());
    }

    #[test]
    fn identity_is_neutral() {
        let r = gate_phase_poly(&Gate::y(0)).unwrap();
        assert_eq!(
            compose_phase_poly(&PhasePolyRep::identity(1), &r).unwrap(),
            r
        );
    }

    #[test]
    fn x_then_z() {
        let x = gate_phase_poly(&Gate::x(0)).unwrap();
        let z = gate_phase_poly(&Gate::z(0)).unwrap();
        let r = compose_phase_poly(&x, &z).unwrap();
        // Z·X = [[0, 1], [-1, 0]]: column 0 is -|1>, column 1 is +|0>.
        let zx = math::pauli(3) * math::pauli(1);
        assert_eq!(zx[(1, 0)], c(-1.0, 0.0));
        assert_phases(&r, &[PI, 0.0]);
        assert_eq!(r.perm(), &[1, 0]);
        let m = phase_poly_to_unitary(&r).unwrap();
        assert!(math::max_abs_diff(&m, &zx) < 1e-12);
    }

    #[test]
    fn z_squared_is_identity() {
        let z = gate_phase_poly(&Gate::z(0)).unwrap();
        let r = compose_phase_poly(&z, &z).unwrap();
        assert_phases(&r, &[0.0, 0.0]);
        assert!(r.is_identity_perm());
    }

    #[test]
    fn compose_width_mismatch() {
        assert!(
            compose_phase_poly(&PhasePolyRep::identity(1), &PhasePolyRep::identity(2)).is_err()
        );
    }

    #[test]
    fn empty_segment_is_identity() {
        let r = segment_to_phase_poly(&[], &[0, 1], &Caps::default())
            .unwrap()
            .unwrap();
        assert_eq!(r, PhasePolyRep::identity(2));
    }

    #[test]
    fn segment_with_h_absent() {
        assert!(segment_to_phase_poly(&[Gate::h(0)], &[0], &Caps::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn segment_cap_enforced() {
        let caps = Caps {
            table_width: 2,
            ..Caps::default()
        };
        assert!(matches!(
            segment_to_phase_poly(&[], &[0, 1, 2], &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn unitary_examples() {
        let z = phase_poly_to_unitary(&rep(1, |x| PI * x as f64, |x| x)).unwrap();
        assert!(math::max_abs_diff(&z, &math::pauli(3)) < 1e-12);
        let id = phase_poly_to_unitary(&PhasePolyRep::identity(2)).unwrap();
        assert!(math::max_abs_diff(&id, &math::identity(4)) < 1e-12);
        // e^{iπx}|x⊕1>: columns |1> and -|0>, which is Y = i|1><0| - i|0><1| up to the phase i.
        let y = phase_poly_to_unitary(&rep(1, |x| PI * x as f64, |x| x ^ 1)).unwrap();
        let expected =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(math::max_abs_diff(&y, &expected) < 1e-12);
        assert!(math::equal_up_to_global_phase(&y, &math::pauli(2), 1e-12));
    }

    #[test]
    fn unitary_width_cap() {
        assert!(phase_poly_to_unitary(&PhasePolyRep::identity(13)).is_err());
    }

    #[test]
    fn incoherent_check_examples() {
        let z = incoherent_check(&math::pauli(3), 1e-10).unwrap().unwrap();
        assert_phases(&z, &[0.0, PI]);
        assert!(z.is_identity_perm());
        assert!(incoherent_check(&hadamard(), 1e-10).unwrap().is_none());
        let d = incoherent_check(&phase(0.7), 1e-10).unwrap().unwrap();
        assert_phases(&d, &[0.0, 0.7]);
    }

    #[test]
    fn incoherent_check_rejects_non_unitary() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            incoherent_check(&m, 1e-10),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn embed_places_local_bits() {
        let cx = gate_phase_poly(&Gate::cx(0, 1)).unwrap();
        // control on global bit 2, target on global bit 0
        let e = cx.embed(3, &[2, 0]);
        assert_eq!(e.perm()[0b100], 0b101);
        assert_eq!(e.perm()[0b001], 0b001);
    }
}
