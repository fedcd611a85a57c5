//! Quasi-probability decompositions for cutting a two-qubit Pauli
//! exponential (horizontal cut) or a single wire (vertical cut).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ir::{validate_circuit, Circuit, Gate, GateKind};
use crate::math::{self, CMatrix, Complex64};

const INVOLUTION_TOL: f64 = 1e-10;
const FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertionRole {
    Identity,
    /// The involution itself.
    Unitary,
    /// `(1 ± A)/2`.
    Projector,
    /// `(1 ± iA)/√2`.
    Rotation,
    /// Observable measured on the cut wire.
    Observable,
    /// Density matrix prepared on the new wire.
    State,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Insertion {
    pub role: InsertionRole,
    pub matrix: CMatrix,
}

/// One term of a cut decomposition. Horizontal: `insertions_a = [P_k]` on the
/// first qubit, `insertions_b = [Q_k]` on the second. Vertical:
/// `insertions_a = [O_k]` measured before the cut, `insertions_b = [ρ_k]`
/// prepared after it.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTerm {
    /// 1-based term number.
    pub index: usize,
    pub coeff: f64,
    pub insertions_a: Vec<Insertion>,
    pub insertions_b: Vec<Insertion>,
    pub kind: CutKind,
}

fn check_involution(a: &CMatrix) -> Result<()> {
    if a.shape() != (2, 2) {
        return Err(Error::NotInvolution {
            deviation: f64::INFINITY,
        });
    }
    let deviation =
        math::max_abs_diff(&(a * a), &math::identity(2)).max(math::hermiticity_deviation(a));
    if deviation > INVOLUTION_TOL {
        return Err(Error::NotInvolution { deviation });
    }
    Ok(())
}

fn projector(a: &CMatrix, sign: f64) -> Insertion {
    Insertion {
        role: InsertionRole::Projector,
        matrix: (math::identity(2) + a * Complex64::from(sign)) * Complex64::from(0.5),
    }
}

fn rotation(a: &CMatrix, sign: f64) -> Insertion {
    Insertion {
        role: InsertionRole::Rotation,
        matrix: (math::identity(2) + a * math::c(0.0, sign)) * Complex64::from(FRAC_1_SQRT_2),
    }
}

/// The ten terms decomposing the channel of `e^{iθ A1⊗A2}` for Hermitian
/// involutions `A1`, `A2`.
pub fn horizontal_cut_terms(theta: f64, a1: &CMatrix, a2: &CMatrix) -> Result<Vec<CutTerm>> {
    check_involution(a1)?;
    check_involution(a2)?;
    let (c, s) = (theta.cos(), theta.sin());
    let cs = c * s;
    let id = Insertion {
        role: InsertionRole::Identity,
        matrix: math::identity(2),
    };
    let unit = |a: &CMatrix| Insertion {
        role: InsertionRole::Unitary,
        matrix: a.clone(),
    };
    let rows: Vec<(f64, Insertion, Insertion)> = vec![
        (c * c, id.clone(), id),
        (s * s, unit(a1), unit(a2)),
        (cs, projector(a1, 1.0), rotation(a2, 1.0)),
        (-cs, projector(a1, -1.0), rotation(a2, 1.0)),
        (-cs, projector(a1, 1.0), rotation(a2, -1.0)),
        (cs, projector(a1, -1.0), rotation(a2, -1.0)),
        (cs, rotation(a1, 1.0), projector(a2, 1.0)),
        (-cs, rotation(a1, -1.0), projector(a2, 1.0)),
        (-cs, rotation(a1, 1.0), projector(a2, -1.0)),
        (cs, rotation(a1, -1.0), projector(a2, -1.0)),
    ];
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(k, (coeff, p, q))| CutTerm {
            index: k + 1,
            coeff,
            insertions_a: vec![p],
            insertions_b: vec![q],
            kind: CutKind::Horizontal,
        })
        .collect())
}

/// The eight measure-and-prepare terms decomposing the single-qubit identity channel.
pub fn vertical_cut_terms() -> Vec<CutTerm> {
    (1..=8usize)
        .map(|k| {
            let o = math::pauli((k - 1) / 2);
            let rho = match k {
                1 => math::mat2(math::ONE, math::ZERO, math::ZERO, math::ZERO),
                2 => math::mat2(math::ZERO, math::ZERO, math::ZERO, math::ONE),
                _ => {
                    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                    (math::identity(2) + &o * Complex64::from(sign)) * Complex64::from(0.5)
                }
            };
            let coeff = if matches!(k, 4 | 6 | 8) { -0.5 } else { 0.5 };
            CutTerm {
                index: k,
                coeff,
                insertions_a: vec![Insertion {
                    role: InsertionRole::Observable,
                    matrix: o,
                }],
                insertions_b: vec![Insertion {
                    role: InsertionRole::State,
                    matrix: rho,
                }],
                kind: CutKind::Vertical,
            }
        })
        .collect()
}

/// `Σ_k |c_k|`, the factor by which the shot count grows.
pub fn sampling_overhead(terms: &[CutTerm]) -> f64 {
    terms.iter().map(|t| t.coeff.abs()).sum()
}

/// `Σ_k coeffs[k]·values[k]`, summed in index order.
pub fn recombine_expectation(coeffs: &[f64], values: &[f64]) -> Result<f64> {
    if coeffs.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: coeffs.len(),
            right: values.len(),
        });
    }
    Ok(coeffs.iter().zip(values).map(|(c, v)| c * v).sum())
}

/// A two-qubit gate written as `e^{iφ}·(local gates)·e^{iθ A1⊗A2}`, the local
/// gates commuting with the exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliExponential {
    pub theta: f64,
    pub a1: CMatrix,
    pub a2: CMatrix,
    /// Local single-qubit gates applied alongside the exponential.
    pub corrections: Vec<Gate>,
}

fn pauli_label(k: usize) -> &'static str {
    ["I", "X", "Y", "Z"][k]
}

/// Recognize `gate` as a Pauli exponential. CX and CZ are accepted with local
/// `rz`/`rx` corrections; 4×4 MATRIX gates must be `e^{iφ}(cos θ + i sin θ P⊗Q)`
/// for Paulis `P`, `Q`.
pub fn pauli_exponential_form(gate: &Gate) -> Option<PauliExponential> {
    if gate.operands.len() != 2 {
        return None;
    }
    let (q1, q2) = (gate.operands[0], gate.operands[1]);
    match &gate.kind {
        // CX = e^{iπ/4}·e^{-iπ/4 Z_c}·e^{-iπ/4 X_t}·e^{iπ/4 Z_c X_t}
        GateKind::Cx => Some(PauliExponential {
            theta: FRAC_PI_4,
            a1: math::pauli(3),
            a2: math::pauli(1),
            corrections: vec![Gate::rz(q1, -FRAC_PI_2), Gate::rx(q2, FRAC_PI_2)],
        }),
        GateKind::Cz => Some(PauliExponential {
            theta: FRAC_PI_4,
            a1: math::pauli(3),
            a2: math::pauli(3),
            corrections: vec![Gate::rz(q1, -FRAC_PI_2), Gate::rz(q2, -FRAC_PI_2)],
        }),
        GateKind::Matrix(u) => {
            for i in 1..4 {
                for j in 1..4 {
                    let p = math::kron_lsb(&[math::pauli(i), math::pauli(j)]);
                    let alpha = u.trace() / 4.0;
                    let beta = (&p * u).trace() / 4.0;
                    let rebuilt = math::identity(4) * alpha + &p * beta;
                    if math::max_abs_diff(&rebuilt, u) > FORM_TOL {
                        continue;
                    }
                    // alpha = e^{iφ} cos θ, beta = i e^{iφ} sin θ
                    let phase = if alpha.norm() >= beta.norm() {
                        alpha.arg()
                    } else {
                        (beta / math::I).arg()
                    };
                    let rot = Complex64::from_polar(1.0, -phase);
                    let (cos, sin) = ((alpha * rot).re, (beta * rot / math::I).re);
                    log::debug!(
                        "matrix gate is exp(iθ {}⊗{})",
                        pauli_label(i),
                        pauli_label(j)
                    );
                    return Some(PauliExponential {
                        theta: sin.atan2(cos),
                        a1: math::pauli(i),
                        a2: math::pauli(j),
                        corrections: Vec::new(),
                    });
                }
            }
            None
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutLocation {
    /// Cut the two-qubit gate at this index.
    Gate(usize),
    /// Cut `qubit` right after gate `after_gate`.
    Wire { qubit: usize, after_gate: usize },
}

/// One circuit to run for a cut term. Its distribution enters the
/// recombination multiplied by `coeff`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutVariant {
    pub term: usize,
    /// Eigenvalue sign of the measured observable (vertical cuts with `O ≠ 1`).
    pub sign: Option<i8>,
    pub coeff: f64,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub kind: CutKind,
    pub terms: Vec<CutTerm>,
    pub variants: Vec<CutVariant>,
    pub overhead: f64,
    /// Gates before and after the cut site.
    pub prefix: Circuit,
    pub suffix: Circuit,
}

fn insertion_gate(q: usize, ins: &Insertion) -> Option<Gate> {
    match ins.role {
        InsertionRole::Identity => None,
        InsertionRole::Unitary | InsertionRole::Rotation => {
            Some(Gate::matrix(vec![q], ins.matrix.clone()))
        }
        _ => Some(Gate::operator(vec![q], ins.matrix.clone())),
    }
}

/// Unitary taking `|0⟩` to the pure state `rho`.
fn state_preparation(rho: &CMatrix) -> CMatrix {
    let (p0, p1) = (rho[(0, 0)].re, rho[(1, 1)].re);
    let (a, b) = if p0 >= p1 {
        let a = p0.sqrt();
        (Complex64::from(a), rho[(1, 0)] / a)
    } else {
        let b = p1.sqrt();
        (rho[(0, 1)] / b, Complex64::from(b))
    };
    math::mat2(a, -b.conj(), b, a.conj())
}

fn templates(circuit: &Circuit, split: usize) -> (Circuit, Circuit) {
    let mut prefix = circuit.clone();
    prefix.gates.truncate(split);
    prefix.measurements.clear();
    let mut suffix = Circuit::new(circuit.width);
    suffix.gates = circuit.gates[split..].to_vec();
    suffix.measurements = circuit.measurements.clone();
    (prefix, suffix)
}

fn horizontal(circuit: &Circuit, index: usize) -> Result<CutResult> {
    let gate = circuit
        .gates
        .get(index)
        .ok_or_else(|| Error::InvalidLocation(format!("gate {index} out of range")))?;
    let form = pauli_exponential_form(gate).ok_or_else(|| Error::Unsupported {
        index,
        reason: format!(
            "{} is not a recognized two-qubit Pauli exponential",
            gate.name()
        ),
    })?;
    let (q1, q2) = (gate.operands[0], gate.operands[1]);
    let terms = horizontal_cut_terms(form.theta, &form.a1, &form.a2)?;
    let variants = terms
        .iter()
        .map(|t| {
            let mut site = form.corrections.clone();
            site.extend(insertion_gate(q1, &t.insertions_a[0]));
            site.extend(insertion_gate(q2, &t.insertions_b[0]));
            let mut c = circuit.clone();
            c.gates.splice(index..=index, site);
            CutVariant {
                term: t.index,
                sign: None,
                coeff: t.coeff,
                circuit: c,
            }
        })
        .collect();
    let (prefix, mut suffix) = templates(circuit, index);
    suffix.gates.remove(0);
    Ok(CutResult {
        kind: CutKind::Horizontal,
        overhead: sampling_overhead(&terms),
        terms,
        variants,
        prefix,
        suffix,
    })
}

/// Eigenprojector of the Pauli `o` for eigenvalue `sign`.
fn eigenprojector(o: &CMatrix, sign: f64) -> CMatrix {
    (math::identity(2) + o * Complex64::from(sign)) * Complex64::from(0.5)
}

fn vertical(circuit: &Circuit, qubit: usize, after_gate: usize) -> Result<CutResult> {
    if qubit >= circuit.width {
        return Err(Error::InvalidLocation(format!(
            "qubit {qubit} out of range"
        )));
    }
    if after_gate >= circuit.gates.len() {
        return Err(Error::InvalidLocation(format!(
            "gate {after_gate} out of range"
        )));
    }
    let split = after_gate + 1;
    let fresh = circuit.width;
    let remap = |q: usize| if q == qubit { fresh } else { q };
    let mut base = circuit.clone();
    base.width += 1;
    base.preparations.push(Some(false));
    for g in &mut base.gates[split..] {
        *g = g.remap_qubits(&remap);
    }
    for m in &mut base.measurements {
        m.0 = remap(m.0);
    }
    if let Some(bad) = validate_circuit(&base).into_iter().next() {
        return Err(Error::InvalidLocation(format!(
            "wire cut breaks the circuit: {bad}"
        )));
    }

    let terms = vertical_cut_terms();
    let mut variants = Vec::new();
    for t in &terms {
        let o = &t.insertions_a[0].matrix;
        let w = state_preparation(&t.insertions_b[0].matrix);
        let prep: Vec<Gate> = if math::max_abs_diff(&w, &math::identity(2)) <= FORM_TOL {
            Vec::new()
        } else {
            vec![Gate::matrix(vec![fresh], w)]
        };
        let signs: Vec<Option<i8>> = if math::max_abs_diff(o, &math::identity(2)) <= FORM_TOL {
            vec![None]
        } else {
            vec![Some(1), Some(-1)]
        };
        for sign in signs {
            let mut site = prep.clone();
            if let Some(s) = sign {
                site.push(Gate::operator(vec![qubit], eigenprojector(o, s as f64)));
            }
            let mut c = base.clone();
            c.gates.splice(split..split, site);
            variants.push(CutVariant {
                term: t.index,
                sign,
                coeff: t.coeff * sign.map_or(1.0, f64::from),
                circuit: c,
            });
        }
    }
    let (prefix, suffix) = templates(&base, split);
    Ok(CutResult {
        kind: CutKind::Vertical,
        overhead: sampling_overhead(&terms),
        terms,
        variants,
        prefix,
        suffix,
    })
}

/// Expand a cut at `location` into term circuits. Horizontal cuts replace the
/// gate by each term's insertions; vertical cuts move everything after the
/// cut point on the wire to a new qubit (index `width`, prepared `|0⟩` and
/// rotated into `ρ_k`) and project the old wire onto an eigenspace of `O_k`.
pub fn apply_cut(circuit: &Circuit, location: CutLocation) -> Result<CutResult> {
    match location {
        CutLocation::Gate(index) => horizontal(circuit, index),
        CutLocation::Wire { qubit, after_gate } => vertical(circuit, qubit, after_gate),
    }
}

/// `Σ_v coeff_v · dist_v`, summed in variant order.
pub fn recombine_distributions(coeffs: &[f64], dists: &[Vec<f64>]) -> Result<Vec<f64>> {
    if coeffs.len() != dists.len() {
        return Err(Error::LengthMismatch {
            left: coeffs.len(),
            right: dists.len(),
        });
    }
    let len = dists.first().map_or(0, Vec::len);
    let mut out = vec![0.0; len];
    for (c, d) in coeffs.iter().zip(dists) {
        if d.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: d.len(),
            });
        }
        for (o, p) in out.iter_mut().zip(d) {
            *o += c * p;
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct ManifestTerm {
    pub index: usize,
    pub coeff: f64,
    pub roles_a: Vec<InsertionRole>,
    pub roles_b: Vec<InsertionRole>,
}

#[derive(Debug, Serialize)]
pub struct ManifestVariant {
    pub term: usize,
    pub sign: Option<i8>,
    pub coeff: f64,
    pub file: String,
}

/// JSON summary of a cut: coefficients, insertion roles and variant files.
#[derive(Debug, Serialize)]
pub struct CutManifest {
    pub kind: CutKind,
    pub overhead: f64,
    pub terms: Vec<ManifestTerm>,
    pub variants: Vec<ManifestVariant>,
}

impl CutResult {
    /// Manifest naming variant `i` by `file_name(i, variant)`.
    pub fn manifest(&self, file_name: impl Fn(usize, &CutVariant) -> String) -> CutManifest {
        CutManifest {
            kind: self.kind,
            overhead: self.overhead,
            terms: self
                .terms
                .iter()
                .map(|t| ManifestTerm {
                    index: t.index,
                    coeff: t.coeff,
                    roles_a: t.insertions_a.iter().map(|i| i.role).collect(),
                    roles_b: t.insertions_b.iter().map(|i| i.role).collect(),
                })
                .collect(),
            variants: self
                .variants
                .iter()
                .enumerate()
                .map(|(i, v)| ManifestVariant {
                    term: v.term,
                    sign: v.sign,
                    coeff: v.coeff,
                    file: file_name(i, v),
                })
                .collect(),
        }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.variants.iter().map(|v| v.coeff).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::ir::BasisState;
    use crate::sim::measurement_distribution;
    use std::f64::consts::PI;

    fn conj(m: &CMatrix, rho: &CMatrix) -> CMatrix {
        m * rho * m.adjoint()
    }

    fn random_density(seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(4, 4, |_, _| {
            math::c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let rho = &g * g.adjoint();
        let tr = rho.trace();
        rho / tr
    }

    #[test]
    fn zero_angle_single_term() {
        let terms = horizontal_cut_terms(0.0, &math::pauli(1), &math::pauli(3)).unwrap();
        assert_eq!(terms.len(), 10);
        assert_eq!(terms[0].coeff, 1.0);
        assert!(terms[1..].iter().all(|t| t.coeff.abs() < 1e-15));
        assert_eq!(terms[0].insertions_a[0].role, InsertionRole::Identity);
    }

    #[test]
    fn right_angle_gives_zz() {
        let terms = horizontal_cut_terms(PI / 2.0, &math::pauli(3), &math::pauli(3)).unwrap();
        assert!((terms[1].coeff - 1.0).abs() < 1e-15);
        assert!(terms
            .iter()
            .enumerate()
            .all(|(k, t)| k == 1 || t.coeff.abs() < 1e-15));
        assert_eq!(terms[1].insertions_a[0].matrix, math::pauli(3));
    }

    #[test]
    fn horizontal_reproduces_channel() {
        for (i, j) in [(3, 3), (1, 3), (2, 1)] {
            for theta in [PI / 4.0, 0.3, 2.0] {
                let (a1, a2) = (math::pauli(i), math::pauli(j));
                let terms = horizontal_cut_terms(theta, &a1, &a2).unwrap();
                let gen = math::kron_lsb(&[a1.clone(), a2.clone()]);
                let u = math::identity(4) * Complex64::from(theta.cos())
                    + gen * math::c(0.0, theta.sin());
                let rho = random_density(7);
                let mut sum = CMatrix::zeros(4, 4);
                for t in &terms {
                    let pq = math::kron_lsb(&[
                        t.insertions_a[0].matrix.clone(),
                        t.insertions_b[0].matrix.clone(),
                    ]);
                    sum += conj(&pq, &rho) * Complex64::from(t.coeff);
                }
                assert!(math::frobenius_diff(&sum, &conj(&u, &rho)) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_involution() {
        assert!(matches!(
            horizontal_cut_terms(0.1, &math::hadamard(), &math::rx(0.3)),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn vertical_terms_listed() {
        let t = vertical_cut_terms();
        assert_eq!(t.len(), 8);
        assert_eq!(t[0].coeff, 0.5);
        assert_eq!(t[0].insertions_a[0].matrix, math::identity(2));
        assert_eq!(t[0].insertions_b[0].matrix[(0, 0)], math::ONE);
        assert_eq!(t[3].coeff, -0.5);
        assert_eq!(t[3].insertions_a[0].matrix, math::pauli(1));
        let minus = (math::identity(2) - math::pauli(1)) * Complex64::from(0.5);
        assert!(math::max_abs_diff(&t[3].insertions_b[0].matrix, &minus) < 1e-15);
        assert_eq!(sampling_overhead(&t), 4.0);
    }

    #[test]
    fn vertical_reconstructs_plus_state() {
        let plus = math::hadamard()
            * math::mat2(math::ONE, math::ZERO, math::ZERO, math::ZERO)
            * math::hadamard();
        let mut sum = CMatrix::zeros(2, 2);
        for t in vertical_cut_terms() {
            let o = &t.insertions_a[0].matrix;
            let expect = (o * &plus).trace().re;
            sum += &t.insertions_b[0].matrix * Complex64::from(t.coeff * expect);
        }
        assert!(math::max_abs_diff(&sum, &plus) < 1e-14);
    }

    #[test]
    fn recombine_checks_lengths() {
        assert_eq!(recombine_expectation(&[1.0], &[0.7]).unwrap(), 0.7);
        assert!(recombine_expectation(&[1.0, 2.0], &[0.7]).is_err());
    }

    #[test]
    fn recognizes_rzz_matrix() {
        let theta: f64 = 0.37;
        let gen = math::kron_lsb(&[math::pauli(3), math::pauli(3)]);
        let u = (math::identity(4) * Complex64::from(theta.cos())
            + gen * math::c(0.0, theta.sin()))
            * Complex64::from_polar(1.0, 0.4);
        let form = pauli_exponential_form(&Gate::matrix(vec![0, 1], u)).unwrap();
        assert!((form.theta - theta).abs() < 1e-12);
        assert_eq!(form.a1, math::pauli(3));
        assert!(pauli_exponential_form(&Gate::swap(0, 1)).is_none());
    }

    fn recombined(result: &CutResult, x: usize, caps: &Caps) -> Vec<f64> {
        let dists: Vec<Vec<f64>> = result
            .variants
            .iter()
            .map(|v| {
                let input = BasisState::new(v.circuit.width, x).unwrap();
                measurement_distribution(&v.circuit, &input, caps).unwrap()
            })
            .collect();
        recombine_distributions(&result.coefficients(), &dists).unwrap()
    }

    #[test]
    fn cx_cut_recombines() {
        let caps = Caps::default();
        let c = Circuit::new(2)
            .with_gates([Gate::h(0), Gate::ry(1, 0.4), Gate::cx(0, 1), Gate::h(1)])
            .measure_all();
        let result = apply_cut(&c, CutLocation::Gate(2)).unwrap();
        assert_eq!(result.variants.len(), 10);
        // c² + s² + 8|cs| at θ = π/4
        assert!((result.overhead - 5.0).abs() < 1e-12);
        for x in 0..4 {
            let expected =
                measurement_distribution(&c, &BasisState::new(2, x).unwrap(), &caps).unwrap();
            let got = recombined(&result, x, &caps);
            for (a, b) in expected.iter().zip(&got) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wire_cut_recombines() {
        let caps = Caps::default();
        let c = Circuit::new(2)
            .with_gates([
                Gate::h(0),
                Gate::rx(1, 0.7),
                Gate::cx(0, 1),
                Gate::ry(0, 0.5),
                Gate::cz(0, 1),
            ])
            .measure_all();
        let result = apply_cut(
            &c,
            CutLocation::Wire {
                qubit: 0,
                after_gate: 2,
            },
        )
        .unwrap();
        assert_eq!(result.terms.len(), 8);
        assert_eq!(result.variants.len(), 14);
        for x in 0..4 {
            let expected =
                measurement_distribution(&c, &BasisState::new(2, x).unwrap(), &caps).unwrap();
            let got = recombined(&result, x, &caps);
            for (a, b) in expected.iter().zip(&got) {
                assert!((a - b).abs() < 1e-12, "{expected:?} vs {got:?}");
            }
        }
    }

    #[test]
    fn invalid_locations() {
        let c = Circuit::new(2).with_gates([Gate::h(0)]).measure_all();
        assert!(matches!(
            apply_cut(&c, CutLocation::Gate(3)),
            Err(Error::InvalidLocation(_))
        ));
        assert!(matches!(
            apply_cut(&c, CutLocation::Gate(0)),
            Err(Error::Unsupported { .. })
        ));
        assert!(matches!(
            apply_cut(
                &c,
                CutLocation::Wire {
                    qubit: 5,
                    after_gate: 0
                }
            ),
            Err(Error::InvalidLocation(_))
        ));
    }
}
