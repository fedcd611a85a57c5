use super::trim::{trim_measurement_boundary, trim_preparation_boundary};
use super::{PassOutput, RewriteReport};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::{compose_stages, Circuit, ClassicalStage, Gate, GateKind};
use crate::math::{self, CMatrix};
use crate::phase_poly::{gate_phase_poly, incoherent_check, MATRIX_TOL};

const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSide {
    Measurement,
    Preparation,
}

/// Explicit `U = F·V` (measurement side: `V` runs first, the incoherent `F`
/// last) or `U = V·F` (preparation side: `F` runs first) for MATRIX gates
/// equal to `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserFactorization {
    pub name: String,
    pub side: FactorSide,
    pub u: CMatrix,
    pub v: CMatrix,
    pub f: CMatrix,
}

impl UserFactorization {
    pub fn new(
        name: impl Into<String>,
        side: FactorSide,
        u: CMatrix,
        v: CMatrix,
        f: CMatrix,
    ) -> Result<Self> {
        let name = name.into();
        if u.shape() != v.shape() || u.shape() != f.shape() || !u.is_square() {
            return Err(Error::FactorizationMismatch(format!(
                "{name}: shapes differ"
            )));
        }
        for (label, m) in [("U", &u), ("V", &v)] {
            let deviation = math::unitarity_deviation(m);
            if deviation > MATRIX_TOL {
                return Err(Error::FactorizationMismatch(format!(
                    "{name}: {label} is not unitary ({deviation:.3e})"
                )));
            }
        }
        match incoherent_check(&f, MATRIX_TOL) {
            Ok(Some(_)) => {}
            _ => {
                return Err(Error::FactorizationMismatch(format!(
                    "{name}: F has no phase polynomial representation"
                )))
            }
        }
        let product = match side {
            FactorSide::Measurement => &f * &v,
            FactorSide::Preparation => &v * &f,
        };
        let deviation = math::max_abs_diff(&product, &u);
        if deviation > MATRIX_TOL {
            return Err(Error::FactorizationMismatch(format!(
                "{name}: product differs from U by {deviation:.3e}"
            )));
        }
        Ok(UserFactorization {
            name,
            side,
            u,
            v,
            f,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorHints {
    pub user: Vec<UserFactorization>,
    /// Skip the built-in CX/Hadamard and boundary-rz patterns.
    pub user_only: bool,
}

fn next_on(gates: &[Gate], from: usize, q: usize) -> Option<usize> {
    (from..gates.len()).find(|&j| gates[j].acts_on(q))
}

fn prev_on(gates: &[Gate], before: usize, q: usize) -> Option<usize> {
    (0..before).rev().find(|&j| gates[j].acts_on(q))
}

fn is_h(g: &Gate, q: usize) -> bool {
    g.kind == GateKind::H && g.operands == [q]
}

/// `CX(c,t); H(c); H(t)` before measurement → `H(c); H(t); CX(t,c)`, and the
/// mirrored form after preparation.
fn cx_hadamard(c: &mut Circuit, side: FactorSide) -> Option<String> {
    let measured = c.terminally_measured();
    let gates = &c.gates;
    for (i, g) in gates.iter().enumerate() {
        if g.kind != GateKind::Cx {
            continue;
        }
        let (ctl, tgt) = (g.operands[0], g.operands[1]);
        let (new, lo, hi) = match side {
            FactorSide::Measurement => {
                let (Some(j1), Some(j2)) = (next_on(gates, i + 1, ctl), next_on(gates, i + 1, tgt))
                else {
                    continue;
                };
                let ok = is_h(&gates[j1], ctl)
                    && is_h(&gates[j2], tgt)
                    && next_on(gates, j1 + 1, ctl).is_none()
                    && next_on(gates, j2 + 1, tgt).is_none()
                    && measured.contains(&ctl)
                    && measured.contains(&tgt);
                if !ok {
                    continue;
                }
                (
                    vec![Gate::h(ctl), Gate::h(tgt), Gate::cx(tgt, ctl)],
                    i,
                    j1.max(j2),
                )
            }
            FactorSide::Preparation => {
                let (Some(j1), Some(j2)) = (prev_on(gates, i, ctl), prev_on(gates, i, tgt)) else {
                    continue;
                };
                let ok = is_h(&gates[j1], ctl)
                    && is_h(&gates[j2], tgt)
                    && prev_on(gates, j1, ctl).is_none()
                    && prev_on(gates, j2, tgt).is_none();
                if !ok {
                    continue;
                }
                (
                    vec![Gate::cx(tgt, ctl), Gate::h(ctl), Gate::h(tgt)],
                    j1.min(j2),
                    i,
                )
            }
        };
        // the three matched gates are lo, hi and one in between; nothing else touches ctl/tgt there
        let matched: Vec<usize> = (lo..=hi)
            .filter(|&k| gates[k].acts_on(ctl) || gates[k].acts_on(tgt))
            .collect();
        let anchor = match side {
            FactorSide::Measurement => hi,
            FactorSide::Preparation => lo,
        };
        let mut out = Vec::with_capacity(gates.len());
        for (k, gk) in gates.iter().enumerate() {
            if k == anchor {
                out.extend(new.iter().cloned());
            } else if !matched.contains(&k) {
                out.push(gk.clone());
            }
        }
        c.gates = out;
        return Some(format!("cx-hadamard at gate {i}"));
    }
    None
}

fn single_qubit_unitary(g: &Gate) -> Option<CMatrix> {
    if g.operands.len() != 1 || g.is_measurement() || g.is_classically_controlled() {
        return None;
    }
    if matches!(g.kind, GateKind::Operator(_)) {
        return None;
    }
    g.local_matrix()
}

/// Whether `rz` on `q` commutes with `g`: `q` is a control of `g`, or `g` is diagonal.
fn rz_passes(g: &Gate, q: usize) -> bool {
    if g.controlled_view().is_some_and(|v| v.controls.contains(&q)) {
        return true;
    }
    gate_phase_poly(g).is_some_and(|r| r.is_identity_perm())
}

fn nontrivial(angle: f64) -> bool {
    math::phase_distance(angle, 0.0) > ANGLE_TOL
}

enum Absorb {
    /// Merge into the single-qubit gate at this index.
    Into(usize),
    /// Reaches a boundary where a diagonal gate is unobservable.
    Drop,
}

/// Where an `rz` on `q` can go when moved away from gate `from` in the given
/// direction (`forward` towards the measurements).
fn absorb_target(c: &Circuit, from: usize, q: usize, forward: bool) -> Option<Absorb> {
    let idx: Box<dyn Iterator<Item = usize>> = if forward {
        Box::new(from + 1..c.gates.len())
    } else {
        Box::new((0..from).rev())
    };
    for k in idx {
        let g = &c.gates[k];
        if !g.acts_on(q) {
            continue;
        }
        if rz_passes(g, q) {
            continue;
        }
        return single_qubit_unitary(g).map(|_| Absorb::Into(k));
    }
    let at_boundary = if forward {
        c.terminally_measured().contains(&q)
    } else {
        c.preparations[q].is_some()
    };
    at_boundary.then_some(Absorb::Drop)
}

/// Decompose a boundary single-qubit MATRIX gate as `rz(a)·rx(b)·rz(c)`; the rz next
/// to the boundary is left for the trim, the other one is merged into the
/// nearest single-qubit gate it commutes to (or dropped at the far boundary).
fn boundary_rz(c: &mut Circuit, side: FactorSide) -> Option<String> {
    let measured = c.terminally_measured();
    for q in 0..c.width {
        let pos = match side {
            FactorSide::Measurement => {
                if !measured.contains(&q) {
                    continue;
                }
                prev_on(&c.gates, c.gates.len(), q)
            }
            FactorSide::Preparation => next_on(&c.gates, 0, q),
        };
        let Some(pos) = pos else { continue };
        let g = &c.gates[pos];
        // named gates are already in their simplest form
        if !matches!(g.kind, GateKind::Matrix(_)) || gate_phase_poly(g).is_some() {
            continue;
        }
        let Some(u) = single_qubit_unitary(g) else {
            continue;
        };
        let (_, a, b, cc) = math::zxz_decompose(&u);
        // boundary rz and the one to move
        let (boundary, inner) = match side {
            FactorSide::Measurement => (a, cc),
            FactorSide::Preparation => (cc, a),
        };
        if !nontrivial(boundary) {
            continue;
        }
        let absorb = if nontrivial(inner) {
            match absorb_target(c, pos, q, side == FactorSide::Preparation) {
                Some(t) => Some(t),
                None => continue,
            }
        } else {
            None
        };
        let mut gates = c.gates.clone();
        if let Some(Absorb::Into(k)) = absorb {
            let gk = single_qubit_unitary(&gates[k]).expect("absorb target is single-qubit");
            let merged = match side {
                // moved backwards: the rz now runs right after the gate at k
                FactorSide::Measurement => math::rz(inner) * gk,
                // moved forwards: right before it
                FactorSide::Preparation => gk * math::rz(inner),
            };
            gates[k] = Gate::matrix(vec![q], merged);
        }
        let replacement = match side {
            FactorSide::Measurement => vec![Gate::rx(q, b), Gate::rz(q, boundary)],
            FactorSide::Preparation => vec![Gate::rz(q, boundary), Gate::rx(q, b)],
        };
        gates.splice(pos..=pos, replacement);
        c.gates = gates;
        return Some(format!("boundary rz on qubit {q}"));
    }
    None
}

fn user_patterns(c: &mut Circuit, side: FactorSide, hints: &FactorHints) -> Option<String> {
    let measured = c.terminally_measured();
    for (i, g) in c.gates.iter().enumerate() {
        let GateKind::Matrix(m) = &g.kind else {
            continue;
        };
        for h in hints.user.iter().filter(|h| h.side == side) {
            if h.u.shape() != m.shape() || math::max_abs_diff(&h.u, m) > MATRIX_TOL {
                continue;
            }
            let at_boundary = match side {
                FactorSide::Measurement => g
                    .operands
                    .iter()
                    .all(|&q| measured.contains(&q) && next_on(&c.gates, i + 1, q).is_none()),
                FactorSide::Preparation => g
                    .operands
                    .iter()
                    .all(|&q| prev_on(&c.gates, i, q).is_none()),
            };
            if !at_boundary {
                continue;
            }
            let v = Gate::matrix(g.operands.clone(), h.v.clone());
            let f = Gate::matrix(g.operands.clone(), h.f.clone());
            let replacement = match side {
                FactorSide::Measurement => vec![v, f],
                FactorSide::Preparation => vec![f, v],
            };
            let name = format!("user factorization `{}` at gate {i}", h.name);
            c.gates.splice(i..=i, replacement);
            return Some(name);
        }
    }
    None
}

/// Rewrite boundary gates as `V` times an incoherent factor and trim the
/// factor, repeating until no pattern matches.
pub fn factor_and_trim(
    circuit: &Circuit,
    side: FactorSide,
    hints: &FactorHints,
    caps: &Caps,
) -> Result<PassOutput> {
    let name = match side {
        FactorSide::Measurement => "factor-measurement",
        FactorSide::Preparation => "factor-preparation",
    };
    let mut current = circuit.clone();
    let mut stage: Option<ClassicalStage> = None;
    let mut report = RewriteReport::new(name, circuit);
    // each rewrite removes a gate or a nontrivial boundary rz, so this terminates
    for _ in 0..=4 * circuit.gates.len() + 4 {
        let mut next = current.clone();
        let hit = if hints.user_only {
            None
        } else {
            cx_hadamard(&mut next, side).or_else(|| boundary_rz(&mut next, side))
        }
        .or_else(|| user_patterns(&mut next, side, hints));
        let Some(note) = hit else { break };
        report.notes.push(note);
        let trimmed = match side {
            FactorSide::Measurement => trim_measurement_boundary(&next, caps)?,
            FactorSide::Preparation => trim_preparation_boundary(&next, caps)?,
        };
        report
            .discarded_phases
            .extend(trimmed.report.discarded_phases);
        let new_stage = trimmed.post.or(trimmed.premap);
        stage = match (stage, new_stage) {
            (s, None) => s,
            (None, s) => s,
            (Some(old), Some(new)) => Some(match side {
                // later trims sit closer to the circuit
                FactorSide::Measurement => compose_stages(&new, &old)?,
                FactorSide::Preparation => compose_stages(&old, &new)?,
            }),
        };
        current = trimmed.circuit;
    }
    if report.notes.is_empty() {
        return Ok(PassOutput::unchanged(circuit, name));
    }
    report.applied = true;
    let (before, after) = (circuit.gate_count(), current.gate_count());
    report.gates_removed = before.saturating_sub(after);
    report.gates_added = after.saturating_sub(before);
    report.stages_added = stage.is_some() as usize;
    let (premap, post) = match side {
        FactorSide::Measurement => (None, stage),
        FactorSide::Preparation => (stage, None),
    };
    Ok(PassOutput {
        report: report.finish(&current),
        circuit: current,
        premap,
        post,
        weight: 1.0,
    })
}
