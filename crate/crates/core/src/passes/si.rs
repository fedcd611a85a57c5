use std::collections::{BTreeSet, HashMap};

use super::trim::effective_preparations;
use super::{PassOutput, RewriteReport};
use crate::caps::Caps;
use crate::error::Result;
use crate::ir::basis::{gather_bits, scatter_bits};
use crate::ir::{Circuit, ClassicalStage, Gate, GateKind};
use crate::phase_poly::gate_phase_poly;
use crate::sim::StateVector;

const DIAG_TOL: f64 = 1e-12;
/// Tolerance on the branch-probability total being the same for every control value.
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Measurement,
    Preparation,
}

/// A matched ancilla pattern: entangler gates, ancilla measurements and the
/// classically controlled branches keyed on them.
struct Match {
    ancillas: Vec<usize>,
    /// Qubits the entangler reads as controls, ascending.
    controls: Vec<usize>,
    /// `controls` plus every qubit an absorbed branch touches, ascending.
    system: Vec<usize>,
    segment: Vec<usize>,
    measures: Vec<usize>,
    absorbed: Vec<usize>,
}

fn is_diagonal(g: &Gate) -> bool {
    g.local_matrix().is_some_and(|m| {
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= DIAG_TOL))
    })
}

/// Ancillas: prepared in `|0⟩`, measured exactly once mid-circuit, untouched
/// afterwards and not terminally measured.
fn ancilla_candidates(c: &Circuit) -> HashMap<usize, usize> {
    let measured = c.terminally_measured();
    let mut out = HashMap::new();
    for q in 0..c.width {
        if c.preparations[q] != Some(false) || measured.contains(&q) {
            continue;
        }
        let uses: Vec<usize> = (0..c.gates.len())
            .filter(|&i| c.gates[i].acts_on(q))
            .collect();
        let measures: Vec<usize> = uses
            .iter()
            .copied()
            .filter(|&i| c.gates[i].is_measurement())
            .collect();
        if let [m] = measures[..] {
            if uses.last() == Some(&m) {
                out.insert(q, m);
            }
        }
    }
    out
}

/// Ancilla groups linked through shared gates, in order of first use.
fn ancilla_groups(c: &Circuit, candidates: &HashMap<usize, usize>) -> Vec<Vec<usize>> {
    let mut parent: HashMap<usize, usize> = candidates.keys().map(|&q| (q, q)).collect();
    fn find(p: &mut HashMap<usize, usize>, q: usize) -> usize {
        let r = p[&q];
        if r == q {
            return q;
        }
        let root = find(p, r);
        p.insert(q, root);
        root
    }
    for g in &c.gates {
        let anc: Vec<usize> = g
            .operands
            .iter()
            .copied()
            .filter(|q| candidates.contains_key(q))
            .collect();
        for w in anc.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent.insert(a, b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: HashMap<usize, usize> = HashMap::new();
    let mut keys: Vec<usize> = candidates.keys().copied().collect();
    keys.sort_by_key(|q| (c.gates.iter().position(|g| g.acts_on(*q)), *q));
    for q in keys {
        let r = find(&mut parent, q);
        let idx = *root_of.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[idx].push(q);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

fn match_group(
    c: &Circuit,
    ancillas: &[usize],
    candidates: &HashMap<usize, usize>,
    side: Side,
) -> Option<Match> {
    let in_a = |q: usize| ancillas.contains(&q);
    let measures: Vec<usize> = ancillas.iter().map(|a| candidates[a]).collect();
    let first_measure = *measures.iter().min()?;
    let last_measure = *measures.iter().max()?;
    let segment: Vec<usize> = (0..c.gates.len())
        .filter(|&i| !measures.contains(&i) && c.gates[i].operands.iter().any(|&q| in_a(q)))
        .collect();
    if segment.iter().any(|&i| i > first_measure) {
        return None;
    }
    let mut controls = BTreeSet::new();
    for &i in &segment {
        let g = &c.gates[i];
        if g.is_classically_controlled() {
            return None;
        }
        let outside: Vec<usize> = g.operands.iter().copied().filter(|&q| !in_a(q)).collect();
        if outside.is_empty() {
            continue;
        }
        let as_controls = g
            .controlled_view()
            .is_some_and(|v| outside.iter().all(|q| v.controls.contains(q)));
        if !(as_controls || is_diagonal(g)) {
            return None;
        }
        controls.extend(outside);
    }

    let wires: Vec<usize> = measures.iter().map(|&m| c.gates[m].wires[0]).collect();
    let mut absorbed = Vec::new();
    let mut system: BTreeSet<usize> = controls.clone();
    for (i, g) in c.gates.iter().enumerate() {
        if !g.wires.iter().any(|w| wires.contains(w)) || measures.contains(&i) {
            continue;
        }
        let GateKind::ClassicallyControlled(branches) = &g.kind else {
            return None;
        };
        let ok = i > last_measure
            && g.wires.iter().all(|w| wires.contains(w))
            && branches
                .iter()
                .flatten()
                .all(|b| b.operands.iter().all(|&q| !in_a(q)) && gate_phase_poly(b).is_some());
        if !ok {
            return None;
        }
        system.extend(g.operands.iter().copied());
        absorbed.push(i);
    }

    let pattern: BTreeSet<usize> = segment
        .iter()
        .chain(&measures)
        .chain(&absorbed)
        .copied()
        .collect();
    let touches = |g: &Gate| g.operands.iter().any(|&q| in_a(q) || system.contains(&q));
    let first = *segment.first().unwrap_or(&first_measure);
    match side {
        Side::Measurement => {
            let measured = c.terminally_measured();
            if !system.iter().all(|q| measured.contains(q)) {
                return None;
            }
            // after the entangler starts only pattern gates may touch the system
            if (first..c.gates.len()).any(|i| !pattern.contains(&i) && touches(&c.gates[i])) {
                return None;
            }
        }
        Side::Preparation => {
            // the system stays in its prepared basis state until the branches have run
            let end = absorbed.last().copied().unwrap_or(last_measure);
            if (0..end).any(|i| !pattern.contains(&i) && touches(&c.gates[i])) {
                return None;
            }
        }
    }
    Some(Match {
        ancillas: ancillas.to_vec(),
        controls: controls.into_iter().collect(),
        system: system.into_iter().collect(),
        segment,
        measures,
        absorbed,
    })
}

/// `P(μ|x)` for every control value `x`, with `μ` over the ancillas in
/// ascending order, and the (common) total probability.
fn branch_probabilities(c: &Circuit, m: &Match) -> Option<(Vec<Vec<f64>>, f64)> {
    let local: Vec<usize> = m.controls.iter().chain(&m.ancillas).copied().collect();
    let index_of = |q: usize| {
        local
            .iter()
            .position(|&p| p == q)
            .expect("segment qubit in register")
    };
    let nc = m.controls.len();
    let anc_pos: Vec<usize> = (nc..local.len()).collect();
    let gates: Vec<(crate::math::CMatrix, Vec<usize>)> = m
        .segment
        .iter()
        .map(|&i| {
            let g = &c.gates[i];
            let ops = g.operands.iter().map(|&q| index_of(q)).collect();
            (g.local_matrix().expect("segment gates have matrices"), ops)
        })
        .collect();
    let mut table = Vec::with_capacity(1 << nc);
    let mut total: Option<f64> = None;
    for x in 0..1usize << nc {
        let mut psi = StateVector::basis(local.len(), x);
        for (mat, ops) in &gates {
            psi.apply_matrix(mat, ops);
        }
        let mut p = vec![0.0; 1 << m.ancillas.len()];
        for (i, prob) in psi.probabilities().into_iter().enumerate() {
            p[gather_bits(i, &anc_pos)] += prob;
        }
        let t: f64 = p.iter().sum();
        match total {
            None => total = Some(t),
            Some(t0) if (t - t0).abs() > WEIGHT_TOL => return None,
            _ => {}
        }
        table.push(p);
    }
    let t = total.unwrap_or(1.0);
    if t <= 0.0 {
        return None;
    }
    for p in &mut table {
        for v in p.iter_mut() {
            *v /= t;
        }
    }
    Some((table, t))
}

/// `f_μ(x)` over the system register: the absorbed branches selected by `μ`, in order.
fn branch_map(c: &Circuit, m: &Match, mu: usize, x: usize) -> usize {
    let wire_bit: HashMap<usize, usize> = m
        .measures
        .iter()
        .map(|&i| {
            let q = c.gates[i].operands[0];
            (
                c.gates[i].wires[0],
                m.ancillas.iter().position(|&a| a == q).expect("ancilla"),
            )
        })
        .collect();
    let mut y = x;
    for &i in &m.absorbed {
        let g = &c.gates[i];
        let GateKind::ClassicallyControlled(branches) = &g.kind else {
            unreachable!("absorbed gates are classically controlled")
        };
        let key = g
            .wires
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, w)| acc | ((mu >> wire_bit[w]) & 1) << k);
        for b in &branches[key] {
            let rep = gate_phase_poly(b).expect("checked when matching");
            let pos: Vec<usize> = b
                .operands
                .iter()
                .map(|q| {
                    m.system
                        .iter()
                        .position(|s| s == q)
                        .expect("branch qubit in system")
                })
                .collect();
            y = scatter_bits(y, &pos, rep.perm()[gather_bits(y, &pos)]);
        }
    }
    y
}

/// Column-stochastic `M` over the system register, row-major.
fn stochastic_matrix(c: &Circuit, m: &Match, probs: &[Vec<f64>]) -> Vec<f64> {
    let dim = 1usize << m.system.len();
    let control_pos: Vec<usize> = m
        .controls
        .iter()
        .map(|q| {
            m.system
                .iter()
                .position(|s| s == q)
                .expect("control in system")
        })
        .collect();
    let mut local = vec![0.0; dim * dim];
    for x in 0..dim {
        let p = &probs[gather_bits(x, &control_pos)];
        for (mu, &pm) in p.iter().enumerate() {
            if pm > 0.0 {
                local[branch_map(c, m, mu, x) * dim + x] += pm;
            }
        }
    }
    local
}

fn fold(circuit: &Circuit, caps: &Caps, side: Side) -> Result<PassOutput> {
    let name = match side {
        Side::Measurement => "si-measurement",
        Side::Preparation => "si-preparation",
    };
    let mut current = circuit.clone();
    let mut premap: Option<ClassicalStage> = None;
    let mut post: Option<ClassicalStage> = None;
    let mut weight = 1.0;
    let mut report = RewriteReport::new(name, circuit);
    let mut removed = 0;
    // every fold removes its ancilla measurements, so this terminates
    loop {
        let candidates = ancilla_candidates(&current);
        let mut groups = ancilla_groups(&current, &candidates);
        if groups.len() > 1 {
            // interleaved patterns may only match together
            let mut all: Vec<usize> = candidates.keys().copied().collect();
            all.sort_unstable();
            groups.push(all);
        }
        let found = groups
            .into_iter()
            .find_map(|group| match_group(&current, &group, &candidates, side));
        let Some(m) = found else { break };
        Caps::check(
            "ancilla pattern",
            m.controls.len() + m.ancillas.len(),
            caps.statevector_width,
        )?;
        Caps::check(
            "ancilla pattern stage",
            m.system.len(),
            caps.stochastic_width,
        )?;
        let Some((probs, t)) = branch_probabilities(&current, &m) else {
            log::debug!("{name}: branch weight depends on the control value; skipped");
            break;
        };
        let local = stochastic_matrix(&current, &m, &probs);
        let pattern: BTreeSet<usize> = m
            .segment
            .iter()
            .chain(&m.measures)
            .chain(&m.absorbed)
            .copied()
            .collect();
        let mut next = current.clone();
        next.gates = current
            .gates
            .iter()
            .enumerate()
            .filter(|(i, _)| !pattern.contains(i))
            .map(|(_, g)| g.clone())
            .collect();
        removed += m.segment.len() + m.absorbed.len();
        report.notes.push(format!(
            "ancillas {:?}, system {:?}, {} entangler gates, {} branch gates",
            m.ancillas,
            m.system,
            m.segment.len(),
            m.absorbed.len()
        ));
        match side {
            Side::Measurement => {
                Caps::check(
                    "ancilla pattern stage",
                    current.num_outputs(),
                    caps.stochastic_width,
                )?;
                let positions: Vec<usize> = m
                    .system
                    .iter()
                    .map(|&q| current.output_bit(q).expect("system qubits are measured"))
                    .collect();
                let stage =
                    ClassicalStage::stochastic_on_bits(current.num_outputs(), &positions, &local)?;
                post = Some(match post {
                    None => stage,
                    // the newer stage runs first
                    Some(old) => crate::ir::compose_stages(&stage, &old)?,
                });
            }
            Side::Preparation => {
                Caps::check(
                    "ancilla pattern premap",
                    current.width,
                    caps.stochastic_width,
                )?;
                let stage = ClassicalStage::stochastic_on_bits(current.width, &m.system, &local)?;
                let dim = 1usize << m.system.len();
                next.preparations = effective_preparations(&current.preparations, &m.system, |x| {
                    (0..dim).filter(|&y| local[y * dim + x] > 0.0).collect()
                });
                premap = Some(match premap {
                    None => stage,
                    Some(old) => crate::ir::compose_stages(&old, &stage)?,
                });
            }
        }
        // unitary entanglers lose probability only to roundoff
        if (t - 1.0).abs() > WEIGHT_TOL {
            weight *= t;
        }
        current = next;
    }
    if report.notes.is_empty() {
        return Ok(PassOutput::unchanged(circuit, name));
    }
    report.applied = true;
    report.gates_removed = removed;
    report.stages_added = 1;
    report.weight = weight;
    Ok(PassOutput {
        report: report.finish(&current),
        circuit: current,
        premap,
        post,
        weight,
    })
}

/// Replace ancillas entangled through control-only gates, measured, and fed
/// into classically controlled incoherent branches on measured system qubits
/// by a stochastic post stage on the system outcomes.
pub fn si_fold_measurement(circuit: &Circuit, caps: &Caps) -> Result<PassOutput> {
    fold(circuit, caps, Side::Measurement)
}

/// Preparation-side counterpart: the system is still in its basis input when
/// the pattern runs, so it becomes a stochastic premap.
pub fn si_fold_preparation(circuit: &Circuit, caps: &Caps) -> Result<PassOutput> {
    fold(circuit, caps, Side::Preparation)
}
