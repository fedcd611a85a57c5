use super::{PassOutput, RewriteReport};
use crate::error::Result;
use crate::ir::{Circuit, Gate, GateKind};
use crate::math::{self, CMatrix};

const BLOCK_TOL: f64 = 1e-12;

/// Gates implementing the block `u` on `targets`: nothing for the identity, a
/// named single-qubit gate when one matches exactly, a MATRIX otherwise.
pub(crate) fn block_gates(targets: &[usize], u: &CMatrix) -> Vec<Gate> {
    if math::max_abs_diff(u, &math::identity(u.nrows())) <= BLOCK_TOL {
        return Vec::new();
    }
    if let [q] = targets {
        let named = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::T,
        ];
        for kind in named {
            let g = Gate::new(kind, vec![*q]);
            if math::max_abs_diff(&g.local_matrix().expect("named gate"), u) <= BLOCK_TOL {
                return vec![g];
            }
        }
        // diag(1, e^{iθ})
        if u[(0, 1)].norm() <= BLOCK_TOL
            && u[(1, 0)].norm() <= BLOCK_TOL
            && (u[(0, 0)] - math::ONE).norm() <= BLOCK_TOL
        {
            return vec![Gate::phase(*q, u[(1, 1)].arg())];
        }
    }
    vec![Gate::matrix(targets.to_vec(), u.clone())]
}

/// Replace every controlled gate whose controls are measured directly after it
/// (by a mid-circuit measurement or, with no later gate, the terminal one) by
/// measurements of the controls and a classically controlled gate on the targets.
pub fn fold_control_measurement(circuit: &Circuit) -> Result<PassOutput> {
    const NAME: &str = "fold-measurement";
    let mut current = circuit.clone();
    let (mut folded, mut placed) = (0, 0);
    // a fold can place a measurement right after an earlier controlled gate
    while let Some((next, n, added)) = fold_measurement_once(&current) {
        current = next;
        folded += n;
        placed += added;
    }
    if folded == 0 {
        return Ok(PassOutput::unchanged(circuit, NAME));
    }
    let mut report = RewriteReport::new(NAME, circuit);
    report.applied = true;
    report.gates_removed = folded;
    report.gates_added = folded;
    report
        .notes
        .push(format!("{placed} control measurements placed"));
    Ok(PassOutput {
        report: report.finish(&current),
        circuit: current,
        premap: None,
        post: None,
        weight: 1.0,
    })
}

/// One sweep: the rewritten circuit, the number of folded gates and the
/// number of measurements emitted.
fn fold_measurement_once(circuit: &Circuit) -> Option<(Circuit, usize, usize)> {
    let gates = &circuit.gates;
    let measured = circuit.terminally_measured();
    let next_on = |i: usize, q: usize| (i + 1..gates.len()).find(|&j| gates[j].acts_on(q));

    // per candidate gate: for each control, the mid-circuit measurement to move (if any)
    let mut plans: Vec<(usize, Vec<Option<usize>>)> = Vec::new();
    for (i, g) in gates.iter().enumerate() {
        let Some(view) = g.controlled_view() else {
            continue;
        };
        if view.targets.is_empty() {
            continue;
        }
        let mut moves = Vec::new();
        let ok = view.controls.iter().all(|&c| match next_on(i, c) {
            Some(j) if gates[j].is_measurement() => {
                moves.push(Some(j));
                true
            }
            None if measured.contains(&c) => {
                moves.push(None);
                true
            }
            _ => false,
        });
        if ok {
            plans.push((i, moves));
        }
    }
    if plans.is_empty() {
        return None;
    }

    let moved: std::collections::HashSet<usize> = plans
        .iter()
        .flat_map(|(_, m)| m.iter().flatten().copied())
        .collect();
    let mut fresh = circuit.next_wire();
    let mut out_gates = Vec::with_capacity(gates.len() + plans.len());
    let mut plan_iter = plans.iter().peekable();
    let mut added = 0;
    for (i, g) in gates.iter().enumerate() {
        if moved.contains(&i) {
            continue;
        }
        match plan_iter.peek() {
            Some((p, moves)) if *p == i => {
                let view = g.controlled_view().expect("planned gates are controlled");
                let mut wires = Vec::new();
                for (&c, m) in view.controls.iter().zip(moves) {
                    let w = match m {
                        Some(j) => gates[*j].wires[0],
                        None => {
                            fresh += 1;
                            fresh - 1
                        }
                    };
                    out_gates.push(Gate::measure(c, w));
                    added += 1;
                    wires.push(w);
                }
                let branches = view
                    .blocks
                    .iter()
                    .map(|u| block_gates(&view.targets, u))
                    .collect();
                out_gates.push(Gate::classically_controlled(wires, branches));
                plan_iter.next();
            }
            _ => out_gates.push(g.clone()),
        }
    }
    let mut out = circuit.clone();
    out.gates = out_gates;
    Some((out, plans.len(), added))
}

/// Replace every controlled gate whose controls still hold their prepared
/// basis values by the selected block `U_x` on its targets. Earlier gates that
/// use a qubit only as a control (or measure it) leave its value known.
pub fn fold_control_preparation(circuit: &Circuit) -> Result<PassOutput> {
    const NAME: &str = "fold-preparation";
    let mut known = circuit.preparations.clone();
    let mut out_gates = Vec::with_capacity(circuit.gates.len());
    let (mut removed, mut added) = (0, 0);
    for g in &circuit.gates {
        if let Some(view) = g.controlled_view() {
            let values: Option<Vec<bool>> = view.controls.iter().map(|&c| known[c]).collect();
            if let Some(values) = values {
                let x = values
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, &b)| acc | (b as usize) << i);
                let replacement = block_gates(&view.targets, &view.blocks[x]);
                if !replacement.is_empty() {
                    for &t in &view.targets {
                        known[t] = None;
                    }
                }
                removed += 1;
                added += replacement.len();
                out_gates.extend(replacement);
                continue;
            }
            for &t in &view.targets {
                known[t] = None;
            }
        } else if !g.is_measurement() {
            for &q in &g.operands {
                known[q] = None;
            }
        }
        out_gates.push(g.clone());
    }
    if removed == 0 {
        return Ok(PassOutput::unchanged(circuit, NAME));
    }
    let mut out = circuit.clone();
    out.gates = out_gates;
    let mut report = RewriteReport::new(NAME, circuit);
    report.applied = true;
    report.gates_removed = removed;
    report.gates_added = added;
    Ok(PassOutput {
        report: report.finish(&out),
        circuit: out,
        premap: None,
        post: None,
        weight: 1.0,
    })
}
