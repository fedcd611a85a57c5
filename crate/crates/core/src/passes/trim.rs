use super::{DiscardedPhase, PassOutput, RewriteReport};
use crate::caps::Caps;
use crate::error::Result;
use crate::ir::basis::{gather_bits, scatter_bits};
use crate::ir::{Circuit, ClassicalStage, Gate};
use crate::phase_poly::{gate_phase_poly, segment_to_phase_poly};

fn sorted_support(gates: &[&Gate]) -> Vec<usize> {
    let mut s: Vec<usize> = gates
        .iter()
        .flat_map(|g| g.operands.iter().copied())
        .collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn trimmable(g: &Gate) -> bool {
    g.is_quantum_gate() && !g.is_classically_controlled() && gate_phase_poly(g).is_some()
}

/// Remove the maximal trailing run of gates with a phase-polynomial
/// representation whose qubits are all terminally measured, and replace it by
/// the deterministic post stage `f` of that run. A gate outside the run blocks
/// every earlier gate sharing a qubit with it.
pub fn trim_measurement_boundary(circuit: &Circuit, caps: &Caps) -> Result<PassOutput> {
    const NAME: &str = "trim-measurement";
    let measured = circuit.terminally_measured();
    let mut blocked = vec![false; circuit.width];
    let mut take = vec![false; circuit.gates.len()];
    for (i, g) in circuit.gates.iter().enumerate().rev() {
        let free = g
            .operands
            .iter()
            .all(|q| measured.contains(q) && !blocked[*q]);
        if free && trimmable(g) {
            take[i] = true;
        } else {
            for &q in &g.operands {
                blocked[q] = true;
            }
        }
    }
    let segment: Vec<&Gate> = circuit
        .gates
        .iter()
        .zip(&take)
        .filter(|(_, t)| **t)
        .map(|(g, _)| g)
        .collect();
    if segment.is_empty() {
        return Ok(PassOutput::unchanged(circuit, NAME));
    }
    Caps::check(
        "post-processing table",
        circuit.num_outputs(),
        caps.table_width,
    )?;
    let support = sorted_support(&segment);
    let owned: Vec<Gate> = segment.iter().map(|g| (*g).clone()).collect();
    let rep = segment_to_phase_poly(&owned, &support, caps)?
        .expect("every trimmed gate has a representation");
    let positions: Vec<usize> = support
        .iter()
        .map(|&q| circuit.output_bit(q).expect("trimmed qubits are measured"))
        .collect();
    let stage =
        ClassicalStage::deterministic_on_bits(circuit.num_outputs(), &positions, rep.perm())?;

    let mut out = circuit.clone();
    out.gates = circuit
        .gates
        .iter()
        .zip(&take)
        .filter(|(_, t)| !**t)
        .map(|(g, _)| g.clone())
        .collect();
    let mut report = RewriteReport::new(NAME, circuit);
    report.applied = true;
    report.gates_removed = segment.len();
    report.stages_added = 1;
    report.discarded_phases.push(DiscardedPhase {
        qubits: support,
        phases: rep.phase().to_vec(),
    });
    Ok(PassOutput {
        report: report.finish(&out),
        circuit: out,
        premap: None,
        post: Some(stage),
        weight: 1.0,
    })
}

/// Preparation markers after a premap acting on `support`: a qubit keeps a
/// fixed value only if every admissible start maps to the same bit.
pub(crate) fn effective_preparations(
    preparations: &[Option<bool>],
    support: &[usize],
    local_outputs: impl Fn(usize) -> Vec<usize>,
) -> Vec<Option<bool>> {
    let mut out = preparations.to_vec();
    let fixed = support.iter().enumerate().fold(0usize, |acc, (i, &q)| {
        acc | ((preparations[q] == Some(true)) as usize) << i
    });
    let free: Vec<usize> = (0..support.len())
        .filter(|&i| preparations[support[i]].is_none())
        .collect();
    let mut seen_one = vec![false; support.len()];
    let mut seen_zero = vec![false; support.len()];
    for v in 0..1usize << free.len() {
        let x = scatter_bits(fixed, &free, v);
        for y in local_outputs(x) {
            for (i, (one, zero)) in seen_one.iter_mut().zip(seen_zero.iter_mut()).enumerate() {
                if gather_bits(y, &[i]) == 1 {
                    *one = true;
                } else {
                    *zero = true;
                }
            }
        }
    }
    for (i, &q) in support.iter().enumerate() {
        out[q] = match (seen_zero[i], seen_one[i]) {
            (true, false) => Some(false),
            (false, true) => Some(true),
            _ => None,
        };
    }
    out
}

/// Remove the maximal leading run of gates with a phase-polynomial
/// representation and record its basis map as a premap. Inputs are treated as
/// computational basis states; the dropped phases are global per input.
pub fn trim_preparation_boundary(circuit: &Circuit, caps: &Caps) -> Result<PassOutput> {
    const NAME: &str = "trim-preparation";
    let mut blocked = vec![false; circuit.width];
    let mut take = vec![false; circuit.gates.len()];
    for (i, g) in circuit.gates.iter().enumerate() {
        let free = g.operands.iter().all(|q| !blocked[*q]);
        if free && trimmable(g) {
            take[i] = true;
        } else {
            for &q in &g.operands {
                blocked[q] = true;
            }
        }
    }
    let segment: Vec<&Gate> = circuit
        .gates
        .iter()
        .zip(&take)
        .filter(|(_, t)| **t)
        .map(|(g, _)| g)
        .collect();
    if segment.is_empty() {
        return Ok(PassOutput::unchanged(circuit, NAME));
    }
    Caps::check("preparation table", circuit.width, caps.table_width)?;
    let support = sorted_support(&segment);
    let owned: Vec<Gate> = segment.iter().map(|g| (*g).clone()).collect();
    let rep = segment_to_phase_poly(&owned, &support, caps)?
        .expect("every trimmed gate has a representation");
    let premap = ClassicalStage::deterministic_on_bits(circuit.width, &support, rep.perm())?;

    let mut out = circuit.clone();
    out.gates = circuit
        .gates
        .iter()
        .zip(&take)
        .filter(|(_, t)| !**t)
        .map(|(g, _)| g.clone())
        .collect();
    out.preparations =
        effective_preparations(&circuit.preparations, &support, |x| vec![rep.perm()[x]]);
    let mut report = RewriteReport::new(NAME, circuit);
    report.applied = true;
    report.gates_removed = segment.len();
    report.stages_added = 1;
    report.discarded_phases.push(DiscardedPhase {
        qubits: support,
        phases: rep.phase().to_vec(),
    });
    Ok(PassOutput {
        report: report.finish(&out),
        circuit: out,
        premap: Some(premap),
        post: None,
        weight: 1.0,
    })
}
