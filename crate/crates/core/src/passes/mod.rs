//! Boundary rewrites turning incoherent circuit parts into classical stages,
//! and the round-robin pipeline that drives them to a fixed point.

mod factor;
mod fold;
mod si;
mod trim;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::{compose_stages, Circuit, ClassicalStage, HybridProgram};

pub use factor::{factor_and_trim, FactorHints, FactorSide, UserFactorization};
pub use fold::{fold_control_measurement, fold_control_preparation};
pub use si::{si_fold_measurement, si_fold_preparation};
pub use trim::{trim_measurement_boundary, trim_preparation_boundary};

/// Phase table dropped by a rewrite: `phases[x]` over local basis states of `qubits`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscardedPhase {
    pub qubits: Vec<usize>,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewriteReport {
    pub pass: String,
    pub round: usize,
    pub applied: bool,
    pub gates_removed: usize,
    pub gates_added: usize,
    pub stages_added: usize,
    pub gate_count_before: usize,
    pub gate_count_after: usize,
    pub multi_qubit_before: usize,
    pub multi_qubit_after: usize,
    /// Factor by which the program weight was multiplied.
    pub weight: f64,
    pub discarded_phases: Vec<DiscardedPhase>,
    pub notes: Vec<String>,
}

impl RewriteReport {
    pub(crate) fn new(pass: &str, before: &Circuit) -> Self {
        RewriteReport {
            pass: pass.to_string(),
            round: 0,
            applied: false,
            gates_removed: 0,
            gates_added: 0,
            stages_added: 0,
            gate_count_before: before.gate_count(),
            gate_count_after: before.gate_count(),
            multi_qubit_before: before.multi_qubit_gate_count(),
            multi_qubit_after: before.multi_qubit_gate_count(),
            weight: 1.0,
            discarded_phases: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn finish(mut self, after: &Circuit) -> Self {
        self.gate_count_after = after.gate_count();
        self.multi_qubit_after = after.multi_qubit_gate_count();
        self
    }
}

/// Result of one pass: the rewritten circuit and any classical stages it produced.
#[derive(Debug, Clone)]
pub struct PassOutput {
    pub circuit: Circuit,
    /// Applied to the circuit's starting bitstring.
    pub premap: Option<ClassicalStage>,
    /// Applied to the circuit's terminal outcomes, before any existing post stages.
    pub post: Option<ClassicalStage>,
    pub weight: f64,
    pub report: RewriteReport,
}

impl PassOutput {
    pub(crate) fn unchanged(circuit: &Circuit, pass: &str) -> Self {
        PassOutput {
            circuit: circuit.clone(),
            premap: None,
            post: None,
            weight: 1.0,
            report: RewriteReport::new(pass, circuit),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pass {
    TrimMeasurement,
    TrimPreparation,
    FoldControlMeasurement,
    FoldControlPreparation,
    SiMeasurement,
    SiPreparation,
    Factor(FactorSide, FactorHints),
}

impl Pass {
    pub fn name(&self) -> &'static str {
        match self {
            Pass::TrimMeasurement => "trim-measurement",
            Pass::TrimPreparation => "trim-preparation",
            Pass::FoldControlMeasurement => "fold-measurement",
            Pass::FoldControlPreparation => "fold-preparation",
            Pass::SiMeasurement => "si-measurement",
            Pass::SiPreparation => "si-preparation",
            Pass::Factor(FactorSide::Measurement, _) => "factor-measurement",
            Pass::Factor(FactorSide::Preparation, _) => "factor-preparation",
        }
    }

    pub fn apply(&self, circuit: &Circuit, caps: &Caps) -> Result<PassOutput> {
        match self {
            Pass::TrimMeasurement => trim_measurement_boundary(circuit, caps),
            Pass::TrimPreparation => trim_preparation_boundary(circuit, caps),
            Pass::FoldControlMeasurement => fold_control_measurement(circuit),
            Pass::FoldControlPreparation => fold_control_preparation(circuit),
            Pass::SiMeasurement => si_fold_measurement(circuit, caps),
            Pass::SiPreparation => si_fold_preparation(circuit, caps),
            Pass::Factor(side, hints) => factor_and_trim(circuit, *side, hints, caps),
        }
    }
}

/// A comma-separated pass list. Group names expand to both boundary variants:
/// `trim`, `fold`, `si`, `factor`; single variants use the names of
/// [`Pass::name`].
#[derive(Debug, Clone, PartialEq)]
pub struct PassList(pub Vec<Pass>);

impl FromStr for PassList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut passes = Vec::new();
        let none = FactorHints::default;
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "trim" => passes.extend([Pass::TrimMeasurement, Pass::TrimPreparation]),
                "fold" => {
                    passes.extend([Pass::FoldControlMeasurement, Pass::FoldControlPreparation])
                }
                "si" => passes.extend([Pass::SiMeasurement, Pass::SiPreparation]),
                "factor" => passes.extend([
                    Pass::Factor(FactorSide::Measurement, none()),
                    Pass::Factor(FactorSide::Preparation, none()),
                ]),
                "trim-measurement" => passes.push(Pass::TrimMeasurement),
                "trim-preparation" => passes.push(Pass::TrimPreparation),
                "fold-measurement" => passes.push(Pass::FoldControlMeasurement),
                "fold-preparation" => passes.push(Pass::FoldControlPreparation),
                "si-measurement" => passes.push(Pass::SiMeasurement),
                "si-preparation" => passes.push(Pass::SiPreparation),
                "factor-measurement" => passes.push(Pass::Factor(FactorSide::Measurement, none())),
                "factor-preparation" => passes.push(Pass::Factor(FactorSide::Preparation, none())),
                other => return Err(Error::parse("pass list", format!("unknown pass `{other}`"))),
            }
        }
        Ok(PassList(passes))
    }
}

impl fmt::Display for PassList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.iter().map(Pass::name).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Fold one pass result into the program: premaps compose after the existing
/// premap, new post stages run before the existing ones.
pub fn absorb(program: &mut HybridProgram, out: PassOutput) -> Result<()> {
    program.circuit = out.circuit;
    if let Some(pre) = out.premap {
        program.input_premap = Some(match program.input_premap.take() {
            None => pre,
            Some(old) => compose_stages(&old, &pre)?,
        });
    }
    if let Some(post) = out.post {
        program.post_stages.insert(0, post);
    }
    program.weight *= out.weight;
    Ok(())
}

/// Apply `passes` round-robin until a round changes nothing or `max_rounds`
/// rounds have run. A pass result that would increase the gate count is
/// discarded. Returns the program and one report per pass invocation.
pub fn simplify_pipeline(
    circuit: &Circuit,
    passes: &[Pass],
    max_rounds: usize,
    caps: &Caps,
) -> Result<(HybridProgram, Vec<RewriteReport>)> {
    let mut program = HybridProgram::from_circuit(circuit.clone());
    let mut reports = Vec::new();
    for round in 1..=max_rounds {
        let mut changed = false;
        for pass in passes {
            let mut out = pass.apply(&program.circuit, caps)?;
            out.report.round = round;
            if out.report.applied && out.circuit.gate_count() > program.circuit.gate_count() {
                out.report.applied = false;
                out.report
                    .notes
                    .push("discarded: gate count would increase".into());
                log::debug!(
                    "{} discarded in round {round}: gate count would increase",
                    pass.name()
                );
                reports.push(out.report);
                continue;
            }
            let report = out.report.clone();
            if report.applied {
                log::info!(
                    "round {round}: {} removed {} gates, added {} stages",
                    pass.name(),
                    report.gates_removed,
                    report.stages_added
                );
                absorb(&mut program, out)?;
                changed = true;
            }
            reports.push(report);
        }
        if !changed {
            break;
        }
    }
    Ok((program, reports))
}
