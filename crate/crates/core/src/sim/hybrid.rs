use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::statevector::{distribution_from_state, embed_free_state, StateVector};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ir::program::{admissible_inputs, resolve_preparations};
use crate::ir::{BasisState, ClassicalStage, HybridProgram};

/// Input to a hybrid program.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    /// Computational basis input over the full register.
    Basis(BasisState),
    /// Amplitudes over the free (unprepared) qubits in ascending order.
    Free(StateVector),
}

impl Input {
    pub fn describe(&self) -> String {
        match self {
            Input::Basis(b) => format!("basis {:0w$b}", b.index(), w = b.width().max(1)),
            Input::Free(s) => format!("state on {} free qubits", s.width()),
        }
    }
}

/// Distribution over the circuit's terminal wires when it starts from basis `z`.
fn circuit_distribution(program: &HybridProgram, z: usize, caps: &Caps) -> Result<Vec<f64>> {
    let c = &program.circuit;
    let start = StateVector::basis(c.width, resolve_preparations(&c.preparations, z));
    distribution_from_state(c, start, caps)
}

/// Distribution of the circuit's raw outputs (before post stages) and unscaled.
fn raw_distribution(program: &HybridProgram, input: &Input, caps: &Caps) -> Result<Vec<f64>> {
    match input {
        Input::Basis(b) => {
            if b.width() != program.width() {
                return Err(Error::WidthMismatch {
                    expected: program.width(),
                    found: b.width(),
                });
            }
            let y = program.resolve_input(b.index());
            match &program.input_premap {
                None => circuit_distribution(program, y, caps),
                Some(pre) => {
                    let mut acc = vec![0.0; 1 << program.num_outputs()];
                    for (z, p) in pre.column(y).into_iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        for (a, v) in acc.iter_mut().zip(circuit_distribution(program, z, caps)?) {
                            *a += p * v;
                        }
                    }
                    Ok(acc)
                }
            }
        }
        Input::Free(state) => {
            if program.input_premap.is_some() {
                return Err(Error::Unsupported {
                    index: 0,
                    reason: "a classical input premap only accepts basis inputs".into(),
                });
            }
            let full = embed_free_state(&program.input_preparations, state)?;
            distribution_from_state(&program.circuit, full, caps)
        }
    }
}

/// Exact output distribution (weighted) of a hybrid program.
pub fn run_hybrid(program: &HybridProgram, input: &Input, caps: &Caps) -> Result<Vec<f64>> {
    let mut dist = raw_distribution(program, input, caps)?;
    for s in &program.post_stages {
        dist = s.apply(&dist)?;
    }
    if program.weight != 1.0 {
        for p in &mut dist {
            *p *= program.weight;
        }
    }
    Ok(dist)
}

/// [`run_hybrid`] on a basis input.
pub fn run_hybrid_exact(
    program: &HybridProgram,
    input: &BasisState,
    caps: &Caps,
) -> Result<Vec<f64>> {
    run_hybrid(program, &Input::Basis(*input), caps)
}

struct Sampler {
    circuit: HashMap<usize, WeightedIndex<f64>>,
    stages: HashMap<(usize, usize), WeightedIndex<f64>>,
}

fn weighted(p: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(p)
        .map_err(|e| Error::InvalidStage(format!("cannot sample distribution: {e}")))
}

/// Draw `shots` outcomes, sampling each stochastic stage independently per shot.
/// Returns counts indexed by the final output string.
pub fn sample_hybrid(
    program: &HybridProgram,
    input: &Input,
    shots: u64,
    seed: u64,
    caps: &Caps,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if program.weight != 1.0 {
        return Err(Error::Unsupported {
            index: 0,
            reason: format!(
                "weight {} is not a probability; use exact evaluation",
                program.weight
            ),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; 1 << program.num_outputs()];
    let mut cache = Sampler {
        circuit: HashMap::new(),
        stages: HashMap::new(),
    };
    // free-state inputs and premap-less basis inputs have a single circuit start
    let fixed_start = match input {
        Input::Free(_) => Some(weighted(&raw_distribution(program, input, caps)?)?),
        Input::Basis(b) if program.input_premap.is_none() => {
            Some(weighted(&raw_distribution(program, input, caps)?)?)
        }
        Input::Basis(b) if b.width() != program.width() => {
            return Err(Error::WidthMismatch {
                expected: program.width(),
                found: b.width(),
            })
        }
        Input::Basis(_) => None,
    };
    let premap_column = match (input, &program.input_premap) {
        (Input::Basis(b), Some(pre)) => {
            Some(weighted(&pre.column(program.resolve_input(b.index())))?)
        }
        _ => None,
    };
    for _ in 0..shots {
        let mut out = match (&fixed_start, &premap_column) {
            (Some(w), _) => w.sample(&mut rng),
            (None, Some(col)) => {
                let z = col.sample(&mut rng);
                if let std::collections::hash_map::Entry::Vacant(e) = cache.circuit.entry(z) {
                    let d = circuit_distribution(program, z, caps)?;
                    e.insert(weighted(&d)?);
                }
                cache.circuit[&z].sample(&mut rng)
            }
            (None, None) => unreachable!("basis input without premap has a fixed start"),
        };
        for (k, s) in program.post_stages.iter().enumerate() {
            out = match s {
                ClassicalStage::Deterministic { table, .. } => table[out],
                ClassicalStage::Stochastic { .. } => {
                    if let std::collections::hash_map::Entry::Vacant(e) =
                        cache.stages.entry((k, out))
                    {
                        e.insert(weighted(&s.column(out))?);
                    }
                    cache.stages[&(k, out)].sample(&mut rng)
                }
            };
        }
        counts[out] += 1;
    }
    Ok(counts)
}

/// Outcome of comparing two programs on a set of inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub inputs_checked: usize,
    pub max_deviation: f64,
    pub worst_input: Option<String>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compare exact output distributions in max norm over `inputs`.
pub fn equivalence_check(
    a: &HybridProgram,
    b: &HybridProgram,
    inputs: &[Input],
    tolerance: f64,
    caps: &Caps,
) -> Result<EquivalenceReport> {
    if a.num_outputs() != b.num_outputs() {
        return Err(Error::Incomparable(format!(
            "{} outputs versus {} outputs",
            a.num_outputs(),
            b.num_outputs()
        )));
    }
    if a.width() != b.width() {
        return Err(Error::Incomparable(format!(
            "width {} versus width {}",
            a.width(),
            b.width()
        )));
    }
    let mut max_deviation: f64 = 0.0;
    let mut worst_input = None;
    for input in inputs {
        let pa = run_hybrid(a, input, caps)?;
        let pb = run_hybrid(b, input, caps)?;
        let dev = pa
            .iter()
            .zip(&pb)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if dev > max_deviation || worst_input.is_none() {
            max_deviation = max_deviation.max(dev);
            worst_input = Some(input.describe());
        }
    }
    Ok(EquivalenceReport {
        inputs_checked: inputs.len(),
        max_deviation,
        worst_input,
        tolerance,
        passed: max_deviation <= tolerance,
    })
}

/// Every admissible basis input of `program`, plus `random_states` seeded Haar
/// states on its free qubits.
pub fn default_inputs(program: &HybridProgram, random_states: usize, seed: u64) -> Vec<Input> {
    let width = program.width();
    let mut inputs: Vec<Input> = admissible_inputs(&program.input_preparations)
        .into_iter()
        .map(|x| Input::Basis(BasisState::new(width, x).expect("index fits register")))
        .collect();
    let free = program
        .input_preparations
        .iter()
        .filter(|p| p.is_none())
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_states {
        inputs.push(Input::Free(crate::random::haar_state(free, &mut rng)));
    }
    inputs
}
