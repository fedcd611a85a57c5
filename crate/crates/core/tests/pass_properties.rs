mod common;

use common::{max_diff, oracle_distribution, random_circuit};
use proptest::prelude::*;
use qboundary::ir::program::admissible_inputs;
use qboundary::ir::{BasisState, Circuit, ClassicalStage, Gate, HybridProgram};
use qboundary::passes::{absorb, simplify_pipeline, FactorHints, FactorSide, Pass};
use qboundary::random::haar_unitary;
use qboundary::sim::run_hybrid_exact;
use qboundary::Caps;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_passes() -> Vec<Pass> {
    vec![
        Pass::TrimMeasurement,
        Pass::TrimPreparation,
        Pass::FoldControlMeasurement,
        Pass::FoldControlPreparation,
        Pass::SiMeasurement,
        Pass::SiPreparation,
        Pass::Factor(FactorSide::Measurement, FactorHints::default()),
        Pass::Factor(FactorSide::Preparation, FactorHints::default()),
    ]
}

fn column_stochastic(stage: &ClassicalStage) -> bool {
    (0..stage.dim()).all(|x| (stage.column(x).iter().sum::<f64>() - 1.0).abs() <= 1e-12)
}

fn program_matches_oracle(
    original: &Circuit,
    program: &HybridProgram,
) -> Result<(), TestCaseError> {
    for x in admissible_inputs(&original.preparations) {
        let expected = oracle_distribution(original, x);
        let input = BasisState::new(original.width, x).unwrap();
        let got = run_hybrid_exact(program, &input, &Caps::default()).unwrap();
        let dev = max_diff(&expected, &got);
        prop_assert!(dev <= 1e-9, "input {x}: deviation {dev}");
    }
    Ok(())
}

fn check_pass(c: &Circuit, pass: &Pass) -> Result<(), TestCaseError> {
    let caps = Caps::default();
    let out = pass.apply(c, &caps).unwrap();
    prop_assert!(
        out.circuit.gate_count() <= c.gate_count(),
        "{} grew the circuit from {} to {}",
        pass.name(),
        c.gate_count(),
        out.circuit.gate_count()
    );
    for stage in out.premap.iter().chain(out.post.iter()) {
        prop_assert!(
            column_stochastic(stage),
            "{} produced a non-stochastic stage",
            pass.name()
        );
    }
    let again = pass.apply(&out.circuit, &caps).unwrap();
    prop_assert!(!again.report.applied, "{} is not idempotent", pass.name());
    prop_assert_eq!(&again.circuit, &out.circuit);

    let mut program = HybridProgram::from_circuit(c.clone());
    absorb(&mut program, out).unwrap();
    program_matches_oracle(c, &program)
}

/// Ancillas in `|0⟩` entangled with system controls by random controlled
/// blocks, measured, and feeding classically controlled permutations.
fn random_ancilla_pattern(seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns = rng.gen_range(1..=3);
    let na = rng.gen_range(1..=2);
    let n = ns + na;
    let mut c = Circuit::new(n);
    for a in ns..n {
        c.preparations[a] = Some(false);
    }
    // measurement shape: system gates before the pattern; preparation shape: after it
    let measurement_shape = rng.gen_bool(0.5);
    for q in (0..ns).filter(|_| measurement_shape) {
        match rng.gen_range(0..3) {
            0 => c.push(Gate::h(q)),
            1 => c.push(Gate::rx(q, rng.gen_range(0.0..3.0))),
            _ => c.push(Gate::x(q)),
        };
    }
    for a in ns..n {
        c.push(Gate::h(a));
        let ctrl = rng.gen_range(0..ns);
        let blocks = vec![haar_unitary(1, &mut rng), haar_unitary(1, &mut rng)];
        c.push(Gate::controlled_block(vec![ctrl], vec![a], blocks));
    }
    let wires: Vec<usize> = (ns..n).map(|a| 10 + a).collect();
    for (a, &w) in (ns..n).zip(&wires) {
        c.push(Gate::measure(a, w));
    }
    for &w in &wires {
        let t = rng.gen_range(0..ns);
        let branch = if ns > 1 && rng.gen_bool(0.5) {
            vec![Gate::cx(t, (t + 1) % ns)]
        } else {
            vec![Gate::x(t)]
        };
        c.push(Gate::classically_controlled(vec![w], vec![vec![], branch]));
    }
    if !measurement_shape {
        c.push(Gate::h(rng.gen_range(0..ns)));
    }
    for q in 0..ns {
        c = c.measure(q, q);
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_pass_preserves_distributions(seed in any::<u64>()) {
        let c = random_circuit(seed);
        for pass in all_passes() {
            check_pass(&c, &pass)?;
        }
    }

    #[test]
    fn ancilla_patterns_fold_exactly(seed in any::<u64>()) {
        let c = random_ancilla_pattern(seed);
        let caps = Caps::default();
        let applied = Pass::SiMeasurement.apply(&c, &caps).unwrap().report.applied
            || Pass::SiPreparation.apply(&c, &caps).unwrap().report.applied;
        prop_assert!(applied, "no ancilla variant matched");
        for pass in all_passes() {
            check_pass(&c, &pass)?;
        }
    }

    #[test]
    fn pipeline_reaches_fixed_point(seed in any::<u64>()) {
        let c = random_circuit(seed);
        let passes = all_passes();
        let max_rounds = 20;
        let (program, reports) = simplify_pipeline(&c, &passes, max_rounds, &Caps::default()).unwrap();
        let mut count = c.gate_count();
        for r in reports.iter().filter(|r| r.applied) {
            prop_assert!(r.gate_count_after <= r.gate_count_before);
            prop_assert_eq!(r.gate_count_before, count);
            count = r.gate_count_after;
        }
        prop_assert_eq!(count, program.circuit.gate_count());
        let last_round = reports.iter().map(|r| r.round).max().unwrap_or(0);
        prop_assert!(reports.iter().filter(|r| r.round == last_round).all(|r| !r.applied), "no fixed point in {max_rounds} rounds");
        for stage in program.input_premap.iter().chain(&program.post_stages) {
            prop_assert!(column_stochastic(stage));
        }
        program_matches_oracle(&c, &program)?;
    }
}

#[test]
fn trim_prefix_preserves_state_up_to_phase() {
    use qboundary::passes::trim_preparation_boundary;
    use qboundary::sim::simulate_statevector;
    let caps = Caps::default();
    for seed in 0..40 {
        let c = random_circuit(seed);
        let out = trim_preparation_boundary(&c, &caps).unwrap();
        let Some(pre) = out.premap.clone() else {
            continue;
        };
        for x in admissible_inputs(&c.preparations) {
            let start = qboundary::ir::program::resolve_preparations(&c.preparations, x);
            let y = (0..pre.dim())
                .find(|&y| pre.entry(y, start) == 1.0)
                .unwrap();
            let full = simulate_statevector(
                &Circuit {
                    measurements: vec![],
                    ..c.clone()
                },
                &BasisState::new(c.width, start).unwrap(),
                &caps,
            )
            .unwrap();
            let mut rest = out.circuit.clone();
            rest.measurements.clear();
            rest.preparations = vec![None; c.width];
            let trimmed =
                simulate_statevector(&rest, &BasisState::new(c.width, y).unwrap(), &caps).unwrap();
            let fidelity = full.inner(&trimmed).norm();
            assert!(
                (fidelity - 1.0).abs() <= 1e-10,
                "seed {seed} input {x}: fidelity {fidelity}"
            );
        }
    }
}
