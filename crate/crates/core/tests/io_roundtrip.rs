mod common;

use common::{fixture, fixture_path, random_circuit};
use proptest::prelude::*;
use qboundary::io::{
    emit_circuit_string, hybrid_program_to_string, parse_circuit_str, parse_program_str,
};
use qboundary::ir::program::admissible_inputs;
use qboundary::ir::{BasisState, GateKind};
use qboundary::passes::{simplify_pipeline, PassList};
use qboundary::sim::run_hybrid_exact;
use qboundary::{Caps, Error};

const FIXTURES: [&str; 7] = [
    "ghz_fanout",
    "controlled_rz",
    "cx_hadamards",
    "ancilla_gate_cut",
    "ancilla_wire_cut",
    "qft4",
    "ancilla_instrument",
];

#[test]
fn ghz_fanout_fixture_shape() {
    let c = fixture("ghz_fanout");
    assert_eq!(c.width, 4);
    assert_eq!(c.gates.len(), 4);
    assert_eq!(c.measurements.len(), 4);
    assert!(matches!(
        c.gates[1].kind,
        GateKind::ControlledBlock { controls: 1, .. }
    ));
}

#[test]
fn fixtures_round_trip_byte_identical() {
    for name in FIXTURES {
        let c = fixture(name);
        let first = emit_circuit_string(&c);
        let reparsed = parse_circuit_str(&first).unwrap();
        assert_eq!(reparsed, c, "{name}");
        assert_eq!(emit_circuit_string(&reparsed), first, "{name}");
    }
}

#[test]
fn simplified_programs_round_trip() {
    let caps = Caps::default();
    let passes: PassList = "trim,fold,si,factor".parse().unwrap();
    for name in FIXTURES {
        let c = fixture(name);
        let (program, _) = simplify_pipeline(&c, &passes.0, 8, &caps).unwrap();
        let text = hybrid_program_to_string(&program);
        let back = parse_program_str(&text).unwrap();
        assert_eq!(hybrid_program_to_string(&back), text, "{name}");
        for x in admissible_inputs(&program.input_preparations)
            .into_iter()
            .take(8)
        {
            let input = BasisState::new(c.width, x).unwrap();
            assert_eq!(
                run_hybrid_exact(&program, &input, &caps).unwrap(),
                run_hybrid_exact(&back, &input, &caps).unwrap(),
                "{name} input {x}"
            );
        }
    }
}

#[test]
fn si_output_file_holds_stochastic_matrix() {
    let c = fixture("ancilla_instrument");
    let (program, _) = simplify_pipeline(
        &c,
        &"si-measurement".parse::<PassList>().unwrap().0,
        1,
        &Caps::default(),
    )
    .unwrap();
    let value: serde_json::Value =
        serde_json::from_str(&hybrid_program_to_string(&program)).unwrap();
    let stage = &value["post_stages"][0];
    assert_eq!(stage["kind"], "stochastic");
    let rows: Vec<Vec<f64>> = serde_json::from_value(stage["matrix"].clone()).unwrap();
    assert_eq!(rows.len(), 4);
    for j in 0..4 {
        let sum: f64 = rows.iter().map(|r| r[j]).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn unknown_kind_is_reported() {
    let text = r#"{"width":1,"gates":[{"kind":"FOO","operands":[1]}],"measurements":[[1,1]]}"#;
    match parse_circuit_str(text) {
        Err(Error::UnknownGateKind { kind, .. }) => assert_eq!(kind, "FOO"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_io_error() {
    let err = qboundary::io::parse_circuit_file(fixture_path("does_not_exist")).unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_circuits_round_trip(seed in any::<u64>()) {
        let c = random_circuit(seed);
        let text = emit_circuit_string(&c);
        let back = parse_circuit_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(emit_circuit_string(&back), text);
    }
}

fn corpus_seeds() -> Vec<String> {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seeds = Vec::new();
    for target in ["parse_circuit", "parse_program"] {
        for entry in std::fs::read_dir(root.join(target)).unwrap() {
            seeds.push(std::fs::read_to_string(entry.unwrap().path()).unwrap());
        }
    }
    seeds.sort();
    seeds
}

/// The fuzz targets' round-trip check on arbitrary text.
fn accepts_round_trip(text: &str) {
    if let Ok(c) = parse_circuit_str(text) {
        let emitted = emit_circuit_string(&c);
        assert_eq!(parse_circuit_str(&emitted).unwrap(), c);
    }
    if let Ok(p) = parse_program_str(text) {
        let emitted = hybrid_program_to_string(&p);
        assert_eq!(
            hybrid_program_to_string(&parse_program_str(&emitted).unwrap()),
            emitted
        );
    }
}

#[test]
fn fuzz_corpus_seeds_round_trip() {
    let seeds = corpus_seeds();
    assert!(seeds.len() >= 10);
    for s in &seeds {
        accepts_round_trip(s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mutated_seeds_never_panic(pick in any::<usize>(), edits in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8)) {
        let seeds = corpus_seeds();
        let mut bytes = seeds[pick % seeds.len()].clone().into_bytes();
        for (at, b) in edits {
            let i = at % bytes.len();
            // printable replacements keep most mutants valid UTF-8 and JSON-ish
            bytes[i] = b" 0123456789.-,[]{}\"eE"[b as usize % 21];
        }
        if let Ok(text) = String::from_utf8(bytes) {
            accepts_round_trip(&text);
        }
    }
}
