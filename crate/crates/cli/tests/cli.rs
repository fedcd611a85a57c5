use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qboundary::io::{parse_circuit_file, parse_program_file};

const FIXTURES: [&str; 7] = [
    "ghz_fanout",
    "controlled_rz",
    "cx_hadamards",
    "ancilla_gate_cut",
    "ancilla_wire_cut",
    "qft4",
    "ancilla_instrument",
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qboundary"))
        .args(args)
        .env_remove("QBOUNDARY_STATEVECTOR_CAP")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hadamard_distribution_has_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(
        dir.path(),
        "h.json",
        r#"{"width":1,"gates":[{"kind":"H","operands":[1]}],"measurements":[[1,1]]}"#,
    );
    let out = run(&["simulate", s(&h), "--input", "0", "--exact"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0 0.500000000000\n1 0.500000000000\n");
}

#[test]
fn simplify_then_verify_on_every_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for name in FIXTURES {
        let out_path = dir.path().join(format!("{name}.out.json"));
        let out = run(&["simplify", s(&fixture(name)), "-o", s(&out_path)]);
        assert_eq!(
            code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(dir
            .path()
            .join(format!("{name}.out.json.report.json"))
            .exists());
        let out = run(&["verify", s(&fixture(name)), s(&out_path), "--tol", "1e-9"]);
        assert_eq!(code(&out), 0, "{name}: {}", stdout(&out));
    }
}

#[test]
fn unequal_circuits_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(
        dir.path(),
        "h.json",
        r#"{"width":1,"gates":[{"kind":"H","operands":[1]}],"measurements":[[1,1]]}"#,
    );
    let x = write(
        dir.path(),
        "x.json",
        r#"{"width":1,"gates":[{"kind":"X","operands":[1]}],"measurements":[[1,1]]}"#,
    );
    let out = run(&["verify", s(&h), s(&x)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("FAIL"));
}

#[test]
fn zero_rounds_leaves_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("p.json");
    let out = run(&[
        "simplify",
        s(&fixture("ghz_fanout")),
        "--max-rounds",
        "0",
        "-o",
        s(&out_path),
    ]);
    assert_eq!(code(&out), 0);
    let program = parse_program_file(&out_path).unwrap();
    assert_eq!(
        program.circuit,
        parse_circuit_file(fixture("ghz_fanout")).unwrap()
    );
    assert!(program.post_stages.is_empty() && program.input_premap.is_none());
}

#[test]
fn report_goes_to_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&[
        "simplify",
        s(&fixture("ancilla_instrument")),
        "--passes",
        "si",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"post_stages\""));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(value["passes"], "si-measurement,si-preparation");
    assert_eq!(value["gate_count_after"], 0);
}

#[test]
fn unknown_gate_kind_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"width":1,"gates":[{"kind":"FOO","operands":[1]}]}"#,
    );
    let out = run(&["info", s(&bad)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FOO"));
    assert_eq!(code(&run(&["simulate", "/nonexistent/file.json"])), 3);
}

#[test]
fn usage_errors_exit_two() {
    let f = fixture("ghz_fanout");
    assert_eq!(code(&run(&["simulate", s(&f), "--bogus"])), 2);
    assert_eq!(code(&run(&["verify", s(&f), s(&f), "--tol", "0"])), 2);
    assert_eq!(code(&run(&["simulate", s(&f), "--shots", "0"])), 2);
    assert_eq!(code(&run(&["simulate", s(&f), "--input", "99"])), 2);
    assert_eq!(
        code(&run(&["simulate", s(&f), "--exact", "--shots", "5"])),
        2
    );
    assert_eq!(code(&run(&["simplify", s(&f), "--passes", "nope"])), 2);
    assert_eq!(code(&run(&["cut", s(&f), "--out-dir", "x"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn cap_exceeded_exits_four() {
    let f = fixture("ghz_fanout");
    let out = Command::new(env!("CARGO_BIN_EXE_qboundary"))
        .args(["simulate", s(&f)])
        .env("QBOUNDARY_STATEVECTOR_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    assert_eq!(
        code(&run(&["--statevector-cap", "3", "simulate", s(&f)])),
        4
    );
}

#[test]
fn sampling_is_reproducible() {
    let f = fixture("ancilla_instrument");
    let a = run(&["simulate", s(&f), "--shots", "2000", "--seed", "9"]);
    let b = run(&["simulate", s(&f), "--shots", "2000", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let total: u64 = stdout(&a)
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 2000);
}

fn probabilities(text: &str) -> Vec<f64> {
    text.lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn cut_manifest_recombines_to_original() {
    let dir = tempfile::tempdir().unwrap();
    for (name, site) in [
        ("ancilla_gate_cut", vec!["--gate", "4"]),
        ("ancilla_wire_cut", vec!["--wire", "1", "--after-gate", "3"]),
    ] {
        let out_dir = dir.path().join(name);
        let (input, out_path) = (fixture(name), out_dir.clone());
        let mut args = vec![
            "cut",
            s(&input),
            "--out-dir",
            s(&out_path),
            "--passes",
            "si",
        ];
        args.extend(site.iter().copied());
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let manifest = out_dir.join("manifest.json");
        for x in ["0", "5"] {
            let recombined =
                probabilities(&stdout(&run(&["simulate", s(&manifest), "--input", x])));
            let direct = probabilities(&stdout(&run(&[
                "simulate",
                s(&fixture(name)),
                "--input",
                x,
            ])));
            assert_eq!(recombined.len(), direct.len());
            for (a, b) in recombined.iter().zip(&direct) {
                assert!((a - b).abs() <= 2e-12, "{name} input {x}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn info_lists_tables() {
    let out = run(&["info", s(&fixture("cx_hadamards"))]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("gates 3 (1 multi-qubit)"));
    assert!(text.contains("gate 1 CX [1,2]"));
    assert!(text.contains("10 -> 11"));
}
