//! Shared helpers for the integration tests: fixtures, a random circuit
//! family and an independent dense-matrix oracle.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64;
use qboundary::io::parse_circuit_file;
use qboundary::ir::{Circuit, Gate, GateKind};
use qboundary::math::CMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Circuit {
    parse_circuit_file(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// Full `2^n × 2^n` matrix of `local` acting on `operands`, built entry by entry.
pub fn embed(local: &CMatrix, operands: &[usize], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mask: usize = operands.iter().map(|q| 1usize << q).sum();
    let local_index = |x: usize| {
        operands
            .iter()
            .enumerate()
            .map(|(i, &q)| ((x >> q) & 1) << i)
            .sum::<usize>()
    };
    CMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask != c & !mask {
            Complex64::new(0.0, 0.0)
        } else {
            local[(local_index(r), local_index(c))]
        }
    })
}

struct Branch {
    state: Vec<Complex64>,
    wires: HashMap<usize, bool>,
}

fn apply(state: &[Complex64], m: &CMatrix) -> Vec<Complex64> {
    (0..state.len())
        .map(|r| (0..state.len()).map(|c| m[(r, c)] * state[c]).sum())
        .collect()
}

fn run_gate(b: Branch, g: &Gate, n: usize) -> Vec<Branch> {
    match &g.kind {
        GateKind::Measure => {
            let q = g.operands[0];
            [false, true]
                .into_iter()
                .map(|v| {
                    let state = b
                        .state
                        .iter()
                        .enumerate()
                        .map(|(i, a)| {
                            if ((i >> q) & 1 == 1) == v {
                                *a
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect();
                    let mut wires = b.wires.clone();
                    wires.insert(g.wires[0], v);
                    Branch { state, wires }
                })
                .collect()
        }
        GateKind::ClassicallyControlled(branches) => {
            let key = g
                .wires
                .iter()
                .enumerate()
                .map(|(i, w)| (b.wires[w] as usize) << i)
                .sum::<usize>();
            let mut out = vec![b];
            for inner in &branches[key] {
                out = out
                    .into_iter()
                    .flat_map(|br| run_gate(br, inner, n))
                    .collect();
            }
            out
        }
        _ => {
            let m = embed(&g.local_matrix().expect("quantum gate"), &g.operands, n);
            vec![Branch {
                state: apply(&b.state, &m),
                wires: b.wires,
            }]
        }
    }
}

/// Outcome distribution of `circuit` started from the full-register state `psi`.
pub fn oracle_distribution_from(circuit: &Circuit, psi: Vec<Complex64>) -> Vec<f64> {
    let n = circuit.width;
    let mut branches = vec![Branch {
        state: psi,
        wires: HashMap::new(),
    }];
    for g in &circuit.gates {
        branches = branches
            .into_iter()
            .flat_map(|b| run_gate(b, g, n))
            .collect();
    }
    let mut layout = circuit.measurements.clone();
    layout.sort_by_key(|&(_, w)| w);
    let mut dist = vec![0.0; 1 << layout.len()];
    for b in branches {
        for (i, a) in b.state.iter().enumerate() {
            let y: usize = layout
                .iter()
                .enumerate()
                .map(|(k, &(q, _))| ((i >> q) & 1) << k)
                .sum();
            dist[y] += a.norm_sqr();
        }
    }
    dist
}

/// Start index after applying the circuit's fixed preparations to `x`.
pub fn prepared_index(circuit: &Circuit, x: usize) -> usize {
    circuit
        .preparations
        .iter()
        .enumerate()
        .fold(x, |acc, (q, p)| match p {
            Some(true) => acc | 1 << q,
            Some(false) => acc & !(1 << q),
            None => acc,
        })
}

pub fn oracle_distribution(circuit: &Circuit, x: usize) -> Vec<f64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << circuit.width];
    psi[prepared_index(circuit, x)] = Complex64::new(1.0, 0.0);
    oracle_distribution_from(circuit, psi)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "distribution lengths differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// One gate from `{X, Y, Z, S, T, RZ, CX, CZ, CR, SWAP, TOFFOLI, H, RX}` on
/// distinct random qubits.
pub fn random_gate(n: usize, rng: &mut impl Rng) -> Gate {
    let mut qubits: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        qubits.swap(i, rng.gen_range(0..=i));
    }
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let choice = loop {
        let c = rng.gen_range(0..13);
        let arity = match c {
            6..=9 => 2,
            10 => 3,
            _ => 1,
        };
        if arity <= n {
            break c;
        }
    };
    let (a, b, c) = (
        qubits[0],
        qubits.get(1).copied().unwrap_or(0),
        qubits.get(2).copied().unwrap_or(0),
    );
    match choice {
        0 => Gate::x(a),
        1 => Gate::y(a),
        2 => Gate::z(a),
        3 => Gate::s(a),
        4 => Gate::t(a),
        5 => Gate::rz(a, angle),
        6 => Gate::cx(a, b),
        7 => Gate::cz(a, b),
        8 => Gate::cr(a, b, rng.gen_range(1..5)),
        9 => Gate::swap(a, b),
        10 => Gate::toffoli(a, b, c),
        11 => Gate::h(a),
        _ => Gate::rx(a, angle),
    }
}

/// Seeded member of the random test family: `1 ≤ n ≤ 6` qubits, up to 30
/// gates, random basis preparations and a random nonempty set of measured qubits.
pub fn random_circuit(seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let depth = rng.gen_range(0..=30);
    let preparations = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => None,
            1 => Some(false),
            _ => Some(rng.gen_bool(0.5)),
        })
        .collect();
    let mut c = Circuit::new(n).with_preparations(preparations);
    for _ in 0..depth {
        c.push(random_gate(n, &mut rng));
    }
    let mut wire = 0;
    for q in 0..n {
        if q == 0 || rng.gen_bool(0.8) {
            c = c.measure(q, wire);
            wire += 1;
        }
    }
    c
}
