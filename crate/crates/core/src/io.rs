//! JSON interchange format for circuits and hybrid programs.
//!
//! Qubits and wires are numbered from 1 in files. Circuit grammar:
//!
//! ```text
//! circuit     = { "width": n, "preparations"?: [null | 0 | 1, ...],
//!                 "gates": [gate, ...], "measurements"?: [[qubit, wire], ...] }
//! gate        = { "kind": KIND, "operands": [qubit, ...], "params"?: [number, ...],
//!                 "matrix"?: matrix, "controls"?: k, "blocks"?: [matrix, ...],
//!                 "wires"?: [wire, ...], "branches"?: [[gate, ...], ...] }
//! matrix      = [[[re, im], ...], ...]          rows of complex entries
//! KIND        = X | Y | Z | H | S | T                       no params
//!             | RX | RY | RZ | PHASE                        params: [theta]
//!             | CX | CZ | SWAP | TOFFOLI                    no params
//!             | CR                                          params: [m], phase 2π/2^m
//!             | MATRIX | OPERATOR                           matrix
//!             | CONTROLLED_BLOCK                            controls, blocks
//!             | MEASURE                                     operands: [qubit], wires: [wire]
//!             | CLASSICALLY_CONTROLLED                      wires, branches (operands optional)
//! ```
//!
//! Hybrid programs wrap a circuit:
//!
//! ```text
//! program = { "circuit": circuit, "input_preparations"?: [...], "premap"?: stage | null,
//!             "post_stages"?: [stage, ...], "weight"?: number }
//! stage   = { "kind": "deterministic", "width": n, "table": [y, ...] }
//!         | { "kind": "stochastic", "width": n, "matrix": [[p, ...], ...] }
//! ```
//!
//! Matrices act on their operands little-endian: operand `i` is bit `i` of
//! the row and column index. Emission is canonical: sorted keys and every
//! float written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ir::basis::MAX_INDEX_BITS;
use crate::ir::{validate_circuit, Circuit, ClassicalStage, Gate, GateKind, HybridProgram};
use crate::math::{CMatrix, Complex64};

/// Largest `controls` accepted for a CONTROLLED_BLOCK.
const MAX_CONTROLS: usize = 20;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    width: usize,
    #[serde(default)]
    preparations: Option<Vec<Option<u8>>>,
    gates: Vec<RawGate>,
    #[serde(default)]
    measurements: Vec<[usize; 2]>,
}

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    kind: String,
    #[serde(default)]
    operands: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<RawMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    controls: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<RawMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wires: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branches: Option<Vec<Vec<RawGate>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    circuit: RawCircuit,
    #[serde(default)]
    input_preparations: Option<Vec<Option<u8>>>,
    #[serde(default)]
    premap: Option<RawStage>,
    #[serde(default)]
    post_stages: Vec<RawStage>,
    #[serde(default = "unit_weight")]
    weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawStage {
    Deterministic { width: usize, table: Vec<usize> },
    Stochastic { width: usize, matrix: Vec<Vec<f64>> },
}

fn perr(context: &str, message: impl Into<String>) -> Error {
    Error::parse(context, message)
}

fn syntax(e: serde_json::Error) -> Error {
    perr(
        &format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

fn one_based(v: usize, context: &str, what: &str, limit: usize) -> Result<usize> {
    if v == 0 {
        return Err(perr(context, format!("{what} numbers start at 1")));
    }
    if v > limit {
        return Err(perr(context, format!("{what} {v} exceeds {limit}")));
    }
    Ok(v - 1)
}

fn check_width(width: usize, context: &str) -> Result<()> {
    if width > MAX_INDEX_BITS {
        return Err(perr(
            context,
            format!("width {width} exceeds {MAX_INDEX_BITS}"),
        ));
    }
    Ok(())
}

fn preparations_from_raw(
    raw: Option<&Vec<Option<u8>>>,
    width: usize,
    context: &str,
) -> Result<Vec<Option<bool>>> {
    let Some(raw) = raw else {
        return Ok(vec![None; width]);
    };
    if raw.len() != width {
        return Err(perr(
            context,
            format!("{} entries for width {width}", raw.len()),
        ));
    }
    raw.iter()
        .enumerate()
        .map(|(i, p)| match p {
            None => Ok(None),
            Some(0) => Ok(Some(false)),
            Some(1) => Ok(Some(true)),
            Some(v) => Err(perr(
                &format!("{context}[{i}]"),
                format!("preparation {v} is not null, 0 or 1"),
            )),
        })
        .collect()
}

fn matrix_from_raw(raw: &RawMatrix, context: &str) -> Result<CMatrix> {
    let n = raw.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(perr(
            context,
            format!("{n} rows is not a positive power of two"),
        ));
    }
    for (r, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(perr(
                &format!("{context}[{r}]"),
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return Err(perr(&format!("{context}[{r}]"), "non-finite entry"));
        }
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        Complex64::new(raw[r][c][0], raw[r][c][1])
    }))
}

fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

fn single_param(raw: &RawGate, context: &str) -> Result<f64> {
    match raw.params.as_deref() {
        Some([v]) if v.is_finite() => Ok(*v),
        _ => Err(perr(
            &format!("{context}.params"),
            format!("{} takes exactly one finite parameter", raw.kind),
        )),
    }
}

fn no_extras(raw: &RawGate, context: &str, allowed: &[&str]) -> Result<()> {
    let present = [
        ("params", raw.params.as_ref().is_some_and(|p| !p.is_empty())),
        ("matrix", raw.matrix.is_some()),
        ("controls", raw.controls.is_some()),
        ("blocks", raw.blocks.is_some()),
        ("wires", raw.wires.is_some()),
        ("branches", raw.branches.is_some()),
    ];
    for (field, here) in present {
        if here && !allowed.contains(&field) {
            return Err(perr(
                &format!("{context}.{field}"),
                format!("not allowed on {}", raw.kind),
            ));
        }
    }
    Ok(())
}

fn gate_from_raw(raw: &RawGate, width: usize, context: &str, in_branch: bool) -> Result<Gate> {
    let operands = raw
        .operands
        .iter()
        .enumerate()
        .map(|(i, &q)| one_based(q, &format!("{context}.operands[{i}]"), "qubit", width))
        .collect::<Result<Vec<_>>>()?;
    let wires_of = |raw: &RawGate| -> Result<Vec<usize>> {
        raw.wires
            .as_deref()
            .unwrap_or_default()
            .iter()
            .enumerate()
            .map(|(i, &w)| one_based(w, &format!("{context}.wires[{i}]"), "wire", usize::MAX))
            .collect()
    };
    let simple = |kind: GateKind| -> Result<Gate> {
        no_extras(raw, context, &[])?;
        Ok(Gate::new(kind, operands.clone()))
    };
    let rotation = |f: fn(f64) -> GateKind| -> Result<Gate> {
        no_extras(raw, context, &["params"])?;
        Ok(Gate::new(f(single_param(raw, context)?), operands.clone()))
    };
    match raw.kind.as_str() {
        "X" => simple(GateKind::X),
        "Y" => simple(GateKind::Y),
        "Z" => simple(GateKind::Z),
        "H" => simple(GateKind::H),
        "S" => simple(GateKind::S),
        "T" => simple(GateKind::T),
        "CX" => simple(GateKind::Cx),
        "CZ" => simple(GateKind::Cz),
        "SWAP" => simple(GateKind::Swap),
        "TOFFOLI" => simple(GateKind::Toffoli),
        "RX" => rotation(GateKind::Rx),
        "RY" => rotation(GateKind::Ry),
        "RZ" => rotation(GateKind::Rz),
        "PHASE" => rotation(GateKind::Phase),
        "CR" => {
            no_extras(raw, context, &["params"])?;
            let m = single_param(raw, context)?;
            if m.fract() != 0.0 || !(0.0..=1024.0).contains(&m) {
                return Err(perr(
                    &format!("{context}.params"),
                    format!("CR order {m} must be an integer in 0..=1024"),
                ));
            }
            Ok(Gate::new(GateKind::Cr(m as u32), operands))
        }
        "MATRIX" | "OPERATOR" => {
            no_extras(raw, context, &["matrix"])?;
            let m = raw
                .matrix
                .as_ref()
                .ok_or_else(|| perr(context, format!("{} needs a matrix", raw.kind)))?;
            let m = matrix_from_raw(m, &format!("{context}.matrix"))?;
            Ok(if raw.kind == "MATRIX" {
                Gate::matrix(operands, m)
            } else {
                Gate::operator(operands, m)
            })
        }
        "CONTROLLED_BLOCK" => {
            no_extras(raw, context, &["controls", "blocks"])?;
            let controls = raw
                .controls
                .ok_or_else(|| perr(context, "CONTROLLED_BLOCK needs `controls`"))?;
            if controls > operands.len().min(MAX_CONTROLS) {
                return Err(perr(
                    &format!("{context}.controls"),
                    format!("{controls} controls for {} operands", operands.len()),
                ));
            }
            let blocks = raw
                .blocks
                .as_ref()
                .ok_or_else(|| perr(context, "CONTROLLED_BLOCK needs `blocks`"))?
                .iter()
                .enumerate()
                .map(|(i, b)| matrix_from_raw(b, &format!("{context}.blocks[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let (c, t) = operands.split_at(controls);
            Ok(Gate::controlled_block(c.to_vec(), t.to_vec(), blocks))
        }
        "MEASURE" => {
            no_extras(raw, context, &["wires"])?;
            let wires = wires_of(raw)?;
            if operands.len() != 1 || wires.len() != 1 {
                return Err(perr(context, "MEASURE takes one operand and one wire"));
            }
            Ok(Gate::measure(operands[0], wires[0]))
        }
        "CLASSICALLY_CONTROLLED" => {
            no_extras(raw, context, &["wires", "branches"])?;
            if in_branch {
                return Err(perr(context, "classically controlled gates cannot nest"));
            }
            let wires = wires_of(raw)?;
            if wires.len() > MAX_CONTROLS {
                return Err(perr(
                    &format!("{context}.wires"),
                    format!("{} controlling wires exceed {MAX_CONTROLS}", wires.len()),
                ));
            }
            let branches = raw
                .branches
                .as_ref()
                .ok_or_else(|| perr(context, "CLASSICALLY_CONTROLLED needs `branches`"))?
                .iter()
                .enumerate()
                .map(|(b, arm)| {
                    arm.iter()
                        .enumerate()
                        .map(|(k, g)| {
                            gate_from_raw(g, width, &format!("{context}.branches[{b}][{k}]"), true)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let gate = Gate::classically_controlled(wires, branches);
            if !raw.operands.is_empty() && gate.operands != operands {
                return Err(perr(
                    &format!("{context}.operands"),
                    "must be the sorted union of the branch operands when given",
                ));
            }
            Ok(gate)
        }
        other => Err(Error::UnknownGateKind {
            kind: other.to_string(),
            context: context.to_string(),
        }),
    }
}

fn gate_to_raw(g: &Gate) -> RawGate {
    let mut raw = RawGate {
        kind: g.name().to_string(),
        operands: g.operands.iter().map(|q| q + 1).collect(),
        params: None,
        matrix: None,
        controls: None,
        blocks: None,
        wires: None,
        branches: None,
    };
    match &g.kind {
        GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Phase(t) => {
            raw.params = Some(vec![*t])
        }
        GateKind::Cr(m) => raw.params = Some(vec![*m as f64]),
        GateKind::Matrix(m) | GateKind::Operator(m) => raw.matrix = Some(matrix_to_raw(m)),
        GateKind::ControlledBlock { controls, blocks } => {
            raw.controls = Some(*controls);
            raw.blocks = Some(blocks.iter().map(matrix_to_raw).collect());
        }
        GateKind::Measure => raw.wires = Some(g.wires.iter().map(|w| w + 1).collect()),
        GateKind::ClassicallyControlled(arms) => {
            raw.wires = Some(g.wires.iter().map(|w| w + 1).collect());
            raw.branches = Some(
                arms.iter()
                    .map(|arm| arm.iter().map(gate_to_raw).collect())
                    .collect(),
            );
        }
        _ => {}
    }
    raw
}

fn circuit_from_raw(raw: &RawCircuit, context: &str) -> Result<Circuit> {
    check_width(raw.width, &format!("{context}.width"))?;
    let preparations = preparations_from_raw(
        raw.preparations.as_ref(),
        raw.width,
        &format!("{context}.preparations"),
    )?;
    let gates = raw
        .gates
        .iter()
        .enumerate()
        .map(|(i, g)| gate_from_raw(g, raw.width, &format!("{context}.gates[{i}]"), false))
        .collect::<Result<Vec<_>>>()?;
    let measurements = raw
        .measurements
        .iter()
        .enumerate()
        .map(|(i, [q, w])| {
            let ctx = format!("{context}.measurements[{i}]");
            Ok((
                one_based(*q, &ctx, "qubit", raw.width)?,
                one_based(*w, &ctx, "wire", usize::MAX)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let circuit = Circuit {
        width: raw.width,
        preparations,
        gates,
        measurements,
    };
    let violations = validate_circuit(&circuit);
    if !violations.is_empty() {
        return Err(Error::InvalidCircuit(violations));
    }
    Ok(circuit)
}

fn preparations_to_raw(p: &[Option<bool>]) -> Vec<Option<u8>> {
    p.iter().map(|v| v.map(u8::from)).collect()
}

fn circuit_to_raw(c: &Circuit) -> RawCircuit {
    RawCircuit {
        width: c.width,
        preparations: Some(preparations_to_raw(&c.preparations)),
        gates: c.gates.iter().map(gate_to_raw).collect(),
        measurements: c
            .measurements
            .iter()
            .map(|&(q, w)| [q + 1, w + 1])
            .collect(),
    }
}

fn stage_from_raw(raw: &RawStage, context: &str) -> Result<ClassicalStage> {
    let wrap = |e: Error| perr(context, e.to_string());
    match raw {
        RawStage::Deterministic { width, table } => {
            check_width(*width, context)?;
            ClassicalStage::deterministic(*width, table.clone()).map_err(wrap)
        }
        RawStage::Stochastic { width, matrix } => {
            check_width(*width, context)?;
            let dim = 1usize << width;
            if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                return Err(perr(
                    context,
                    format!("stochastic matrix must be {dim}x{dim}"),
                ));
            }
            ClassicalStage::stochastic(*width, matrix.concat()).map_err(wrap)
        }
    }
}

fn stage_to_raw(s: &ClassicalStage) -> RawStage {
    match s {
        ClassicalStage::Deterministic { width, table } => RawStage::Deterministic {
            width: *width,
            table: table.clone(),
        },
        ClassicalStage::Stochastic { width, matrix } => RawStage::Stochastic {
            width: *width,
            matrix: matrix.chunks(s.dim()).map(<[f64]>::to_vec).collect(),
        },
    }
}

/// Parse and validate a circuit file's contents.
pub fn parse_circuit_str(text: &str) -> Result<Circuit> {
    let raw: RawCircuit = serde_json::from_str(text).map_err(syntax)?;
    circuit_from_raw(&raw, "circuit")
}

pub fn parse_circuit_file(path: impl AsRef<Path>) -> Result<Circuit> {
    parse_circuit_str(&std::fs::read_to_string(path)?)
}

/// Parse a hybrid program. A bare circuit file is accepted as the program
/// with no classical stages.
pub fn parse_program_str(text: &str) -> Result<HybridProgram> {
    let value: Value = serde_json::from_str(text).map_err(syntax)?;
    if value.get("circuit").is_none() {
        let raw: RawCircuit =
            serde_json::from_value(value).map_err(|e| perr("circuit", e.to_string()))?;
        return Ok(HybridProgram::from_circuit(circuit_from_raw(
            &raw, "circuit",
        )?));
    }
    let raw: RawProgram =
        serde_json::from_value(value).map_err(|e| perr("program", e.to_string()))?;
    let circuit = circuit_from_raw(&raw.circuit, "circuit")?;
    let input_preparations = match &raw.input_preparations {
        Some(p) => preparations_from_raw(Some(p), circuit.width, "input_preparations")?,
        None => circuit.preparations.clone(),
    };
    let program = HybridProgram {
        input_preparations,
        input_premap: raw
            .premap
            .as_ref()
            .map(|s| stage_from_raw(s, "premap"))
            .transpose()?,
        post_stages: raw
            .post_stages
            .iter()
            .enumerate()
            .map(|(i, s)| stage_from_raw(s, &format!("post_stages[{i}]")))
            .collect::<Result<_>>()?,
        weight: raw.weight,
        circuit,
    };
    program.validate().map_err(|e| match e {
        Error::InvalidCircuit(_) => e,
        other => perr("program", other.to_string()),
    })?;
    Ok(program)
}

pub fn parse_program_file(path: impl AsRef<Path>) -> Result<HybridProgram> {
    parse_program_str(&std::fs::read_to_string(path)?)
}

pub fn circuit_to_value(c: &Circuit) -> Value {
    serde_json::to_value(circuit_to_raw(c)).expect("circuit serializes")
}

pub fn program_to_value(p: &HybridProgram) -> Value {
    let raw = RawProgram {
        circuit: circuit_to_raw(&p.circuit),
        input_preparations: Some(preparations_to_raw(&p.input_preparations)),
        premap: p.input_premap.as_ref().map(stage_to_raw),
        post_stages: p.post_stages.iter().map(stage_to_raw).collect(),
        weight: p.weight,
    };
    serde_json::to_value(raw).expect("program serializes")
}

pub fn emit_circuit_string(c: &Circuit) -> String {
    canonical_json(&circuit_to_value(c))
}

pub fn hybrid_program_to_string(p: &HybridProgram) -> String {
    canonical_json(&program_to_value(p))
}

pub fn emit_circuit(c: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, emit_circuit_string(c))?;
    Ok(())
}

pub fn emit_hybrid_program(p: &HybridProgram, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, hybrid_program_to_string(p))?;
    Ok(())
}

/// Canonical text: sorted object keys, two-space indentation, arrays of
/// scalars on one line, floats as `{:.16e}` and integers verbatim.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_scalar(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().expect("JSON number is finite");
                write!(out, "{f:.16e}").unwrap();
            }
        }
        other => out.push_str(&other.to_string()),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) || items.iter().all(is_pair) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
        scalar => write_scalar(out, scalar),
    }
}

/// `[re, im]`-style short scalar arrays stay inline.
fn is_pair(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(is_scalar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    #[test]
    fn minimal_file() {
        let c = parse_circuit_str(
            r#"{"width":1,"gates":[{"kind":"H","operands":[1]}],"measurements":[[1,1]]}"#,
        )
        .unwrap();
        assert_eq!(c.width, 1);
        assert_eq!(c.gates, vec![Gate::h(0)]);
        assert_eq!(c.measurements, vec![(0, 0)]);
    }

    #[test]
    fn unknown_kind_names_gate() {
        let e = parse_circuit_str(
            r#"{"width":1,"gates":[{"kind":"H","operands":[1]},{"kind":"FOO","operands":[1]}]}"#,
        )
        .unwrap_err();
        match e {
            Error::UnknownGateKind { kind, context } => {
                assert_eq!(kind, "FOO");
                assert_eq!(context, "circuit.gates[1]");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_circuit_str("{\"width\": 1,\n \"gates\": [}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn zero_based_operand_rejected() {
        let e =
            parse_circuit_str(r#"{"width":1,"gates":[{"kind":"X","operands":[0]}]}"#).unwrap_err();
        assert!(e.to_string().contains("gates[0].operands[0]"), "{e}");
    }

    #[test]
    fn validation_failure_reported() {
        let e = parse_circuit_str(r#"{"width":2,"gates":[{"kind":"CX","operands":[1,1]}]}"#)
            .unwrap_err();
        assert!(matches!(e, Error::InvalidCircuit(_)));
    }

    #[test]
    fn stray_params_rejected() {
        assert!(parse_circuit_str(
            r#"{"width":1,"gates":[{"kind":"H","operands":[1],"params":[1.0]}]}"#
        )
        .is_err());
    }

    fn sample_program() -> HybridProgram {
        let circuit = Circuit::new(2)
            .prepare(1, false)
            .with_gates([
                Gate::rz(0, 0.1),
                Gate::matrix(vec![1], math::hadamard()),
                Gate::controlled_block(vec![0], vec![1], vec![math::identity(2), math::pauli(1)]),
                Gate::measure(0, 3),
                Gate::classically_controlled(
                    vec![3],
                    vec![vec![], vec![Gate::x(1), Gate::cr(0, 1, 3)]],
                ),
            ])
            .measure(1, 0);
        let mut p = HybridProgram::from_circuit(circuit);
        p.input_premap = Some(ClassicalStage::from_fn(2, |x| x ^ 1).unwrap());
        p.post_stages
            .push(ClassicalStage::stochastic(1, vec![0.75, 1.0 / 3.0, 0.25, 2.0 / 3.0]).unwrap());
        p
    }

    #[test]
    fn program_round_trip_is_byte_identical() {
        let p = sample_program();
        let first = hybrid_program_to_string(&p);
        let parsed = parse_program_str(&first).unwrap();
        assert_eq!(parsed, p);
        assert_eq!(hybrid_program_to_string(&parsed), first);
    }

    #[test]
    fn identity_program_has_empty_stages() {
        let p = HybridProgram::from_circuit(Circuit::new(1).measure_all());
        let text = hybrid_program_to_string(&p);
        assert!(text.contains("\"post_stages\": []"), "{text}");
        assert!(text.contains("\"premap\": null"), "{text}");
    }

    #[test]
    fn floats_have_17_digits() {
        let text = emit_circuit_string(&Circuit::new(1).with_gates([Gate::rx(0, 0.1)]));
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
    }

    #[test]
    fn bare_circuit_accepted_as_program() {
        let p = parse_program_str(r#"{"width":1,"gates":[],"measurements":[[1,1]]}"#).unwrap();
        assert!(p.post_stages.is_empty() && p.input_premap.is_none());
    }
}
