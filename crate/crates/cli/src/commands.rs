use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qboundary::cutting::{apply_cut, recombine_distributions, CutLocation};
use qboundary::io::{
    canonical_json, emit_circuit, emit_hybrid_program, hybrid_program_to_string,
    parse_program_file, parse_program_str,
};
use qboundary::ir::{BasisState, Circuit, ClassicalStage, HybridProgram};
use qboundary::passes::{simplify_pipeline, PassList, RewriteReport};
use qboundary::phase_poly::{gate_phase_poly, segment_to_phase_poly, PhasePolyRep};
use qboundary::sim::{default_inputs, equivalence_check, run_hybrid_exact, sample_hybrid, Input};
use qboundary::{Caps, Error};
use serde_json::{json, Value};

use crate::{CutArgs, InfoArgs, SimplifyArgs, SimulateArgs, VerifyArgs};

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_CAP: u8 = 4;

/// Error message with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::ZeroShots => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_circuit_only(path: &Path) -> Result<Circuit, Failure> {
    let program = parse_program_file(path).map_err(with_path(path))?;
    let plain = program.input_premap.is_none()
        && program.post_stages.is_empty()
        && program.weight == 1.0
        && program.input_preparations == program.circuit.preparations;
    if !plain {
        return Err(Failure::input(format!(
            "{}: expected a circuit, found a program with classical stages",
            path.display()
        )));
    }
    Ok(program.circuit)
}

fn pass_list(spec: &str) -> Result<PassList, Failure> {
    spec.parse::<PassList>()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn summary(program: &HybridProgram, before: &Circuit) -> String {
    format!(
        "{} -> {} gates ({} -> {} multi-qubit), premap: {}, {} post stages, weight {}",
        before.gate_count(),
        program.circuit.gate_count(),
        before.multi_qubit_gate_count(),
        program.circuit.multi_qubit_gate_count(),
        if program.input_premap.is_some() {
            "yes"
        } else {
            "no"
        },
        program.post_stages.len(),
        program.weight
    )
}

fn report_value(
    input: &Path,
    passes: &PassList,
    max_rounds: usize,
    before: &Circuit,
    program: &HybridProgram,
    reports: &[RewriteReport],
) -> Value {
    json!({
        "input": input.display().to_string(),
        "passes": passes.to_string(),
        "max_rounds": max_rounds,
        "gate_count_before": before.gate_count(),
        "gate_count_after": program.circuit.gate_count(),
        "multi_qubit_before": before.multi_qubit_gate_count(),
        "multi_qubit_after": program.circuit.multi_qubit_gate_count(),
        "post_stages": program.post_stages.len(),
        "premap": program.input_premap.is_some(),
        "weight": program.weight,
        "reports": serde_json::to_value(reports).expect("reports serialize"),
    })
}

pub fn simplify(args: &SimplifyArgs, caps: &Caps) -> Result<(), Failure> {
    let circuit = load_circuit_only(&args.input)?;
    let passes = pass_list(&args.passes)?;
    let (program, reports) = simplify_pipeline(&circuit, &passes.0, args.max_rounds, caps)?;
    let report = canonical_json(&report_value(
        &args.input,
        &passes,
        args.max_rounds,
        &circuit,
        &program,
        &reports,
    ));
    match &args.output {
        Some(out) => {
            emit_hybrid_program(&program, out).map_err(with_path(out))?;
            let report_path = args.report.clone().unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".report.json");
                PathBuf::from(p)
            });
            write_file(&report_path, &report)?;
        }
        None => {
            print!("{}", hybrid_program_to_string(&program));
            if let Some(path) = &args.report {
                write_file(path, &report)?;
            }
        }
    }
    eprintln!("simplify: {}", summary(&program, &circuit));
    Ok(())
}

pub fn cut(args: &CutArgs, caps: &Caps) -> Result<(), Failure> {
    let circuit = load_circuit_only(&args.input)?;
    let one_based = |v: usize, what: &str| {
        v.checked_sub(1)
            .ok_or_else(|| Failure::usage(format!("{what} numbers start at 1")))
    };
    let location = match (args.gate, args.wire, args.after_gate) {
        (Some(g), None, None) => CutLocation::Gate(one_based(g, "gate")?),
        (None, Some(q), Some(g)) => CutLocation::Wire {
            qubit: one_based(q, "qubit")?,
            after_gate: one_based(g, "gate")?,
        },
        _ => return Err(Failure::usage("give --gate, or --wire with --after-gate")),
    };
    let passes = args.passes.as_deref().map(pass_list).transpose()?;
    let result = apply_cut(&circuit, location)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::input(format!("{}: {e}", args.out_dir.display())))?;
    let name = |i: usize| format!("variant_{:02}.json", i + 1);
    for (i, v) in result.variants.iter().enumerate() {
        let path = args.out_dir.join(name(i));
        match &passes {
            Some(passes) => {
                let (program, _) = simplify_pipeline(&v.circuit, &passes.0, args.max_rounds, caps)?;
                log::info!("variant {}: {}", i + 1, summary(&program, &v.circuit));
                emit_hybrid_program(&program, &path).map_err(with_path(&path))?;
            }
            None => emit_circuit(&v.circuit, &path).map_err(with_path(&path))?,
        }
    }
    let manifest = result.manifest(|i, _| name(i));
    let value = serde_json::to_value(&manifest).expect("manifest serializes");
    write_file(&args.out_dir.join("manifest.json"), &canonical_json(&value))?;
    eprintln!(
        "cut: {} cut, {} terms, {} variants, sampling overhead {}",
        value["kind"].as_str().unwrap_or("unknown"),
        result.terms.len(),
        result.variants.len(),
        result.overhead
    );
    Ok(())
}

fn parse_index(text: &str) -> Result<usize, Failure> {
    let parsed = match text.strip_prefix("0b") {
        Some(bits) => usize::from_str_radix(bits, 2),
        None => text.parse(),
    };
    parsed.map_err(|_| Failure::usage(format!("--input expects a basis index, got `{text}`")))
}

fn basis(width: usize, index: usize) -> Result<BasisState, Failure> {
    BasisState::new(width, index).map_err(|e| Failure::usage(format!("--input: {e}")))
}

fn bits(index: usize, width: usize) -> String {
    format!("{index:0w$b}", w = width.max(1))
}

/// Fixed-point text with 12 digits; roundoff below the last digit prints as zero.
fn fixed(p: f64) -> String {
    let p = if p.abs() < 5e-13 { 0.0 } else { p };
    format!("{p:.12}")
}

/// Recombined distribution of a cut manifest written by `cut`.
fn manifest_distribution(
    path: &Path,
    manifest: &Value,
    x: usize,
    caps: &Caps,
) -> Result<Vec<f64>, Failure> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let variants = manifest["variants"].as_array().ok_or_else(|| {
        Failure::input(format!("{}: manifest has no variant list", path.display()))
    })?;
    let mut coeffs = Vec::with_capacity(variants.len());
    let mut dists = Vec::with_capacity(variants.len());
    for v in variants {
        let (Some(coeff), Some(file)) = (v["coeff"].as_f64(), v["file"].as_str()) else {
            return Err(Failure::input(format!(
                "{}: malformed variant entry {v}",
                path.display()
            )));
        };
        let vpath = dir.join(file);
        let program = parse_program_file(&vpath).map_err(with_path(&vpath))?;
        dists.push(run_hybrid_exact(
            &program,
            &basis(program.width(), x)?,
            caps,
        )?);
        coeffs.push(coeff);
    }
    Ok(recombine_distributions(&coeffs, &dists)?)
}

pub fn simulate(args: &SimulateArgs, caps: &Caps) -> Result<(), Failure> {
    let x = parse_index(&args.basis)?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::input(format!("{}: {e}", args.input.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", args.input.display())))?;
    if value.get("variants").is_some() && value.get("terms").is_some() {
        if args.shots.is_some() {
            return Err(Failure::usage(
                "a cut manifest is evaluated exactly; drop --shots",
            ));
        }
        let dist = manifest_distribution(&args.input, &value, x, caps)?;
        let width = dist.len().trailing_zeros() as usize;
        for (y, p) in dist.iter().enumerate() {
            println!("{} {}", bits(y, width), fixed(*p));
        }
        return Ok(());
    }
    let program = parse_program_str(&text).map_err(with_path(&args.input))?;
    let input = basis(program.width(), x)?;
    let width = program.num_outputs();
    match args.shots {
        None => {
            for (y, p) in run_hybrid_exact(&program, &input, caps)?.iter().enumerate() {
                println!("{} {}", bits(y, width), fixed(*p));
            }
        }
        Some(shots) => {
            let counts = sample_hybrid(&program, &Input::Basis(input), shots, args.seed, caps)?;
            for (y, &n) in counts.iter().enumerate() {
                println!(
                    "{} {} {}",
                    bits(y, width),
                    n,
                    fixed(n as f64 / shots as f64)
                );
            }
        }
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs, caps: &Caps) -> Result<(), Failure> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Failure::usage("--tol must be a positive number"));
    }
    let a = parse_program_file(&args.a).map_err(with_path(&args.a))?;
    let b = parse_program_file(&args.b).map_err(with_path(&args.b))?;
    // a premap reads basis inputs only
    let states = if a.input_premap.is_none() && b.input_premap.is_none() {
        args.random_states
    } else {
        0
    };
    let inputs = default_inputs(&a, states, args.seed);
    let report = match equivalence_check(&a, &b, &inputs, args.tol, caps) {
        Ok(r) => r,
        Err(Error::Incomparable(why)) => {
            println!("FAIL programs are not comparable: {why}");
            return Err(Failure {
                code: EXIT_VERIFY,
                message: "verification failed".into(),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    println!(
        "{verdict} max deviation {:.3e} over {} inputs (tolerance {:e}), worst input: {}",
        report.max_deviation,
        report.inputs_checked,
        report.tolerance,
        report.worst_input.as_deref().unwrap_or("none")
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "verification failed".into(),
        })
    }
}

/// Rows `x -> f(x)  p(x)/π` with bits listed in operand order.
fn table_rows(rep: &PhasePolyRep, out: &mut String) {
    let w = rep.width();
    let order = |v: usize| {
        (0..w)
            .map(|k| if (v >> k) & 1 == 1 { '1' } else { '0' })
            .collect::<String>()
    };
    for x in 0..1usize << w {
        let _ = writeln!(
            out,
            "    {} -> {}  {:+.6}π",
            order(x),
            order(rep.perm()[x]),
            rep.phase()[x] / std::f64::consts::PI
        );
    }
}

fn describe_stage(s: &ClassicalStage) -> String {
    match s {
        ClassicalStage::Deterministic { width, .. } => format!("deterministic on {width} bits"),
        ClassicalStage::Stochastic { width, .. } => format!("stochastic on {width} bits"),
    }
}

/// Largest table printed per gate or circuit.
const INFO_TABLE_WIDTH: usize = 6;

pub fn info(args: &InfoArgs, caps: &Caps) -> Result<(), Failure> {
    let program = parse_program_file(&args.input).map_err(with_path(&args.input))?;
    let c = &program.circuit;
    let mut out = String::new();
    let one = |v: &[usize]| {
        v.iter()
            .map(|q| (q + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = writeln!(out, "width {}", c.width);
    let preps: Vec<String> = c
        .preparations
        .iter()
        .enumerate()
        .filter_map(|(q, p)| p.map(|b| format!("q{}={}", q + 1, b as u8)))
        .collect();
    let _ = writeln!(
        out,
        "prepared {}",
        if preps.is_empty() {
            "none".into()
        } else {
            preps.join(" ")
        }
    );
    let meas: Vec<String> = c
        .output_layout()
        .iter()
        .map(|(q, w)| format!("q{}->w{}", q + 1, w + 1))
        .collect();
    let _ = writeln!(out, "measured {}", meas.join(" "));
    let _ = writeln!(
        out,
        "gates {} ({} multi-qubit)",
        c.gate_count(),
        c.multi_qubit_gate_count()
    );
    let mut histogram: BTreeMap<&str, usize> = BTreeMap::new();
    for g in &c.gates {
        *histogram.entry(g.name()).or_default() += 1;
    }
    for (kind, n) in &histogram {
        let _ = writeln!(out, "  {kind} {n}");
    }
    if let Some(pre) = &program.input_premap {
        let _ = writeln!(out, "premap {}", describe_stage(pre));
    }
    for (i, s) in program.post_stages.iter().enumerate() {
        let _ = writeln!(out, "post stage {} {}", i + 1, describe_stage(s));
    }
    if program.weight != 1.0 {
        let _ = writeln!(out, "weight {}", program.weight);
    }

    let reps: Vec<Option<PhasePolyRep>> = c.gates.iter().map(gate_phase_poly).collect();
    let incoherent_suffix = reps.iter().rev().take_while(|r| r.is_some()).count();
    let incoherent_prefix = reps.iter().take_while(|r| r.is_some()).count();
    let _ = writeln!(
        out,
        "incoherent prefix {incoherent_prefix} gates, suffix {incoherent_suffix} gates"
    );
    let _ = writeln!(
        out,
        "phase polynomial tables (x -> f(x)  p(x), bits in operand order)"
    );
    for (i, (g, rep)) in c.gates.iter().zip(&reps).enumerate() {
        let Some(rep) = rep else { continue };
        let _ = writeln!(out, "  gate {} {} [{}]", i + 1, g.name(), one(&g.operands));
        if rep.width() <= INFO_TABLE_WIDTH {
            table_rows(rep, &mut out);
        }
    }
    if c.width <= INFO_TABLE_WIDTH && incoherent_prefix == c.gates.len() && !c.gates.is_empty() {
        let support: Vec<usize> = (0..c.width).collect();
        if let Some(rep) = segment_to_phase_poly(&c.gates, &support, caps)? {
            let _ = writeln!(out, "  whole circuit [{}]", one(&support));
            table_rows(&rep, &mut out);
        }
    }
    print!("{out}");
    Ok(())
}
