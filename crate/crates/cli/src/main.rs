//! `qboundary`: simplify, cut, simulate and verify hybrid quantum programs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qboundary::Caps;

#[derive(Parser, Debug)]
#[command(
    name = "qboundary",
    version,
    about = "Boundary simplification of quantum circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    caps: CapArgs,
    /// More log output on standard error (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

/// Width caps. Defaults come from the `QBOUNDARY_*_CAP` environment variables.
#[derive(Args, Debug)]
struct CapArgs {
    #[arg(long, global = true, value_name = "QUBITS")]
    statevector_cap: Option<usize>,
    #[arg(long, global = true, value_name = "QUBITS")]
    density_cap: Option<usize>,
    #[arg(long, global = true, value_name = "BITS")]
    stochastic_cap: Option<usize>,
    #[arg(long, global = true, value_name = "BITS")]
    table_cap: Option<usize>,
}

impl CapArgs {
    fn resolve(&self) -> Caps {
        let mut caps = Caps::from_env();
        if let Some(v) = self.statevector_cap {
            caps.statevector_width = v;
        }
        if let Some(v) = self.density_cap {
            caps.density_width = v;
        }
        if let Some(v) = self.stochastic_cap {
            caps.stochastic_width = v;
        }
        if let Some(v) = self.table_cap {
            caps.table_width = v;
        }
        caps
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Move boundary operations into classical stages and write the hybrid program.
    Simplify(SimplifyArgs),
    /// Cut a gate or a wire and write the term manifest plus one circuit per variant.
    Cut(CutArgs),
    /// Print the output distribution of a circuit, program or cut manifest.
    Simulate(SimulateArgs),
    /// Compare the output distributions of two programs.
    Verify(VerifyArgs),
    /// Print gate statistics and phase polynomial tables.
    Info(InfoArgs),
}

#[derive(Args, Debug)]
pub struct SimplifyArgs {
    pub input: PathBuf,
    /// Output program file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Comma-separated passes: trim, fold, si, factor or single variants such as si-measurement.
    #[arg(long, default_value = "trim,fold,si,factor")]
    pub passes: String,
    #[arg(long, default_value_t = 16)]
    pub max_rounds: usize,
    /// Report file; defaults to `<output>.report.json` when an output file is given.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("site").required(true).args(["gate", "wire"])))]
pub struct CutArgs {
    pub input: PathBuf,
    /// Two-qubit gate to cut horizontally (1-based gate number).
    #[arg(long, conflicts_with_all = ["wire", "after_gate"])]
    pub gate: Option<usize>,
    /// Qubit to cut vertically (1-based).
    #[arg(long, requires = "after_gate")]
    pub wire: Option<usize>,
    /// Cut the wire right after this gate (1-based gate number).
    #[arg(long)]
    pub after_gate: Option<usize>,
    /// Directory receiving `manifest.json` and the variant files.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Simplify each variant with these passes and write programs instead of circuits.
    #[arg(long)]
    pub passes: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub max_rounds: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub input: PathBuf,
    /// Basis input over the full register, decimal or `0b`-prefixed; bit k-1 is qubit k.
    #[arg(long = "input", default_value = "0", value_name = "INDEX")]
    pub basis: String,
    /// Exact distribution (the default).
    #[arg(long, conflicts_with = "shots")]
    pub exact: bool,
    /// Sample this many shots instead.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random pure states on the free qubits, in addition to every basis input.
    #[arg(long, default_value_t = 20)]
    pub random_states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    pub input: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::EXIT_USAGE
            } else {
                0
            });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .init();
    let caps = cli.caps.resolve();
    let result = match &cli.command {
        Command::Simplify(a) => commands::simplify(a, &caps),
        Command::Cut(a) => commands::cut(a, &caps),
        Command::Simulate(a) => commands::simulate(a, &caps),
        Command::Verify(a) => commands::verify(a, &caps),
        Command::Info(a) => commands::info(a, &caps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
