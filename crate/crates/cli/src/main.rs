use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdpf_cli::{exit_code_for, run, Experiment, Options, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "tdpf", version, about = "Product-formula error experiments against an exact propagator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error vs t and fitted order for each (family, p).
    OrderScan(RunArgs),
    /// Measured error against the tight and corollary bounds; VIOLATION rows exit 1.
    BoundCheck(RunArgs),
    /// First-order error against the double-integral commutator bound.
    HuyghebaertCheck(RunArgs),
    /// Floquet reconstruction identities over a sweep of ancilla truncations.
    FloquetCheck(RunArgs),
    /// Multi-product formula errors, coefficients and bounds.
    MpfScan(RunArgs),
    /// Trotter steps and gate/query counts over a system-size sweep.
    ResourceTable(RunArgs),
    /// Non-unitary PF error against the amplified bound.
    NonunitaryCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long)]
    oracle_tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, args) = match cli.command {
        Command::OrderScan(a) => (Experiment::OrderScan, a),
        Command::BoundCheck(a) => (Experiment::BoundCheck, a),
        Command::HuyghebaertCheck(a) => (Experiment::HuyghebaertCheck, a),
        Command::FloquetCheck(a) => (Experiment::FloquetCheck, a),
        Command::MpfScan(a) => (Experiment::MpfScan, a),
        Command::ResourceTable(a) => (Experiment::ResourceTable, a),
        Command::NonunitaryCheck(a) => (Experiment::NonunitaryCheck, a),
    };
    let opts = Options { config: args.config, out: args.out, workers: args.workers, oracle_tol: args.oracle_tol };
    let code = match run(exp, &opts) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.violations > 0 {
                eprintln!("{}: {} VIOLATION row(s)", exp.name(), outcome.violations);
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("{}: {e}", exp.name());
            exit_code_for(&e)
        }
    };
    ExitCode::from(code as u8)
}
