use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tplcnn::scenario::Kind;
use tplcnn::{run_scenario, CliError, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "tplcnn", version, about = "Tunneling phase logic lattice simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lock-order map of a single pumped element over a parameter grid.
    ElementSweep(Args),
    /// Lattice run emitting per-cycle phase maps and an event log.
    NetworkRun(Args),
    /// Standard CNN reference integration.
    CnnRun(Args),
    /// Period, edge, segmentation and centroid analysis of saved frames.
    Analyze(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML, schema = 1).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; overrides the scenario's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for stochastic tunneling; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(kind: Kind, args: Args) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    if scenario.kind != kind {
        return Err(CliError::config(format!(
            "scenario is {}, not {}",
            scenario.kind.name(),
            kind.name()
        )));
    }
    let base = args
        .scenario
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_default();
    let opts = RunOptions {
        out: args.out,
        seed: args.seed,
        threads: args.threads,
    };
    let summary = run_scenario(&scenario, &base, &opts)?;
    for (k, v) in &summary.rows {
        println!("{k}={v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::config(first).report());
            return ExitCode::from(1);
        }
    };
    let (kind, args) = match cli.command {
        Command::ElementSweep(a) => (Kind::ElementSweep, a),
        Command::NetworkRun(a) => (Kind::NetworkRun, a),
        Command::CnnRun(a) => (Kind::CnnRun, a),
        Command::Analyze(a) => (Kind::Analyze, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
