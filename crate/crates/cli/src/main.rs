use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use apxgrp_cli::commands::{self, CommandKind};
use apxgrp_cli::config::ExperimentConfig;
use apxgrp_cli::error::CliError;
use apxgrp_cli::report;

/// Experiment harness for approximate-subgroup measurements in SL_n(F_p).
#[derive(Parser)]
#[command(name = "apxgrp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth statistics |A|, |A^2|, |A^3| plus a greedy certificate.
    Growth(RunArgs),
    /// Greedy approximate-group certificate only.
    Certify(RunArgs),
    /// Involved tori, conjugation invariance, intersection exponents,
    /// regular proportion and deficient counts.
    Structure(RunArgs),
    /// Involved-torus census with the count exponent.
    Involved(RunArgs),
    /// Intersection exponent reports for torus, deficient part and
    /// conjugacy class.
    Lp(RunArgs),
    /// Cayley-graph diameter by BFS from the identity.
    Diam(RunArgs),
    /// Shortest nontrivial relation length.
    Girth(RunArgs),
    /// Normalized-adjacency spectral gap by power iteration.
    Gap(RunArgs),
    /// Per-prime diameter/girth/gap table for mod-p reductions of integer
    /// generators, with a diameter fit.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here; sweeps also write a sibling .csv.
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 means all available cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl Command {
    fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Growth(a) => (CommandKind::Growth, a),
            Command::Certify(a) => (CommandKind::Certify, a),
            Command::Structure(a) => (CommandKind::Structure, a),
            Command::Involved(a) => (CommandKind::Involved, a),
            Command::Lp(a) => (CommandKind::Lp, a),
            Command::Diam(a) => (CommandKind::Diam, a),
            Command::Girth(a) => (CommandKind::Girth, a),
            Command::Gap(a) => (CommandKind::Gap, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
        }
    }
}

fn execute(kind: CommandKind, args: &RunArgs) -> Result<(), CliError> {
    let config = ExperimentConfig::load(&args.config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    let run = pool.install(|| commands::run(kind, &config))?;
    report::emit(&run, args.out.as_deref())
}

fn error_object(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let outcome = std::panic::catch_unwind(|| execute(kind, &args));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            eprintln!("{}", error_object(err.kind(), &err.to_string()));
            ExitCode::from(err.exit_code() as u8)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            eprintln!("{}", error_object("internal", &msg));
            ExitCode::from(4)
        }
    }
}
