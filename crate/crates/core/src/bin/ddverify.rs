use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ddverify::report::{emit, Format};
use ddverify::runner::{run, RunConfig, RunError, ALL};
use ddverify::sampling::with_threads;

#[derive(Parser)]
#[command(name = "ddverify", version, about = "Verify Dixmier-Douady cocycle identities on concrete models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks and emit their reports.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Check name or `all`.
    #[arg(long, default_value = ALL)]
    check: String,
    /// Model name or `all`.
    #[arg(long, default_value = ALL)]
    model: String,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// json, csv or text.
    #[arg(long, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn execute(args: RunArgs) -> Result<bool, RunError> {
    let cfg = RunConfig {
        samples: args.samples,
        tol: args.tol,
        seed: args.seed,
    };
    let reports = if args.threads == 0 {
        run(&args.check, &args.model, cfg)?
    } else {
        with_threads(args.threads, || run(&args.check, &args.model, cfg))?
    };
    emit(&reports, args.format, args.out.as_deref())?;
    Ok(reports.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ddverify: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
