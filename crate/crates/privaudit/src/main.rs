//! `privaudit`: audit membership leakage of DP synthetic-data generators.
//!
//! Thin argument-parsing shell; all behaviour lives in [`privaudit::cli`].
//! Exit codes: 0 success, 2 config error, 3 data error, 4 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use privaudit::cli::{cmd_attack, cmd_experiment, cmd_generate, cmd_profile, cmd_quality};
use privaudit::{Error, Result};

#[derive(Parser)]
#[command(name = "privaudit", version, about = "Privacy audit toolkit for DP synthetic data")]
struct Cli {
    /// Override the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Print progress to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonIo {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a generator and write synthetic data plus the fit summary.
    Generate(CommonIo),
    /// Build a shadow-modelled focal-point profile of a generator.
    Profile(CommonIo),
    /// Score membership of target records against released synthetic data.
    Attack(CommonIo),
    /// Run a resumable trial grid and write results/timings/summary CSVs.
    Experiment(CommonIo),
    /// Compare synthetic data against a reference distribution.
    Quality(CommonIo),
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Runtime(format!("thread pool: {e}")))?;
    }
    let verbose = cli.verbose;
    let done = |what: &str, out: &PathBuf| {
        if verbose {
            eprintln!("{what} -> {}", out.display());
        }
    };
    match &cli.command {
        Command::Generate(io) => {
            cmd_generate(&io.config, &io.out, cli.seed)?;
            done("generate", &io.out);
        }
        Command::Profile(io) => {
            cmd_profile(&io.config, &io.out, cli.seed)?;
            done("profile", &io.out);
        }
        Command::Attack(io) => {
            cmd_attack(&io.config, &io.out, cli.seed)?;
            done("attack", &io.out);
        }
        Command::Experiment(io) => {
            cmd_experiment(&io.config, &io.out, cli.seed)?;
            done("experiment", &io.out);
        }
        Command::Quality(io) => {
            let (_, distance) = cmd_quality(&io.config, &io.out)?;
            println!("{distance}");
            done("quality", &io.out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
