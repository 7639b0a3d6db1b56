use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nsdamp::harness;

#[derive(Parser)]
#[command(
    name = "nsdamp",
    version,
    about = "Damped anisotropic Navier-Stokes solver and inequality harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and check its ledger.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a property or oracle suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every point of a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
        #[arg(long, env = "NSDAMP_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Continue a run from a checkpoint.
    Resume {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                harness::EXIT_USAGE as u8
            } else {
                0
            });
        }
    };
    let code = match cli.command {
        Command::Run { config, out, seed } => harness::cmd_run(&config, &out, seed),
        Command::Verify { suite, seed } => harness::cmd_verify(&suite, seed),
        Command::Sweep {
            config,
            out,
            workers,
            seed,
        } => harness::cmd_sweep(&config, &out, workers, seed),
        Command::Resume {
            checkpoint,
            config,
            out,
            seed,
        } => harness::cmd_resume(&checkpoint, &config, &out, seed),
    };
    ExitCode::from(code as u8)
}
