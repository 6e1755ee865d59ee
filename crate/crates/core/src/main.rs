use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dispersive_lab::cli::{self, RunError};

#[derive(Parser)]
#[command(name = "dispersive-lab", version, about = "Propagator kernels and dispersive estimate scans")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifact tree.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        verbose: bool,
    },
    /// Print the angular spectrum of a scenario.
    Spectrum {
        config: PathBuf,
        /// Clusters to list.
        #[arg(long, default_value_t = 12)]
        clusters: usize,
    },
    /// List the named built-in potentials.
    ListBuiltins,
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Run {
            config,
            out,
            threads,
            verbose,
        } => {
            let level = if verbose { "info" } else { "warn" };
            env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
            match cli::run_file(&config, out.as_deref(), threads) {
                Ok(outcome) => {
                    print!("{}", std::fs::read_to_string(outcome.out_dir.join("summary.txt")).unwrap_or_default());
                    println!("artifacts in {}", outcome.out_dir.display());
                    ExitCode::from(outcome.exit_code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Spectrum { config, clusters } => {
            env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
            match cli::load_scenario(&config).and_then(|s| cli::scenario_spectrum(&s)) {
                Ok(spec) => {
                    print!("{}", cli::spectrum_text(&spec, clusters));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::ListBuiltins => {
            print!("{}", cli::builtins_text());
            ExitCode::SUCCESS
        }
    }
}
