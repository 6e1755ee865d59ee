//! Runs a scenario file the way the `dispersive-lab run` command does.
//!
//! Usage: `cargo run --example run_scenario [scenario.json] [out_dir]`

use std::path::PathBuf;

use dispersive_lab::cli;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/paper3d.json"));
    let out = args.next().map(PathBuf::from);
    match cli::run_file(&path, out.as_deref(), None) {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!("{:<22} {}", r.name, r.verdict.as_str());
            }
            println!("artifacts in {}", outcome.out_dir.display());
            std::process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
