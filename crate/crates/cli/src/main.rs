use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use photon_post_cli::{execute, parse_config_with_seed, CliError};

/// Run a photon-post scenario from a JSON config.
#[derive(Parser, Debug)]
#[command(name = "photon-post", version)]
struct Args {
    /// Scenario config (JSON, `"version": 1`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replaces the config's `seed` for commands that take one.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "PHOTON_THREADS")]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let config = parse_config_with_seed(&text, args.seed)?;
    execute(&config, &args.out, args.threads)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("photon-post: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
