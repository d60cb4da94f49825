use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sfl_cli::config::{from_raw, RawConfig};
use sfl_cli::{run, Command, Status};

/// Sharp, relaxed and phase-field energies of voids and strained films.
#[derive(Debug, Parser)]
#[command(name = "sfl", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment configuration (bracketed sections, key = value).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for perturbed initializations; overrides `[phasefield] seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let mut raw = match RawConfig::parse(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = cli.seed {
        raw.set("phasefield", "seed", seed.to_string());
    }
    if let Some(out) = &cli.out {
        raw.set("output", "dir", out.display().to_string());
    }
    let cfg = match from_raw(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let report = run(&cfg, cli.command);
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    for r in report.runs.iter().filter(|r| !r.passed) {
        eprintln!(
            "assertion failed in {}: {}",
            r.label,
            r.message.as_deref().unwrap_or("check failed")
        );
    }
    if !cli.quiet || report.status != Status::Pass {
        println!(
            "{:?} {}: {} ({} files in {})",
            cli.command,
            cfg.name,
            match report.status {
                Status::Pass => "pass",
                Status::AssertionFailed => "assertion failed",
                Status::Error => "error",
            },
            report.manifest.len(),
            cfg.out_dir.display()
        );
    }
    ExitCode::from(report.status.exit_code() as u8)
}
