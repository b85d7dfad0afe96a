use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use twng_core::config::Command;
use twng_core::runner::{self, RunOptions};

/// Tug-of-war with noise: solve, play, walk and verify workflows.
#[derive(Debug, Parser)]
#[command(name = "twng", version)]
struct Cli {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's "output", else ./twng-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's base_seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Keep game transcripts (play only).
    #[arg(long)]
    record: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Help and version are successes; everything else is a usage error.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = RunOptions { out: cli.out, seed: cli.seed, threads: cli.threads, record: cli.record };
    let result = runner::run(cli.command, &cli.config, &opts);
    let code = match &result {
        Ok((report, dir)) => {
            for c in &report.checks {
                let verdict = match (c.pass, c.hard) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "note",
                };
                println!("{verdict:<4} {:<32} {}", c.name, c.detail);
            }
            println!("outputs in {}", dir.display());
            eprintln!("wall time {:.2} s", report.wall_time);
            runner::exit_code(&Ok(report.clone()))
        }
        Err(e) => {
            eprintln!("twng: {e}");
            let mut src = std::error::Error::source(e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            if runner::is_config_error(e) { 2 } else { 1 }
        }
    };
    ExitCode::from(code as u8)
}
