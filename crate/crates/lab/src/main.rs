use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mclab::{execute, experiments, RunOptions};

/// Runs one named experiment and writes replicates.csv and summary.json.
#[derive(Debug, Parser)]
#[command(name = "mclab", version, after_help = catalog())]
struct Cli {
    /// Experiment name (see the list below).
    experiment: String,
    /// JSON config file; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; defaults to mclab-out/<experiment>.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn catalog() -> String {
    let mut s = String::from("Experiments:\n");
    for (name, _, about) in experiments::CATALOG {
        s.push_str(&format!("  {name:<22} {about}\n"));
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let opts = RunOptions {
        experiment: cli.experiment,
        config: cli.config,
        seed: cli.seed,
        reps: cli.reps,
        threads: cli.threads,
        out: cli.out,
    };
    match execute(&opts) {
        Ok(outcome) => {
            for v in &outcome.report.verdicts {
                println!(
                    "{} {}: {}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.name,
                    v.detail
                );
            }
            println!(
                "{} in {:.2}s; wrote {}",
                if outcome.passed() {
                    "all verdicts pass"
                } else {
                    "verdict failure"
                },
                outcome.runtime_seconds,
                outcome.out_dir.display()
            );
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("mclab: {e}");
            ExitCode::from(2)
        }
    }
}
