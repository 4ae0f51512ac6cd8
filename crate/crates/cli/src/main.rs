//! `workbench`: runs one command of a scenario file and writes a JSON report.
//!
//! Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 a property
//! check found a counterexample.

use anyhow::Context;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use workbench_core::game::{configure_threads, DEFAULT_BUDGET};
use workbench_core::scenario::{run, RunOptions, Scenario, ScenarioError, COMMANDS};

#[derive(Parser, Debug)]
#[command(name = "workbench", version, about = "Selection games, strategy translations and set-valued maps")]
struct Args {
    /// Scenario JSON; without one only `examples` has something to run.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on game positions and exhaustive runs.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Band samples from `analyze-map`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn threads_from_env() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("WORKBENCH_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("WORKBENCH_THREADS={v} is not a count"))?;
        configure_threads(n.max(1));
    }
    Ok(())
}

fn execute(args: &Args) -> Result<i32, (i32, anyhow::Error)> {
    let invalid = |e: anyhow::Error| (2, e);
    threads_from_env().map_err(invalid)?;
    let scenario = match &args.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(invalid)?;
            Scenario::parse(&text).map_err(|e| (e.exit_code(), e.into()))?
        }
        None => Scenario::default(),
    };
    let opts = RunOptions { seed: args.seed, budget: args.budget };
    let outcome = run(&scenario, &args.command, &opts).map_err(|e: ScenarioError| (e.exit_code(), e.into()))?;
    let json = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    match &args.out {
        Some(path) => {
            std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display())).map_err(invalid)?
        }
        None => {
            use std::io::Write;
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{json}");
        }
    }
    if let (Some(path), Some(csv)) = (&args.csv, &outcome.csv) {
        std::fs::write(path, csv).with_context(|| format!("writing {}", path.display())).map_err(invalid)?;
    }
    for f in &outcome.report.failures {
        eprintln!("counterexample: {f}");
    }
    Ok(outcome.report.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
