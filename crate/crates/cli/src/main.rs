mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qhlab::scenarios::{list_scenarios, run_request, RunDefaults, Scenario};
use rayon::prelude::*;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "qhlab", version, about = "Run quasihyperbolic geometry verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a configuration file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for reports.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scan budget for every scenario.
        #[arg(long)]
        budget: Option<u64>,
        /// Mesh `h` for every scenario.
        #[arg(long)]
        mesh: Option<f64>,
        /// Scenarios run concurrently.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the registered scenarios.
    List,
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>, budget: Option<u64>, mesh: Option<f64>, jobs: Option<usize>) -> Result<bool> {
    let mut cfg = RunConfig::load(&config)?;
    if let Some(h) = mesh {
        anyhow::ensure!(h > 0.0 && h.is_finite(), "--mesh must be positive, got {h}");
    }
    anyhow::ensure!(jobs != Some(0), "--jobs must be at least 1");
    // flags override scenario entries, which override the top level
    for s in &mut cfg.scenarios {
        s.seed = seed.or(s.seed);
        s.budget = budget.or(s.budget);
        s.mesh = mesh.or(s.mesh);
    }
    let defaults = RunDefaults { seed: seed.unwrap_or(cfg.seed), mesh: cfg.mesh, budget: cfg.budget };
    let out = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.or(cfg.jobs).unwrap_or(1)).build()?;
    let results: Vec<Result<Vec<Scenario>>> = pool.install(|| {
        cfg.scenarios.par_iter().map(|r| run_request(r, &defaults).with_context(|| format!("scenario `{}` failed", r.name))).collect()
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    report::write_reports(&out, &all)?;
    for s in &all {
        println!("{} {}", if s.pass { "PASS" } else { "FAIL" }, s.name);
        for c in s.failing() {
            println!("  {}: {} (computed {}, bound {})", c.id, c.description, c.computed, c.bound);
        }
    }
    Ok(all.iter().all(|s| s.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, out, budget, mesh, jobs } => match run(config, seed, out, budget, mesh, jobs) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
