//! `wpo`: run law suites, fixed-point checks, `T_f` pipelines and witness
//! constructions, emitting deterministic JSON reports.

mod commands;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{exp2, fixpoint, laws, tf, witness};
use report::{Check, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "wpo",
    version,
    about = "Well partial orders, PO-dilators and Kruskal fixed points"
)]
struct Cli {
    /// Seed for every sampled (non-exhaustive) check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest carrier poset size in law checks.
    #[arg(long, global = true, default_value_t = 3)]
    budget_size: usize,
    /// Elements enumerated per carrier.
    #[arg(long, global = true, default_value_t = 64)]
    budget_elems: usize,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Include wall time in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check PO-dilator laws on all small posets.
    Laws(laws::Args),
    /// Enumerate a Kruskal fixed point and check its defining equation.
    Fixpoint(fixpoint::Args),
    /// The order T_f of an injective map and its descents in 2^{T_f}.
    Tf(tf::Args),
    /// Terms of the base-2 exponentiation 2^X.
    Exp2(exp2::Args),
    /// Explicit witness constructions.
    Witness {
        #[command(subcommand)]
        which: witness::Which,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub seed: u64,
    pub budget_size: usize,
    pub budget_elems: usize,
}

pub type Outcome = Result<(BTreeMap<String, u64>, Vec<Check>), String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let g = Globals {
        seed: cli.seed,
        budget_size: cli.budget_size,
        budget_elems: cli.budget_elems,
    };
    let outcome = match &cli.command {
        Command::Laws(a) => laws::run(a, &g),
        Command::Fixpoint(a) => fixpoint::run(a, &g),
        Command::Tf(a) => tf::run(a, &g),
        Command::Exp2(a) => exp2::run(a, &g),
        Command::Witness { which } => witness::run(which, &g),
    };
    let (mut budgets, checks) = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    budgets.insert("size".into(), g.budget_size as u64);
    budgets.insert("elems".into(), g.budget_elems as u64);
    let command: Vec<String> = std::env::args().skip(1).collect();
    let mut report = RunReport::new(command.join(" "), g.seed, budgets, checks);
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let json = report.to_json();
    print!("{json}");
    eprint!("{}", report.summary());
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: --json-out {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
