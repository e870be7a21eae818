//! Runs the demo suites and replays certificates.
//!
//! Exit status: 0 when every check reaches its expected verdict (or a replay
//! matches), 1 when some check disagrees (or a replay mismatches), 2 on a
//! usage or schema error.

mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finbound::certificate::{parse, replay, ReplayOutcome};
use serde::Serialize;
use serde_json::Value;

use suites::{Params, Suite, SuiteReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "finbound-cli", version, about = "Witness and refutation suites for finitary and finitely bounded functors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and report every check.
    Run {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Seed for every random choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size bound for witness searches.
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print one line per check.
        #[arg(long)]
        verbose: bool,
    },
    /// Recompute a certificate, or every certificate in a report, and compare.
    Replay {
        file: PathBuf,
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Serialize)]
struct Summary {
    checks: usize,
    unexpected: usize,
}

#[derive(Serialize)]
struct Report {
    report_schema: u32,
    tool_version: &'static str,
    seed: u64,
    bound: usize,
    suites: Vec<SuiteReport>,
    summary: Summary,
}

fn run(suite: Suite, seed: u64, bound: usize, json: Option<PathBuf>, verbose: bool) -> ExitCode {
    let params = &Params { seed, bound };
    let order = suite.expand();
    // suites are independent; results are assembled in name order
    let suites: Vec<SuiteReport> = std::thread::scope(|s| {
        let handles: Vec<_> = order.iter().map(|&su| s.spawn(move || suites::run(su, params))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
    });
    let checks = suites.iter().map(|s| s.checks.len()).sum();
    let unexpected = suites.iter().flat_map(|s| &s.checks).filter(|c| !c.ok).count();
    for s in &suites {
        let bad = s.checks.iter().filter(|c| !c.ok).count();
        println!("{}: {} checks, {} unexpected", s.suite, s.checks.len(), bad);
        for c in &s.checks {
            if verbose || !c.ok {
                let mark = if c.ok { "ok" } else { "UNEXPECTED" };
                println!("  [{mark}] {}: {} (expected {})", c.name, c.verdict, c.expected);
            }
        }
    }
    let report = Report {
        report_schema: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        bound,
        suites,
        summary: Summary { checks, unexpected },
    };
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_outcome(label: &str, o: &ReplayOutcome, verbose: bool) {
    let status = if o.matches { "match" } else { "MISMATCH" };
    println!("{label}{}: {status} (recorded {}, recomputed {})", o.kind, o.recorded, o.recomputed);
    if !o.matches || verbose {
        for d in &o.diff {
            println!("    {d}");
        }
    }
}

fn replay_file(path: &PathBuf, verbose: bool) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    // a report holds certificates under suites[].checks[].certificate
    let docs: Vec<(String, String)> = match serde_json::from_str::<Value>(&text) {
        Ok(v) if v.get("suites").is_some() => v["suites"]
            .as_array()
            .into_iter()
            .flatten()
            .flat_map(|s| s["checks"].as_array().into_iter().flatten())
            .filter_map(|c| {
                c.get("certificate")
                    .map(|cert| (format!("{}: ", c["name"].as_str().unwrap_or("?")), cert.to_string()))
            })
            .collect(),
        _ => vec![(String::new(), text)],
    };
    let mut all_match = true;
    for (label, doc) in docs {
        match parse(&doc).and_then(|c| replay(&c)) {
            Ok(o) => {
                all_match &= o.matches;
                print_outcome(&label, &o, verbose);
            }
            Err(e) => {
                eprintln!("{label}{e}");
                return ExitCode::from(2);
            }
        }
    }
    if all_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            suite,
            seed,
            bound,
            json,
            verbose,
        } => run(suite, seed, bound, json, verbose),
        Command::Replay { file, verbose } => replay_file(&file, verbose),
    }
}
