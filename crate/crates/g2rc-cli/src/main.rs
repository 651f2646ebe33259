//! `g2rc`: enumerate, map and verify rigged configurations and paths.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use g2rc::bijection::phi_trace;
use g2rc::crystal::{to_dot, Weight};
use g2rc::harness::{fixtures_check, sweep, verify, VerifyOptions, DEFAULT_MAX_L};
use g2rc::inverse::{phi_inv_with_fallback, StepSource};
use g2rc::paths::{energy, enumerate_paths, Path};
use g2rc::rigged_config::{enumerate_rc, RiggedConfiguration};
use g2rc::{phi, BoundError, InverseError, ParseError, StepError};

#[derive(Debug, Parser)]
#[command(name = "g2rc", version)]
#[command(about = "Rigged configurations and paths for B(2,1) of type G2(1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the highest-weight rigged configurations of weight λ.
    EnumerateRc {
        /// Weight as `a,b` for a·Λ̄1 + b·Λ̄2.
        #[arg(long = "lambda")]
        lambda: Weight,
        #[arg(long = "L")]
        big_l: usize,
        /// One JSON object per line.
        #[arg(long)]
        json: bool,
    },
    /// List the classically restricted paths of weight λ.
    EnumeratePaths {
        #[arg(long = "lambda")]
        lambda: Weight,
        #[arg(long = "L")]
        big_l: usize,
        #[arg(long)]
        json: bool,
    },
    /// Map a rigged configuration (JSON file) to its path.
    Phi {
        #[arg(long)]
        rc: PathBuf,
        /// Print the letter, marking and result of every step.
        #[arg(long)]
        trace: bool,
    },
    /// Map a path (JSON array of letters) back to its rigged configuration.
    PhiInv {
        #[arg(long)]
        path: PathBuf,
        /// Print the box-adding clauses of every step.
        #[arg(long)]
        trace: bool,
    },
    /// Run every suite on one (λ, L) cell and print its report.
    Verify {
        #[arg(long = "lambda")]
        lambda: Weight,
        #[arg(long = "L")]
        big_l: usize,
        /// Skip the round-trip suites.
        #[arg(long)]
        no_round_trip: bool,
    },
    /// Verify every cell up to the given length, one report per line.
    Sweep {
        #[arg(long = "max-L", default_value_t = DEFAULT_MAX_L)]
        max_l: usize,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Replay the worked-example fixtures.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
    /// Write the crystal graph in DOT format.
    Graph {
        #[arg(long)]
        dot: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Fixture(#[from] g2rc::harness::FixtureError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cannot start the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    /// A map or invariant failed; the details were already printed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.clone(), source: ParseError::Json(e) })
}

fn json_line<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("values serialize")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::EnumerateRc { lambda, big_l, json } => {
            for rc in enumerate_rc(lambda, big_l)? {
                if json {
                    println!("{}", json_line(&rc));
                } else {
                    println!("{rc}  charge {}", rc.charge());
                }
            }
        }
        Command::EnumeratePaths { lambda, big_l, json } => {
            for p in enumerate_paths(lambda, big_l)? {
                if json {
                    println!("{}", json_line(&p));
                } else {
                    println!("{p}  energy {}", energy(&p));
                }
            }
        }
        Command::Phi { rc, trace } => {
            let raw: RiggedConfiguration = read_json(&rc)?;
            let rc = RiggedConfiguration::new(raw.big_l, raw.nu1, raw.nu2);
            rc.validate().map_err(|e| CliError::Input(e.to_string()))?;
            let steps = phi_trace(&rc).map_err(|e| match e {
                StepError::Invalid(v) => CliError::Input(v.to_string()),
                e => CliError::Failed(e.to_string()),
            })?;
            if trace {
                let mut cur = &rc;
                for (k, o) in steps.iter().enumerate() {
                    println!("step {}: letter {}", k + 1, o.letter);
                    println!("  marks  {}", o.marking.describe(cur));
                    println!("  result {}", o.new_rc);
                    cur = &o.new_rc;
                }
            }
            let p = Path(steps.iter().map(|o| o.letter).collect());
            println!("{}", json_line(&p));
            println!("charge {} energy {}", rc.charge(), energy(&p));
        }
        Command::PhiInv { path, trace } => {
            let p: Path = read_json(&path)?;
            let (rc, sources) = phi_inv_with_fallback(&p).map_err(|e| match e {
                InverseError::Invalid(_) | InverseError::NotDominant { .. } => CliError::Input(e.to_string()),
                e => CliError::Failed(e.to_string()),
            })?;
            let gaps = sources.iter().filter(|s| matches!(s, StepSource::Search(_))).count();
            if trace {
                // Sources run right to left; print them in path order.
                for (k, s) in sources.iter().enumerate().rev() {
                    let letter = p.letters()[p.len() - 1 - k];
                    match s {
                        StepSource::Clause(plan) => println!("step {}: letter {letter}: {plan}", p.len() - k),
                        StepSource::Search(e) => {
                            println!("step {}: letter {letter}: gap, solved by search ({e})", p.len() - k)
                        }
                    }
                }
            }
            if gaps > 0 {
                eprintln!("{gaps} step(s) not covered by the box-adding clauses; preimage found by search");
            }
            println!("{}", json_line(&rc));
            let back = phi(&rc).map_err(|e| CliError::Failed(e.to_string()))?;
            if back != p {
                return Err(CliError::Failed(format!("Φ of the preimage is {back}, not {p}")));
            }
        }
        Command::Verify { lambda, big_l, no_round_trip } => {
            let opts = VerifyOptions { round_trip: !no_round_trip, ..VerifyOptions::default() };
            let report = verify(lambda, big_l, &opts)?;
            println!("{}", report.to_json_line());
            if !report.passed() {
                let n: u64 = report.counters.values().map(|c| c.failed).sum();
                return Err(CliError::Failed(format!("{n} failed check(s)")));
            }
        }
        Command::Sweep { max_l, jobs } => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(k) = jobs {
                pool = pool.num_threads(k);
            }
            let reports = pool.build()?.install(|| sweep(max_l, VerifyOptions::for_length))?;
            let mut failed = 0;
            for r in &reports {
                println!("{}", r.to_json_line());
                failed += usize::from(!r.passed());
            }
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} cell(s) failed")));
            }
        }
        Command::Fixtures { dir } => {
            let results = fixtures_check(&dir)?;
            let mut failed = 0;
            for r in &results {
                if r.passed() {
                    println!("ok   {}", r.name);
                } else {
                    failed += 1;
                    println!("FAIL {}", r.name);
                    for m in &r.mismatches {
                        println!("     {m}");
                    }
                }
            }
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} fixture(s) failed")));
            }
        }
        Command::Graph { dot } => {
            fs::write(&dot, to_dot()).map_err(|source| CliError::Io { path: dot.clone(), source })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
