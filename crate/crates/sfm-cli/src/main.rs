//! `sfm`: exact submodular function minimization from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 failed correctness check.

use clap::{Parser, Subcommand};
use sfm_core::batch::default_parallelism;
use sfm_core::error::SfmError;
use sfm_core::gen::FamilyKind;
use sfm_core::instance::parse_instance;
use sfm_core::rational::{parse_rational, Rational};
use sfm_core::runner::{run_gen, run_solve, Algorithm, RunFailure};
use sfm_core::selftest::run_selftest;
use sfm_core::trace::TraceEvent;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sfm",
    about = "Exact minimization of submodular set functions with machine-checkable certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize an instance file and print the result as JSON.
    Solve {
        /// Instance path (explicit-table/coverage/matroid/concave JSON, or
        /// cut text format).
        input: PathBuf,
        /// scaling (weakly polynomial, certified), strong (strongly
        /// polynomial), or brute (exhaustive, n ≤ 24).
        #[arg(long, default_value = "scaling")]
        algorithm: String,
        /// Re-check the result: certificate verification plus exhaustive
        /// cross-check for n ≤ 24.
        #[arg(long)]
        verify: bool,
        /// Record solver events as JSON lines at this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Positive lower bound "p/q" on the gap between distinct function
        /// values; required by the scaling algorithm on rational-valued
        /// instances.
        #[arg(long)]
        epsilon: Option<String>,
        /// Write the result here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded instance (table, cut, coverage, matroid, concave,
    /// ratcut or rattable).
    Gen {
        family: String,
        n: usize,
        /// Generator seed; identical seeds give identical bytes.
        #[arg(default_value_t = 0)]
        seed: u64,
        /// Seed given as a flag; overrides the positional value.
        #[arg(long = "seed", conflicts_with = "seed")]
        seed_flag: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the full acceptance suite and print one line per criterion.
    Selftest {
        /// Run suite instances on a single thread.
        #[arg(long)]
        sequential: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve {
            input,
            algorithm,
            verify,
            trace,
            epsilon,
            output,
        } => solve_command(input, &algorithm, verify, trace, epsilon, output),
        Command::Gen {
            family,
            n,
            seed,
            seed_flag,
            output,
        } => gen_command(&family, n, seed_flag.unwrap_or(seed), output),
        Command::Selftest { sequential } => selftest_command(!sequential),
    }
}

fn input_error(e: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn check_error(e: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn solve_command(
    input: PathBuf,
    algorithm: &str,
    verify: bool,
    trace: Option<PathBuf>,
    epsilon: Option<String>,
    output: Option<PathBuf>,
) -> ExitCode {
    let algorithm = match Algorithm::parse(algorithm) {
        Ok(a) => a,
        Err(e) => return input_error(&e),
    };
    let epsilon: Option<Rational> = match epsilon {
        None => None,
        Some(s) => match parse_rational(&s) {
            Ok(e) => {
                if !e.is_positive() {
                    return input_error(&SfmError::InvalidInput(
                        "--epsilon must be positive".to_string(),
                    ));
                }
                Some(e)
            }
            Err(e) => return input_error(&e),
        },
    };
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            return input_error(&SfmError::Io(format!("{}: {e}", input.display())));
        }
    };
    let family = match parse_instance(&text) {
        Ok(f) => f,
        Err(e) => return input_error(&e),
    };

    let mut trace_lines: Vec<String> = Vec::new();
    let mut sink = |ev: TraceEvent| trace_lines.push(ev.to_json_line());
    let trace_sink: Option<&mut dyn FnMut(TraceEvent)> = if trace.is_some() {
        Some(&mut sink)
    } else {
        None
    };

    let outcome = run_solve(&family, algorithm, epsilon.as_ref(), verify, trace_sink);

    if let Some(path) = &trace {
        let mut body = trace_lines.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        if let Err(e) = std::fs::write(path, body) {
            return input_error(&SfmError::Io(format!("{}: {e}", path.display())));
        }
    }

    match outcome {
        Ok(result) => match write_output(output.as_deref(), &result.json) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(&e),
        },
        Err(RunFailure::Input(e)) => input_error(&e),
        Err(f @ RunFailure::Check(_)) => check_error(&f),
    }
}

fn gen_command(family: &str, n: usize, seed: u64, output: Option<PathBuf>) -> ExitCode {
    let kind = match FamilyKind::parse(family) {
        Ok(k) => k,
        Err(e) => return input_error(&e),
    };
    match run_gen(kind, n, seed) {
        Ok(text) => match write_output(output.as_deref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(&e),
        },
        Err(e) => input_error(&e),
    }
}

fn selftest_command(parallel: bool) -> ExitCode {
    let report = run_selftest(parallel && default_parallelism());
    print!("{}", report.render());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), SfmError> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| SfmError::Io(e.to_string()))
        }
        Some(p) => {
            std::fs::write(p, text).map_err(|e| SfmError::Io(format!("{}: {e}", p.display())))
        }
    }
}
