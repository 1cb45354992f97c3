use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use star_urd::io::{from_json, to_dot, to_edge_list, to_json, DocumentError};
use star_urd::oracle::{brute_force_urd, Nonexistence, OracleOutcome, DEFAULT_BUDGET};
use star_urd::{construct_urd, enumerate_admissible, verify_urd, Error};

const EXIT_IO: u8 = 1;
const EXIT_INADMISSIBLE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_NONEXISTENT: u8 = 4;
const EXIT_TIMEOUT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "star-urd",
    version,
    about = "Decompose K_v into one 1-factor and n-star factors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Edges,
}

#[derive(Subcommand)]
enum Command {
    /// Build a decomposition for an admissible (n, v).
    Construct {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        v: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a JSON decomposition document.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// List admissible vertex counts up to a bound.
    Params {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_v: u32,
    },
    /// Search for a decomposition exhaustively (small v only).
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        v: u32,
        /// Search node limit.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn library_error(e: Error) -> ExitCode {
    match e {
        Error::Inadmissible { .. } | Error::InvalidArgument(_) => fail(EXIT_INADMISSIBLE, e),
        other => fail(EXIT_IO, other),
    }
}

fn emit(text: &str, out: Option<&Path>) -> ExitCode {
    let written = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_IO, e),
    }
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Construct { n, v, format, out } => match construct_urd(n, v) {
            Ok(d) => {
                let text = match format {
                    Format::Json => to_json(&d),
                    Format::Dot => to_dot(&d),
                    Format::Edges => to_edge_list(&d),
                };
                emit(&text, out.as_deref())
            }
            Err(e) => library_error(e),
        },
        Command::Verify { input } => {
            let text = match fs::read_to_string(&input) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_IO, format!("{}: {e}", input.display())),
            };
            let d = match from_json(&text, true) {
                Ok(d) => d,
                Err(e @ DocumentError::Invalid(_)) => return fail(EXIT_INVALID, e),
                Err(e) => return fail(EXIT_IO, format!("{}: {e}", input.display())),
            };
            let report = verify_urd(&d);
            match report.violations.first() {
                None => {
                    println!(
                        "ok: v={} n={} s={} edges={}",
                        d.v,
                        d.n,
                        d.star_classes.len(),
                        report.total_edges()
                    );
                    ExitCode::SUCCESS
                }
                Some(v) => {
                    eprintln!("{} violation(s)", report.violations.len());
                    fail(EXIT_INVALID, v)
                }
            }
        }
        Command::Params { n, max_v } => match enumerate_admissible(n, max_v) {
            Ok(list) => {
                let mut text = String::from("v\tg\ts\tk'\tt\n");
                for p in list {
                    text.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\n",
                        p.v, p.g, p.s, p.k_prime, p.t
                    ));
                }
                emit(&text, None)
            }
            Err(e) => library_error(e),
        },
        Command::Oracle { n, v, budget, out } => match brute_force_urd(n, v, budget) {
            Ok(OracleOutcome::Witness {
                decomposition,
                nodes,
            }) => {
                eprintln!("witness ({nodes} nodes)");
                emit(&to_json(&decomposition), out.as_deref())
            }
            Ok(OracleOutcome::Nonexistent(Nonexistence::Divisibility(why))) => {
                eprintln!("none: {why}");
                ExitCode::from(EXIT_NONEXISTENT)
            }
            Ok(OracleOutcome::Nonexistent(Nonexistence::Exhausted { nodes })) => {
                eprintln!("none: search exhausted after {nodes} nodes");
                ExitCode::from(EXIT_NONEXISTENT)
            }
            Ok(OracleOutcome::Timeout { nodes }) => {
                eprintln!("timeout after {nodes} nodes");
                ExitCode::from(EXIT_TIMEOUT)
            }
            Err(e) => library_error(e),
        },
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
