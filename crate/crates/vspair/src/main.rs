use std::collections::BTreeMap;
use std::io::{Read, Write};

use clap::{Parser, Subcommand};

use vspair::cli::{cmd_check, cmd_decide, cmd_eliminate, parse_bounds, CommandOutput};
use vspair::config::EngineConfig;

/// Quantifier elimination and decision procedures for vector spaces with a
/// generic submodule.
#[derive(Parser)]
#[command(name = "vspair", version, about)]
struct Args {
    /// Configuration file (key = value lines: field, ring, ordered, limits.*)
    #[arg(long, global = true)]
    config: Option<String>,

    /// Emit reports as JSON
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eliminate quantifiers and print an equivalent quantifier-free formula
    Eliminate {
        /// Formula text; reads standard input when omitted
        formula: Option<String>,
        /// Attach the elimination trace
        #[arg(long)]
        trace: bool,
    },
    /// Decide a sentence (exit code 0 = true, 1 = false)
    Decide {
        /// Sentence text; reads standard input when omitted
        sentence: Option<String>,
        /// Model snapshot binding the constants
        #[arg(long)]
        model: Option<String>,
        /// Attach the elimination trace
        #[arg(long)]
        trace: bool,
    },
    /// Run a property suite and report pass/fail counts
    Check {
        /// One of: axioms, halfgraph, mordell, qe-roundtrip, indep,
        /// small-large, types
        #[arg(long)]
        suite: String,
        /// Suite bounds as k=v,k=v (samples, seed, box, generators, ...)
        #[arg(long)]
        bounds: Option<String>,
    },
}

fn read_input(arg: Option<String>) -> String {
    match arg {
        Some(s) => s,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).expect("readable standard input");
            buf.trim().to_string()
        }
    }
}

fn main() {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match EngineConfig::parse(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    std::process::exit(vspair::cli::EXIT_PARSE);
                }
            },
            Err(e) => {
                eprintln!("error: cannot read config {path}: {e}");
                std::process::exit(vspair::cli::EXIT_PARSE);
            }
        },
        None => EngineConfig::rationals_integers(),
    };
    let out: CommandOutput = match args.command {
        Command::Eliminate { formula, trace } => {
            cmd_eliminate(&cfg, &read_input(formula), trace, args.json)
        }
        Command::Decide { sentence, model, trace } => {
            cmd_decide(&cfg, &read_input(sentence), model.as_deref(), trace, args.json)
        }
        Command::Check { suite, bounds } => {
            let bounds: BTreeMap<String, String> = parse_bounds(bounds.as_deref());
            cmd_check(&cfg, &suite, &bounds, args.json)
        }
    };
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
