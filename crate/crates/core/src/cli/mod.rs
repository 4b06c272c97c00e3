//! Command-line experiment runner.
//!
//! `systematic-k run <config.json> [--seed N] [--out report.json]` loads an
//! [`ExperimentConfig`], runs one command and writes a JSON [`Report`].
//! `systematic-k selftest` runs the acceptance suite. Exit status is 0 when
//! every check passes, 1 on a failed check and 2 on a configuration error.

pub mod config;
pub mod run;
pub mod selftest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{Budget, Command, ExperimentConfig};
pub use run::{run, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "systematic-k", version, about = "K0 experiments over G-systematic rings")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    /// Run one experiment from a JSON config.
    Run {
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Writes the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest,
}

/// Executes a parsed command line and returns the exit status.
pub fn execute(cli: Cli) -> i32 {
    match cli.action {
        Action::Run { config, seed, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", config.display());
                    return EXIT_CONFIG;
                }
            };
            let mut cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return EXIT_CONFIG;
                }
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run(&cfg);
            let body = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, body + "\n") {
                        eprintln!("cannot write {}: {e}", path.display());
                        return EXIT_CONFIG;
                    }
                    print!("{}", report.summary());
                }
                None => println!("{body}"),
            }
            if report.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Action::Selftest => {
            let mut ok = true;
            for o in selftest::run_all() {
                println!("{}", o.line());
                ok &= o.passed;
            }
            if ok {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
    }
}
