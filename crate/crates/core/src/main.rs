use clap::Parser;
use systematic_k::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
