use clap::Parser;
use ntn_peb_cli::{execute, Cli};

fn main() {
    std::process::exit(execute(&Cli::parse()));
}
