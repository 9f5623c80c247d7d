use std::process::ExitCode;

use clap::Parser;
use walkvisits_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli))
}
