use std::process::ExitCode;

use clap::Parser;
use werner_cli::args::Cli;

fn main() -> ExitCode {
    ExitCode::from(werner_cli::run(Cli::parse()))
}
