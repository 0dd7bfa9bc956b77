//! Front end for `werner-core`: each subcommand builds a [`report::Report`]
//! that renders as Markdown, CSV or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use args::{Cli, Command, Format};
use error::CliError;
use report::Report;

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let mut report = match &cli.command {
        Command::Bounds(a) => commands::bounds(a),
        Command::Tables(a) => commands::tables(a),
        Command::Werner(c) => commands::werner(c),
        Command::Measure(a) => commands::measure(a),
        Command::Gamma(a) => commands::gamma(a),
        Command::Examples(a) => commands::examples(a),
    }?;
    if cli.timestamp {
        report.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Markdown => report.to_markdown(),
        Format::Csv => report.to_csv().map_err(|e| CliError::Output(e.to_string()))?,
        Format::Structured => report.to_json() + "\n",
    })
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = (|| {
        if let Some(n) = cli.threads {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Threads(e.to_string()))?;
        }
        let text = render(&execute(&cli)?, cli.format)?;
        std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
