use std::io::Write;
use std::process::ExitCode;

use adoptnet::cli::{self, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli::run(&cli);
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports are valid JSON");
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    let _ = writeln!(std::io::stderr().lock(), "{}", outcome.summary);
    ExitCode::from(outcome.code as u8)
}
