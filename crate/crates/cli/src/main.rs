use std::process::ExitCode;

use clap::Parser;
use qlinear_cli::report::EXIT_INPUT;
use qlinear_cli::{run, Cli, OutputFormat};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let out = run(&cli, argv);
    let report = &out.report;
    match (&out.raw_stdout, cli.global.format) {
        (Some(raw), _) if report.exit_status != EXIT_INPUT => print!("{raw}"),
        (_, OutputFormat::Json) => println!("{}", report.to_json()),
        (_, OutputFormat::Text) => print!("{}", report.to_text()),
    }
    // Verdict failures are already part of the report; only input errors
    // need stderr.
    if let (Some(err), EXIT_INPUT) = (&report.error, report.exit_status) {
        eprintln!("error: {err}");
    }
    ExitCode::from(report.exit_status as u8)
}
