mod args;
mod report;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use qcantor::Error;

const EXIT_DOMAIN: u8 = 1;
const EXIT_EXHAUSTED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

fn report_error(err: &Error) -> ExitCode {
    let body = json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{body}");
    ExitCode::from(match err {
        Error::MalformedRational(_) => EXIT_DATA,
        e if e.is_exhaustion() => EXIT_EXHAUSTED,
        _ => EXIT_DOMAIN,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match run::run(&cli.command, &cli.global) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    let written = match &cli.global.output_path {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            outcome.report.write(cli.global.output, &mut w)?;
            w.flush()
        }),
        None => {
            let mut w = io::stdout().lock();
            outcome.report.write(cli.global.output, &mut w)
        }
    };
    match written {
        Ok(()) if outcome.exhausted => {
            let body = json!({
                "error": "precision_exhausted",
                "message": format!("a certified comparison stayed open at {} bits", cli.global.precision_cap),
            });
            eprintln!("{body}");
            ExitCode::from(EXIT_EXHAUSTED)
        }
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": "io", "message": e.to_string() }));
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
