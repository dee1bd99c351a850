use std::io;
use std::process::ExitCode;

use clap::Parser;
use sitecoord_cli::{execute, report_failure, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    match execute(&cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            report_failure(cli.format, &failure, &mut io::stderr());
            ExitCode::from(failure.exit as u8)
        }
    }
}
