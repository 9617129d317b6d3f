//! `tangenta`: exit 0 on success, 1 when a checked theorem fails, 2 on
//! usage errors, 3 on precondition or domain errors. Errors are printed as
//! one JSON object on stderr.

mod args;
mod config;
mod error;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use error::CliError;

fn main() -> ExitCode {
    let argv: Result<Vec<String>, _> = std::env::args_os().map(|a| a.into_string()).collect();
    let argv = match argv {
        Ok(v) => v,
        Err(bad) => return CliError::Usage(format!("argument is not UTF-8: {bad:?}")).report(),
    };
    let argv = match config::expand(argv) {
        Ok(v) => v,
        Err(e) => return e.report(),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => CliError::Usage(e.render().to_string().trim_end().to_string()).report(),
            };
        }
    };
    match run::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => e.report(),
    }
}
