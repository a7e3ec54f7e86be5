//! Command-line front end for the egonet toolkit.
//!
//! Exit codes: 0 success, 1 domain or I/O error, 2 usage error.

use clap::Parser;

pub mod commands;
pub mod manifest;

#[derive(Parser, Debug)]
#[command(
    name = "egonet",
    version,
    about = "Friendship-paradox statistics, hub-alter null models, and SI spreading on synthetic contact networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: commands::Command,
}

/// Runs the CLI on a full argv (program name first) and returns the exit
/// code instead of exiting, so tests can drive it in-process.
pub fn execute(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}
