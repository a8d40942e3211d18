//! Command-line front end of the `fanin` toolkit. The binary is a thin
//! wrapper around [`run`].

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use crate::error::{CONSTRAINT, DISAGREEMENT, NUMERICAL, USAGE};
pub use crate::output::fmt_sig;

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::output::Emitter;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, S>(argv: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv = match config::expand(argv.into_iter().map(Into::into).collect()) {
        Ok(argv) => argv,
        Err(CliError { code, message }) => {
            eprintln!("fanin: {message}");
            return code;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return u8::try_from(code).unwrap_or(USAGE);
        }
    };
    let emitter = Emitter::new(
        &cli.global,
        argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()),
    );
    let result = match &cli.command {
        Command::Response(a) => commands::response::run(a, &emitter),
        Command::Activity(a) => commands::activity::run(a, &emitter),
        Command::Design(a) => commands::design::run(a, &emitter),
        Command::TreeVerify(a) => commands::tree_verify::run(a, &emitter),
    };
    match result {
        Ok(()) => 0,
        Err(CliError { code, message }) => {
            eprintln!("fanin: {message}");
            code
        }
    }
}
