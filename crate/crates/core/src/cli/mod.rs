//! Command-line front end: flag parsing, run configuration, and the
//! `answer`, `ground`, `train`, `eval` and `synth` commands.
//!
//! The `cmd_*` functions do the work and return their output as values, so
//! they can be driven from tests without spawning processes; [`main`] only
//! parses flags, writes files and reports errors.

mod args;
mod commands;
mod eval;

pub use args::{Cli, Command};
pub use commands::{
    cmd_answer, cmd_ground, cmd_synth, cmd_train, parse_queries, read_answers, write_answers,
    GroundOutput, QueryAnswers, RunConfig, SynthKind, SynthOutput, Timing,
};
pub use eval::{cmd_eval, evaluate, labeled_scores, EvalReport};

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::error::Error;

/// Formats an error as one tab-separated line: `error<TAB>kind<TAB>message`.
pub fn error_line(e: &Error) -> String {
    format!("error\t{}\t{}", e.kind(), e.to_string().replace(['\n', '\t'], " "))
}

/// Entry point for the binary. Returns 0 on success, 1 on a command
/// failure and 2 on a usage error.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error\tusage\t{first}");
            eprint!("{message}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match args::run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr.lock(), "{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
