//! Command-line front end for `expdd`.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 usage error, 3
//! numeric or domain error.

pub mod args;
pub mod commands;
mod error;
pub mod input;
pub mod output;
pub mod sampling;

use std::io::Write;

pub use args::{Cli, Command, GlobalArgs, OutputFormat, RunConfig, Target};
pub use error::{CliError, Outcome};
use output::Emitter;

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = &cli.global;
    let mut em = Emitter::new(out, g.format);
    match &cli.command {
        Command::Dd(a) => commands::dd::run(a, &mut em),
        Command::Bounds(a) => commands::bounds::run(a, g, &mut em),
        Command::Certify(a) => {
            let cfg = RunConfig::resolve(g, commands::certify::DEFAULT_TRIALS, a.target.default_tolerance())?;
            commands::certify::run(a, &cfg, &mut em)
        }
        Command::Selftest => {
            let cfg = RunConfig::resolve(g, commands::selftest::DEFAULT_TRIALS, commands::selftest::DEFAULT_TOLERANCE)?;
            commands::selftest::run(&cfg, &mut em)
        }
        Command::Bench(a) => commands::bench::run(a, g.seed, &mut em),
    }
}
