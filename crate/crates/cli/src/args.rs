use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "expdd", version, about = "Divided differences of the exponential function")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// Parses arguments, accepting negative `v^m` node tokens such as `-1^2`.
    pub fn try_parse_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString>,
    {
        Self::try_parse_from(args.into_iter().map(|a| shield_negative_node(a.into())))
    }
}

/// clap only lets plain negative numbers through as positionals; a leading
/// space keeps `-1^2` from being read as a flag, and node parsing trims it.
fn shield_negative_node(arg: OsString) -> OsString {
    match arg.to_str() {
        Some(s) if s.contains('^') && s.starts_with('-') && s[1..].starts_with(|c: char| c.is_ascii_digit() || c == '.') => {
            format!(" {s}").into()
        }
        _ => arg,
    }
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Base seed for randomized commands.
    #[arg(long, global = true, env = "EXPDD_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of randomized trials (per identity for `selftest`).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Check tolerance; each command documents its default.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Working precision of the extended-precision oracle.
    #[arg(long, global = true, default_value_t = 200)]
    pub precision_bits: usize,
    /// Worker threads; omitted or 0 means one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate e^{t[x_0..x_q]}.
    Dd(DdArgs),
    /// Sandwich bound report for a node multiset.
    Bounds(NodeArgs),
    /// Randomized search for violations of an inequality.
    Certify(CertifyArgs),
    /// Identity residuals over a seeded battery.
    Selftest,
    /// Time full evaluation against incremental appends.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NodeArgs {
    /// Nodes as decimals; `v^m` repeats `v` m times.
    #[arg(allow_negative_numbers = true)]
    pub nodes: Vec<String>,
    /// Read nodes from a file (`#` starts a comment).
    #[arg(long, short)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DdArgs {
    #[command(flatten)]
    pub nodes: NodeArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Multiply by q! (so constant nodes give e^x).
    #[arg(long)]
    pub factorial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Tn2,
    Supermodular,
    Fourpoint,
    Triangle,
    Phiproduct,
    Hproduct,
    Sandwich,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Tn2 => "tn2",
            Target::Supermodular => "supermodular",
            Target::Fourpoint => "fourpoint",
            Target::Triangle => "triangle",
            Target::Phiproduct => "phiproduct",
            Target::Hproduct => "hproduct",
            Target::Sandwich => "sandwich",
        }
    }

    /// Tolerance when `--tolerance` is absent: absolute for the log-domain
    /// targets, relative to the largest term for the others.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Target::Tn2 | Target::Sandwich => 1e-10,
            _ => 1e-12,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Index of the first trial; with `--trials 1` this replays one input.
    #[arg(long, default_value_t = 0)]
    pub start: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Orders q to time.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 64, 512])]
    pub sizes: Vec<usize>,
}

/// Validated settings shared by the randomized commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
    pub format: OutputFormat,
    pub precision_bits: usize,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(global: &GlobalArgs, default_trials: u64, default_tolerance: f64) -> Result<Self, CliError> {
        let trials = global.trials.unwrap_or(default_trials);
        if trials == 0 {
            return Err(CliError::usage("--trials must be at least 1"));
        }
        let tolerance = global.tolerance.unwrap_or(default_tolerance);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::usage(format!("--tolerance must be positive and finite, got {tolerance}")));
        }
        if global.precision_bits < 64 {
            return Err(CliError::usage("--precision-bits must be at least 64"));
        }
        Ok(RunConfig {
            seed: global.seed,
            trials,
            tolerance,
            format: global.format,
            precision_bits: global.precision_bits,
            threads: global.threads.filter(|&n| n > 0),
        })
    }

    /// Runs `f` on a pool with the configured thread count.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::usage(format!("cannot start thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}
