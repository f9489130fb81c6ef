use std::ffi::OsString;
use std::ops::Range;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::{run, Command, OutputFormat, RunConfig, EXIT_INPUT};
use crate::interval::DEFAULT_TOL;
use crate::quasi::{CoverMode, Variant};
use crate::Budget;

#[derive(Debug, Parser)]
#[command(
    name = "qmcheck",
    version,
    about = "Check quasi-measure axioms and extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Where the witnesses for the meet and difference items come from.
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Restricted)]
    variant: VariantArg,

    /// Which covers cover subadditivity quantifies over.
    #[arg(long, global = true, value_enum, default_value_t = CoverModeArg::All)]
    cover_mode: CoverModeArg,

    /// Largest ground set for loops over all subsets.
    #[arg(long, global = true, default_value_t = Budget::default().max_exhaustive_n)]
    max_n: usize,

    /// Largest cover size for cover subadditivity.
    #[arg(long, global = true)]
    max_cover: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Check the quasi-measure axioms of an instance.
    Check { input: PathBuf },
    /// Exterior value of a set, with an optimal cover.
    Outer {
        input: PathBuf,
        /// Set expression (`A&!B`) or element labels (`"1 2"`).
        #[arg(long)]
        set: String,
    },
    /// Extend to the generated algebra and verify the result.
    Extend { input: PathBuf },
    /// Exponential survival example on [0, inf).
    Example {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the generated corpus over a seed range `A..B`.
    Search {
        #[arg(long, value_parser = parse_seed_range)]
        seeds: Range<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Literal,
    Restricted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoverModeArg {
    All,
    DisjointOnly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

/// Parses `A..B` (half-open).
pub fn parse_seed_range(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad start `{a}`: {e}"))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad end `{b}`: {e}"))?;
    if a >= b {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok(a..b)
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, input) = match cli.command {
            Sub::Check { input } => (Command::Check, Some(input)),
            Sub::Outer { input, set } => (Command::Outer { set }, Some(input)),
            Sub::Extend { input } => (Command::Extend, Some(input)),
            Sub::Example { samples, seed, tol } => (Command::Example { samples, seed, tol }, None),
            Sub::Search { seeds } => (Command::Search { seeds }, None),
        };
        RunConfig {
            command,
            input,
            variant: match cli.variant {
                VariantArg::Literal => Variant::Literal,
                VariantArg::Restricted => Variant::Restricted,
            },
            cover_mode: match cli.cover_mode {
                CoverModeArg::All => CoverMode::All,
                CoverModeArg::DisjointOnly => CoverMode::DisjointOnly,
            },
            max_n: cli.max_n,
            max_cover: cli.max_cover,
            format: match cli.format {
                FormatArg::Text => OutputFormat::Text,
                FormatArg::Machine => OutputFormat::Machine,
            },
            out: cli.out,
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.into()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                0
            }
        }
    }
}
