//! `pcm`: command-line front end for exact p-cyclic monotonicity tools.
//!
//! Exit codes: 0 success, 1 not monotone or violation found, 2 usage,
//! parse or dimension errors.

mod commands;
mod doc;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pcm_core::verify::DEFAULT_BUDGET;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] pcm_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(pcm_core::Error::NotCyclicallyMonotone { .. })
            | CliError::Core(pcm_core::Error::NotPerpendicular { .. }) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pcm",
    version,
    about = "Exact tools for p-cyclically monotone operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Operator document (JSON), or `-` for stdin.
    input: PathBuf,
    /// Cycle order: cycles have p+1 entries.
    #[arg(long)]
    p: usize,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    /// Domain points in order of first appearance in the document.
    Input,
    /// Domain points sorted lexicographically.
    Lex,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide p-cyclic monotonicity by enumerating all cycles.
    Check(#[command(flatten)] Common),
    /// Run the construction on a seed and emit the full trace.
    Construct {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        engine: Option<String>,
        #[arg(long, value_enum, default_value_t = Order::Input)]
        order: Order,
    },
    /// H-representation of the polar fiber at z0.
    Fiber {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long)]
        engine: Option<String>,
    },
    /// Vertices, rays and lineality of the polar fiber at z0.
    Vertices {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long)]
        engine: Option<String>,
    },
    /// Whether z0 is in the domain of the polar, with an LP certificate.
    Domain {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
    },
    /// Ñ(z1, zp*).
    Ntilde {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        #[arg(long, allow_hyphen_values = true)]
        zps: String,
    },
    /// M̃(z0, z1).
    Mtilde {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
    },
    /// Certify the closed chain through the document's points, in order.
    ChainCheck(#[command(flatten)] Common),
    /// Search for a positive cycle by random sampling, then exhaustively.
    Falsify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Draw a 2-dimensional trace as SVG.
    Render {
        /// Trace document produced by `construct`, or `-` for stdin.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = svg::View::Domain)]
        what: svg::View,
        /// xmin,ymin,xmax,ymax
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pcm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
