//! Batch front-end of the `mapgf` library.

mod commands;
mod config;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mapgf::maps::MapError;
use mapgf::pipeline::PipelineError;
use mapgf::scheme::SchemeError;

use sources::{Capability, Source};

#[derive(Parser, Debug)]
#[command(name = "mapgf", version, about = "Counting series, composition schemes and singular germs of planar map families")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest map size the exhaustive oracle may enumerate.
    #[arg(long, global = true)]
    pub oracle_cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct StatArgs {
    /// Marker by name: t, x<l>, xh<l>, xr<l>, xhr<l>, xp:<pattern>, xpr:<pattern>.
    #[arg(long = "stat")]
    pub stat: Vec<String>,
    /// Non-root faces of degree L.
    #[arg(long)]
    pub face: Vec<usize>,
    /// Non-root pure L-gons.
    #[arg(long)]
    pub ellgon: Vec<usize>,
    /// Degree of the root face.
    #[arg(long)]
    pub root_degree: bool,
}

#[derive(Args, Debug, Default, Clone)]
pub struct OutArgs {
    /// json, csv or text, depending on the command.
    #[arg(long)]
    pub format: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Counting series of a family, as canonical JSON or text.
    Series {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        stats: StatArgs,
        #[arg(long, value_enum, default_value = "auto")]
        source: Source,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check composition schemes; exit status 2 on a nonzero residual.
    Verify {
        #[arg(long)]
        scheme: Vec<String>,
        /// Every builtin scheme.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        order: Option<usize>,
        /// Take both sides from the oracle instead of extracting the outer one.
        #[arg(long)]
        oracle: bool,
        /// Compare against `<dir>/<scheme>/{inner,outer}.json`.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Write the series used into `<dir>/<scheme>/`.
        #[arg(long)]
        write_golden: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Radius and exponent estimates; exit status 4 if a spread is too large.
    Singularity {
        /// Families to estimate (default: all).
        #[arg(long)]
        family: Vec<String>,
        #[arg(long)]
        order: Option<usize>,
        /// Add CLT columns for non-root faces of this degree (M1 and B1).
        #[arg(long)]
        face: Option<usize>,
        #[arg(long)]
        step: Option<String>,
        #[arg(long)]
        max_spread: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mean and variance constants of a marker.
    Clt {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        face: Option<usize>,
        #[arg(long)]
        ellgon: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        step: Option<String>,
        #[arg(long)]
        max_spread: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Operations on 3/2-singular germs given as JSON.
    Germ {
        #[command(subcommand)]
        op: GermOp,
    },
    /// Enumerated maps.
    Map {
        #[command(subcommand)]
        op: MapOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum GermOp {
    /// Inverse germ of `u = f(z)`.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer through the pair `u = f1(z,x)`, `v = f2(z,x)`.
    Transfer {
        #[arg(long)]
        f1: PathBuf,
        #[arg(long)]
        f2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum MapOp {
    /// One line per rooted map: `n;sigma-cycles;alpha-pairs;root`.
    Dump {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit statuses besides 0 and the generic 1.
pub const VERIFY_FAILED: u8 = 2;
pub const CAPABILITY: u8 = 3;
pub const ESTIMATOR_WARNING: u8 = 4;

fn is_capability(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<Capability>()
            || matches!(c.downcast_ref::<MapError>(), Some(MapError::SizeLimit { .. }))
            || matches!(c.downcast_ref::<SchemeError>(), Some(SchemeError::InsufficientOrder { .. }))
            || matches!(c.downcast_ref::<PipelineError>(), Some(PipelineError::Unsupported(_)))
    })
}

fn set_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MAPGF_THREADS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("MAPGF_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("MAPGF_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match set_threads().and_then(|_| commands::run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_capability(&e) { CAPABILITY } else { 1 })
        }
    }
}
