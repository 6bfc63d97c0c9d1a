//! `mcshane`: enumerate the elliptic-element tree, check the identity, export
//! intervals, estimate dimensions, scan branch ratios, render and verify.
//!
//! Exit codes: 0 success, 1 unmet tolerance or failed verification (or any
//! other runtime failure), 2 invalid configuration, 3 overlapping intervals.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcshane::Error;

use crate::commands::{RenderArgs, VerifyArgs};
use crate::config::{Common, ConfigError, FileConfig, RunConfig, Surface};

#[derive(Parser, Debug)]
#[command(name = "mcshane", version, about = "Elliptic-element trees and McShane's identity for once-punctured tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sum the interval widths and compare with 1/2.
    Identity(Common),
    /// List enumerated nodes.
    Tree(Common),
    /// List excision intervals and check that they are disjoint.
    Intervals(Common),
    /// Box-counting estimates of the complement.
    Dimension {
        #[command(flatten)]
        common: Common,
        /// Depths, e.g. `5-20` or `5,8,13`.
        #[arg(long)]
        depths: Option<String>,
        /// Comma-separated fixed scales, measured at the deepest depth.
        #[arg(long)]
        scales: Option<String>,
    },
    /// Branch ratios along a repeated block of moves.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Root tag and moves, e.g. `m` or `mLLR`.
        #[arg(long)]
        prefix: Option<String>,
        /// Block over L and R repeated after the prefix.
        #[arg(long)]
        block: Option<String>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// SVG picture of the uplift configuration.
    Render {
        #[command(flatten)]
        common: Common,
        /// `x_min,x_max,y_min,y_max` in plane units.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Any of uplift, isometric, intervals, punctures, hexagon.
        #[arg(long)]
        layers: Option<String>,
        #[arg(long)]
        width_px: Option<f64>,
        /// Largest arc-to-polyline distance, in pixels.
        #[arg(long)]
        sagitta: Option<f64>,
    },
    /// Run the property suite; the report is JSON.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        /// Corrupt a matrix entry of every node to check that the suite notices.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Identity(c) | Command::Tree(c) | Command::Intervals(c) => c,
            Command::Dimension { common, .. }
            | Command::Scan { common, .. }
            | Command::Render { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

fn dispatch<S: mcshane::Scalar>(
    p: &mcshane::FrickeParams<S>,
    cmd: &Command,
    cfg: &RunConfig,
    file: &FileConfig,
) -> anyhow::Result<ExitCode> {
    match cmd {
        Command::Identity(_) => commands::identity(p, cfg),
        Command::Tree(_) => commands::tree(p, cfg),
        Command::Intervals(_) => commands::intervals(p, cfg),
        Command::Dimension { depths, scales, .. } => commands::dimension(p, cfg, file, depths.as_deref(), scales.as_deref()),
        Command::Scan { prefix, block, iterations, .. } => {
            commands::scan(p, cfg, file, prefix.as_deref(), block.as_deref(), *iterations)
        }
        Command::Render { window, layers, width_px, sagitta, .. } => commands::render(
            p,
            cfg,
            file,
            RenderArgs { window: window.as_deref(), layers: layers.as_deref(), width_px: *width_px, sagitta_px: *sagitta },
        ),
        Command::Verify { seed, samples, nodes, inject_fault, .. } => commands::verify(
            p,
            cfg,
            file,
            VerifyArgs { seed: *seed, samples: *samples, nodes: *nodes, inject_fault: *inject_fault },
        ),
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let common = cli.command.common();
    let file = match &common.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(common, &file)?;
    match cfg.surface()? {
        Surface::Exact(p) => dispatch(&p, &cli.command, &cfg, &file),
        Surface::Real(p) => dispatch(&p, &cli.command, &cfg, &file),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::OverlapDetected(_)) => 3,
        Some(
            Error::EquationViolated { .. }
            | Error::OrderingViolated(_)
            | Error::NoRealRoot
            | Error::BudgetZero
            | Error::UnboundedBudget
            | Error::NuNotAtRoot
            | Error::DegenerateScales
            | Error::EmptyScene
            | Error::Parse(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
