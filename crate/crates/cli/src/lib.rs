//! The `qmseg` command-line pipeline.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qmseg_core::imaging::{Lesion, PhantomSpec};

use config::{PipelineArgs, Size, SolverKind};
use error::{CliError, CliResult};
use pipeline::RunOptions;

#[derive(Debug, Parser)]
#[command(
    name = "qmseg",
    version,
    about = "Unsupervised image segmentation via QUBO"
)]
pub struct Cli {
    /// Report zero durations so every artifact is byte-reproducible
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the quantum-inspired filter to a PGM image
    Filter {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Segment an image with the selected solver
    Segment {
        input: PathBuf,
        /// Ground-truth mask PGM; enables Dice and IoU
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Samples from an external sampler for the exported problem
        #[arg(long)]
        import_samples: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Segment with simulated annealing for several alpha values
    SweepAlpha {
        input: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Comma-separated alpha values
        #[arg(long, value_delimiter = ',', default_values_t = commands::DEFAULT_ALPHAS)]
        alphas: Vec<f64>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Time every solver on every input
    Benchmark {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Truth masks, one per input in order
        #[arg(long)]
        truth: Vec<PathBuf>,
        /// Comma-separated solvers
        #[arg(long, value_delimiter = ',', default_value = "otsu,sa,vqa")]
        solvers: Vec<SolverKind>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Generate a synthetic phantom and its truth mask
    Phantom(PhantomArgs),
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// Frame size, e.g. 42x42
    #[arg(long)]
    pub size: Size,
    /// Disc lesion cx,cy,r,intensity (repeatable)
    #[arg(long, value_parser = commands::parse_lesion)]
    pub lesion: Vec<Lesion>,
    #[arg(long, default_value_t = 0.1)]
    pub background: f64,
    /// Half-width of uniform additive noise
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Truth mask path (default: <output stem>_mask.pgm)
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let opts = |import_samples: Option<PathBuf>| RunOptions {
        import_samples,
        no_timing: cli.no_timing,
    };
    match cli.command {
        Command::Filter {
            ref input,
            ref output,
            ref pipeline,
        } => commands::cmd_filter(input, output, &pipeline.resolve()?),
        Command::Segment {
            ref input,
            ref truth,
            ref import_samples,
            ref pipeline,
        } => commands::cmd_segment(
            input,
            truth.as_deref(),
            &pipeline.resolve()?,
            &opts(import_samples.clone()),
        ),
        Command::SweepAlpha {
            ref input,
            ref truth,
            ref alphas,
            ref pipeline,
        } => commands::cmd_sweep_alpha(input, truth, alphas, &pipeline.resolve()?, &opts(None)),
        Command::Benchmark {
            ref inputs,
            ref truth,
            ref solvers,
            repeats,
            ref pipeline,
        } => commands::cmd_benchmark(
            inputs,
            truth,
            solvers,
            repeats,
            &pipeline.resolve()?,
            &opts(None),
        ),
        Command::Phantom(ref a) => {
            let (width, height) = a
                .size
                .0
                .ok_or_else(|| CliError::usage(anyhow::anyhow!("phantom size cannot be 'none'")))?;
            let spec = PhantomSpec {
                width,
                height,
                lesions: a.lesion.clone(),
                background: a.background,
                noise: a.noise,
                seed: a.seed,
            };
            commands::cmd_phantom(&spec, &a.output, a.mask.as_deref())
        }
    }
}
