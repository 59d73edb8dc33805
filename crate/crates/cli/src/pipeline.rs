//! Segmentation pipeline: resize, filter, graph, QUBO, solve, report.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::anyhow;

use qmseg_core::annealing::{import_samples, solve_exact, solve_sa, MAX_EXACT_VARIABLES};
use qmseg_core::evaluation::{orient_bright_foreground, otsu_threshold, SegmentationReport};
use qmseg_core::graph_qubo::{build_graph, build_qubo};
use qmseg_core::imaging::{resize_area, resize_mask_majority};
use qmseg_core::qfilter::{apply_filter_detailed, OmegaLevels};
use qmseg_core::vqa::solve_vqa;
use qmseg_core::{BinaryMask, Error, GrayImage, PixelGraph, QuboProblem};

use crate::config::{PipelineConfig, Polarity, SolverKind};
use crate::error::{CliError, CliResult};

/// Input image and optional truth mask at working resolution.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub image: GrayImage,
    pub truth: Option<BinaryMask>,
    /// Whether the configured resize was applied.
    pub resized: bool,
}

/// Downsamples to `cfg.resize_to` when the image is at least that large.
pub fn resize_input(img: &GrayImage, cfg: &PipelineConfig) -> CliResult<(GrayImage, bool)> {
    match cfg.resize_to {
        Some((w, h)) if w <= img.width() && h <= img.height() => {
            if (w, h) == (img.width(), img.height()) {
                Ok((img.clone(), false))
            } else {
                Ok((resize_area(img, w, h)?, true))
            }
        }
        _ => Ok((img.clone(), false)),
    }
}

pub fn prepare(
    image: &GrayImage,
    truth: Option<&BinaryMask>,
    cfg: &PipelineConfig,
) -> CliResult<Prepared> {
    let (work, resized) = resize_input(image, cfg)?;
    let truth = match truth {
        None => None,
        Some(t) if (t.width(), t.height()) == (work.width(), work.height()) => Some(t.clone()),
        Some(t) if (t.width(), t.height()) == (image.width(), image.height()) => {
            Some(resize_mask_majority(t, work.width(), work.height())?)
        }
        Some(t) => {
            return Err(CliError::runtime(anyhow!(
                "truth mask is {}x{} but the image is {}x{} ({}x{} after resizing)",
                t.width(),
                t.height(),
                image.width(),
                image.height(),
                work.width(),
                work.height()
            )))
        }
    };
    Ok(Prepared {
        image: work,
        truth,
        resized,
    })
}

/// Filtered image, graph and QUBO for one configuration.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub filtered: GrayImage,
    pub omegas: OmegaLevels,
    pub graph: PixelGraph,
    pub problem: QuboProblem,
}

pub fn formulate(image: &GrayImage, cfg: &PipelineConfig) -> CliResult<Formulation> {
    let out = apply_filter_detailed(image, &cfg.filter)?;
    let graph = build_graph(&out.image, cfg.bandwidth_factor);
    let problem = build_qubo(&graph, cfg.alpha);
    Ok(Formulation {
        filtered: out.image,
        omegas: out.omegas,
        graph,
        problem,
    })
}

/// Everything a finished segmentation run produces.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub mask: BinaryMask,
    pub report: SegmentationReport,
    pub formulation: Formulation,
    /// Solver labels before polarity orientation.
    pub raw_labels: Vec<u8>,
    pub flipped: bool,
    pub warm_start: Option<BinaryMask>,
    pub loss_history: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum SegmentResult {
    Done(Box<Segmentation>),
    /// The QUBO was exported for an external sampler.
    AwaitingImport {
        export: PathBuf,
    },
}

/// Options that are not part of the pipeline configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Samples from an external sampler to complete a two-phase run.
    pub import_samples: Option<PathBuf>,
    /// Report zero durations so outputs are byte-reproducible.
    pub no_timing: bool,
}

pub fn export_path(cfg: &PipelineConfig) -> PathBuf {
    cfg.output_dir.join("problem.qubo")
}

pub fn segment(
    prep: &Prepared,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<SegmentResult> {
    let start = Instant::now();
    let form = formulate(&prep.image, cfg)?;
    let n = form.problem.n;
    let solver = if opts.import_samples.is_some() {
        SolverKind::External
    } else {
        cfg.solver
    };
    let mut warm_start = None;
    let mut loss_history = None;
    let labels = match solver {
        SolverKind::Exact => {
            if n > MAX_EXACT_VARIABLES {
                return Err(CliError::usage(anyhow!(
                    "solver=exact handles at most {MAX_EXACT_VARIABLES} pixels, the image has {n}; use --resize"
                )));
            }
            solve_exact(&form.problem)?.best
        }
        SolverKind::Sa => solve_sa(&form.problem, &cfg.sa_config())?.best,
        SolverKind::Vqa => {
            let run = solve_vqa(&form.filtered, &form.graph, cfg.alpha, &cfg.vqa_config())?;
            warm_start = Some(run.warm_start);
            loss_history = Some(run.training.loss_history);
            run.outcome.best
        }
        SolverKind::Otsu => otsu_threshold(&prep.image, cfg.otsu_bins)?
            .mask
            .bits()
            .to_vec(),
        SolverKind::External => match &opts.import_samples {
            Some(path) => import(&form.problem, path)?,
            None => {
                let export = export_path(cfg);
                let bytes = qmseg_core::graph_qubo::serialize_qubo(&form.problem);
                crate::io::write_atomic(&export, &bytes)?;
                return Ok(SegmentResult::AwaitingImport { export });
            }
        },
    };
    let energy = form.problem.energy(&labels)?;
    let raw = BinaryMask::new(prep.image.width(), prep.image.height(), labels.clone())?;
    let (mask, flipped) = match cfg.polarity {
        Polarity::Bright => orient_bright_foreground(&raw, &prep.image)?,
        Polarity::AsIs => (raw, false),
    };
    let elapsed = if opts.no_timing {
        Duration::ZERO
    } else {
        start.elapsed()
    };
    let report = SegmentationReport::new(
        &mask,
        prep.truth.as_ref(),
        solver.name(),
        elapsed,
        Some(energy),
    )?;
    Ok(SegmentResult::Done(Box::new(Segmentation {
        mask,
        report,
        formulation: form,
        raw_labels: labels,
        flipped,
        warm_start,
        loss_history,
    })))
}

fn import(problem: &QuboProblem, path: &Path) -> CliResult<Vec<u8>> {
    if !path.exists() {
        return Err(CliError::usage(anyhow!(
            "sample file {} not found",
            path.display()
        )));
    }
    match import_samples(problem, path) {
        Ok(outcome) => Ok(outcome.best),
        Err(e @ (Error::Parse { .. } | Error::Integrity { .. })) => Err(CliError::runtime(
            anyhow::Error::new(e).context(format!("rejected samples in {}", path.display())),
        )),
        Err(e) => Err(e.into()),
    }
}

/// Runs a segmentation that must finish in-process (no external export).
pub fn segment_done(
    prep: &Prepared,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<Segmentation> {
    match segment(prep, cfg, opts)? {
        SegmentResult::Done(s) => Ok(*s),
        SegmentResult::AwaitingImport { .. } => Err(CliError::usage(anyhow!(
            "the external solver needs a two-phase segment run"
        ))),
    }
}
