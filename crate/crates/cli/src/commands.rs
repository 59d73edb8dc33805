//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::anyhow;
use serde::Serialize;

use qmseg_core::imaging::{generate_phantom, save_mask_pgm, save_pgm, Lesion, PhantomSpec};
use qmseg_core::qfilter::apply_filter_detailed;
use qmseg_core::vqa::loss_history_csv;

use crate::config::{PipelineConfig, SolverKind};
use crate::error::{CliError, CliResult};
use crate::io::{read_image, read_mask, write_atomic};
use crate::pipeline::{prepare, resize_input, segment, segment_done, RunOptions, SegmentResult};

pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.1, 1.0, 10.0, 100.0];

/// Population standard deviation.
fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn cmd_filter(input: &Path, output: &Path, cfg: &PipelineConfig) -> CliResult<()> {
    let img = read_image(input)?;
    let (work, _) = resize_input(&img, cfg)?;
    let out = apply_filter_detailed(&work, &cfg.filter)?;
    let graph = qmseg_core::graph_qubo::build_graph(&out.image, cfg.bandwidth_factor);
    let omegas: Vec<String> = out
        .omegas
        .values()
        .iter()
        .map(|w| format!("{w:.6}"))
        .collect();
    eprintln!("omega: [{}]", omegas.join(", "));
    eprintln!("raw range: [{:.6e}, {:.6e}]", out.raw_min, out.raw_max);
    eprintln!("sigma_hat: {:.6e}", graph.sigma_hat);
    write_atomic(output, &save_pgm(&out.image, 65535)?)
}

pub fn cmd_segment(
    input: &Path,
    truth: Option<&Path>,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<()> {
    let img = read_image(input)?;
    let truth = truth.map(read_mask).transpose()?;
    let prep = prepare(&img, truth.as_ref(), cfg)?;
    let dir = &cfg.output_dir;
    match segment(&prep, cfg, opts)? {
        SegmentResult::AwaitingImport { export } => {
            eprintln!(
                "wrote {}; rerun with --import-samples <file> to finish",
                export.display()
            );
        }
        SegmentResult::Done(s) => {
            write_atomic(
                &dir.join("filtered.pgm"),
                &save_pgm(&s.formulation.filtered, 65535)?,
            )?;
            write_atomic(&dir.join("mask.pgm"), &save_mask_pgm(&s.mask))?;
            if let Some(w) = &s.warm_start {
                write_atomic(&dir.join("warm_start.pgm"), &save_mask_pgm(w))?;
            }
            if let Some(h) = &s.loss_history {
                write_atomic(
                    &dir.join("loss_history.csv"),
                    loss_history_csv(h).as_bytes(),
                )?;
            }
            let json = s.report.to_json() + "\n";
            write_atomic(&dir.join("report.json"), json.as_bytes())?;
            print!("{json}");
        }
    }
    Ok(())
}

/// One row of the α sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub dice: f64,
    pub iou: f64,
    pub energy: f64,
    pub elapsed_ms: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("alpha,dice,iou,energy,elapsed_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3}",
            r.alpha, r.dice, r.iou, r.energy, r.elapsed_ms
        );
    }
    out
}

pub fn run_sweep(
    input: &Path,
    truth: &Path,
    alphas: &[f64],
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(CliError::usage(anyhow!(
            "at least one alpha value is required"
        )));
    }
    let img = read_image(input)?;
    let truth = read_mask(truth)?;
    let prep = prepare(&img, Some(&truth), cfg)?;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let run_cfg = PipelineConfig {
            alpha,
            solver: SolverKind::Sa,
            ..cfg.clone()
        };
        run_cfg.validate()?;
        let s = segment_done(&prep, &run_cfg, opts)?;
        rows.push(SweepRow {
            alpha,
            dice: s.report.dice.unwrap_or(f64::NAN),
            iou: s.report.iou.unwrap_or(f64::NAN),
            energy: s.report.energy.unwrap_or(f64::NAN),
            elapsed_ms: s.report.elapsed.as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

pub fn cmd_sweep_alpha(
    input: &Path,
    truth: &Path,
    alphas: &[f64],
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<()> {
    let rows = run_sweep(input, truth, alphas, cfg, opts)?;
    let csv = sweep_csv(&rows);
    write_atomic(&cfg.output_dir.join("alpha_sweep.csv"), csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub image: String,
    pub solver_name: String,
    pub runs: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub dice: Option<f64>,
    pub iou: Option<f64>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub solver_name: String,
    pub runs: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub mean_dice: Option<f64>,
    pub mean_iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub solvers: Vec<SolverSummary>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    v.filter(|v| !v.is_empty())
        .map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn run_benchmark(
    inputs: &[PathBuf],
    truths: &[PathBuf],
    solvers: &[SolverKind],
    repeats: usize,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<BenchmarkReport> {
    if inputs.is_empty() {
        return Err(CliError::usage(anyhow!(
            "at least one input image is required"
        )));
    }
    if !truths.is_empty() && truths.len() != inputs.len() {
        return Err(CliError::usage(anyhow!(
            "got {} truth masks for {} images",
            truths.len(),
            inputs.len()
        )));
    }
    if solvers.is_empty() || repeats == 0 {
        return Err(CliError::usage(anyhow!(
            "need at least one solver and one repeat"
        )));
    }
    if solvers.contains(&SolverKind::External) {
        return Err(CliError::usage(anyhow!(
            "the external solver cannot be benchmarked"
        )));
    }
    let mut rows = Vec::new();
    for (k, input) in inputs.iter().enumerate() {
        let img = read_image(input)?;
        let truth = truths.get(k).map(|p| read_mask(p)).transpose()?;
        let prep = prepare(&img, truth.as_ref(), cfg)?;
        for &solver in solvers {
            let run_cfg = PipelineConfig {
                solver,
                ..cfg.clone()
            };
            let mut times = Vec::with_capacity(repeats);
            let mut first = None;
            for _ in 0..repeats {
                let t = Instant::now();
                let s = segment_done(&prep, &run_cfg, opts)?;
                times.push(if opts.no_timing {
                    0.0
                } else {
                    t.elapsed().as_secs_f64() * 1e3
                });
                first.get_or_insert(s.report);
            }
            let report = first.expect("at least one repeat");
            rows.push(BenchmarkRow {
                image: input.display().to_string(),
                solver_name: solver.name().to_string(),
                runs: repeats,
                mean_ms: times.iter().sum::<f64>() / repeats as f64,
                std_ms: std_dev(&times),
                min_ms: times.iter().copied().fold(f64::INFINITY, f64::min),
                max_ms: times.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                dice: report.dice,
                iou: report.iou,
                energy: report.energy,
            });
        }
    }
    let summaries = solvers
        .iter()
        .map(|s| {
            let mine: Vec<&BenchmarkRow> =
                rows.iter().filter(|r| r.solver_name == s.name()).collect();
            let runs: usize = mine.iter().map(|r| r.runs).sum();
            let means: Vec<f64> = mine.iter().map(|r| r.mean_ms).collect();
            SolverSummary {
                solver_name: s.name().to_string(),
                runs,
                mean_ms: means.iter().sum::<f64>() / means.len() as f64,
                std_ms: std_dev(&means),
                min_ms: mine.iter().map(|r| r.min_ms).fold(f64::INFINITY, f64::min),
                max_ms: mine
                    .iter()
                    .map(|r| r.max_ms)
                    .fold(f64::NEG_INFINITY, f64::max),
                mean_dice: mean_of(mine.iter().map(|r| r.dice)),
                mean_iou: mean_of(mine.iter().map(|r| r.iou)),
            }
        })
        .collect();
    Ok(BenchmarkReport {
        rows,
        solvers: summaries,
    })
}

pub fn benchmark_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("image,solver,runs,mean_ms,std_ms,min_ms,max_ms,dice,iou,energy\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{:.3},{:.3},{:.3},{},{},{}",
            r.image,
            r.solver_name,
            r.runs,
            r.mean_ms,
            r.std_ms,
            r.min_ms,
            r.max_ms,
            opt(r.dice),
            opt(r.iou),
            opt(r.energy)
        );
    }
    out
}

pub fn cmd_benchmark(
    inputs: &[PathBuf],
    truths: &[PathBuf],
    solvers: &[SolverKind],
    repeats: usize,
    cfg: &PipelineConfig,
    opts: &RunOptions,
) -> CliResult<()> {
    let report = run_benchmark(inputs, truths, solvers, repeats, cfg, opts)?;
    let csv = benchmark_csv(&report);
    let json = serde_json::to_string_pretty(&report).expect("benchmark report serializes") + "\n";
    write_atomic(&cfg.output_dir.join("benchmark.csv"), csv.as_bytes())?;
    write_atomic(&cfg.output_dir.join("benchmark.json"), json.as_bytes())?;
    print!("{csv}");
    Ok(())
}

/// Default truth path: `<stem>_mask.pgm` next to the image.
pub fn default_mask_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}_mask.pgm"))
}

pub fn cmd_phantom(spec: &PhantomSpec, output: &Path, mask: Option<&Path>) -> CliResult<()> {
    spec.validate().map_err(CliError::usage)?;
    let (img, truth) = generate_phantom(spec)?;
    let mask_path = mask
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_mask_path(output));
    if mask_path == output {
        return Err(CliError::usage(anyhow!("image and mask paths must differ")));
    }
    write_atomic(output, &save_pgm(&img, 65535)?)?;
    write_atomic(&mask_path, &save_mask_pgm(&truth))?;
    eprintln!("wrote {} and {}", output.display(), mask_path.display());
    Ok(())
}

/// Parses `cx,cy,r,intensity`.
pub fn parse_lesion(s: &str) -> Result<Lesion, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("lesion '{s}' must be cx,cy,r,intensity"));
    }
    let mut v = [0.0; 4];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| format!("lesion '{s}': '{p}' is not a number"))?;
    }
    Ok(Lesion {
        cx: v[0],
        cy: v[1],
        radius: v[2],
        intensity: v[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_of_single_run_is_zero() {
        assert_eq!(std_dev(&[12.5]), 0.0);
        assert!((std_dev(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lesions_parse() {
        let l = parse_lesion("21,21,5,0.9").unwrap();
        assert_eq!((l.cx, l.cy, l.radius, l.intensity), (21.0, 21.0, 5.0, 0.9));
        assert!(parse_lesion("1,2,3").is_err());
        assert!(parse_lesion("1,2,x,0.5").is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = [SweepRow {
            alpha: 0.1,
            dice: 1.0,
            iou: 1.0,
            energy: 0.5,
            elapsed_ms: 0.0,
        }];
        assert_eq!(
            sweep_csv(&rows),
            "alpha,dice,iou,energy,elapsed_ms\n0.1,1,1,0.5,0.000\n"
        );
    }

    #[test]
    fn mask_path_defaults_next_to_image() {
        assert_eq!(
            default_mask_path(Path::new("out/p.pgm")),
            PathBuf::from("out/p_mask.pgm")
        );
    }
}
