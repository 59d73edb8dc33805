//! Pipeline configuration: defaults, TOML files and flag overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use qmseg_core::annealing::SaConfig;
use qmseg_core::qfilter::FilterConfig;
use qmseg_core::seed::derive_seed;
use qmseg_core::vqa::VqaConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Sa,
    Vqa,
    Otsu,
    External,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Sa => "sa",
            Self::Vqa => "vqa",
            Self::Otsu => "otsu",
            Self::External => "external",
        }
    }
}

impl FromStr for SolverKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.trim() {
            "exact" => Ok(Self::Exact),
            "sa" => Ok(Self::Sa),
            "vqa" => Ok(Self::Vqa),
            "otsu" => Ok(Self::Otsu),
            "external" => Ok(Self::External),
            other => Err(anyhow!("unknown solver '{other}'")),
        }
    }
}

/// How solver labels map to foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// The class with the higher mean input intensity is foreground.
    Bright,
    /// Label 1 is foreground.
    AsIs,
}

/// Output size, or `none` to keep the input size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Size(pub Option<(usize, usize)>);

impl FromStr for Size {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Self(None));
        }
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| anyhow!("size '{s}' must look like 42x42"))?;
        let w: usize = w
            .trim()
            .parse()
            .with_context(|| format!("bad width in '{s}'"))?;
        let h: usize = h
            .trim()
            .parse()
            .with_context(|| format!("bad height in '{s}'"))?;
        if w == 0 || h == 0 {
            return Err(anyhow!("size '{s}' must be positive"));
        }
        Ok(Self(Some((w, h))))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub filter: FilterConfig,
    pub alpha: f64,
    pub bandwidth_factor: f64,
    pub solver: SolverKind,
    pub sa: SaConfig,
    pub vqa: VqaConfig,
    /// `[width, height]`; absent means no resizing.
    pub resize_to: Option<(usize, usize)>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub polarity: Polarity,
    pub otsu_bins: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            alpha: 0.1,
            bandwidth_factor: 0.5,
            solver: SolverKind::Vqa,
            sa: SaConfig::default(),
            vqa: VqaConfig::default(),
            resize_to: Some((42, 42)),
            output_dir: PathBuf::from("qmseg-out"),
            seed: 0,
            polarity: Polarity::Bright,
            otsu_bins: 256,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .map_err(CliError::usage)?;
        toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))
            .map_err(CliError::usage)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.filter.validate()?;
        self.sa.validate()?;
        self.vqa.validate()?;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(CliError::usage(anyhow!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.bandwidth_factor > 0.0 && self.bandwidth_factor.is_finite()) {
            return Err(CliError::usage(anyhow!(
                "bandwidth factor must be > 0, got {}",
                self.bandwidth_factor
            )));
        }
        if self.otsu_bins < 2 {
            return Err(CliError::usage(anyhow!("otsu bins must be >= 2")));
        }
        Ok(())
    }

    /// Simulated-annealing settings with the seed derived from the root seed.
    pub fn sa_config(&self) -> SaConfig {
        SaConfig {
            seed: derive_seed(self.seed, "sa"),
            ..self.sa.clone()
        }
    }

    /// Variational settings with the seed derived from the root seed.
    pub fn vqa_config(&self) -> VqaConfig {
        VqaConfig {
            seed: derive_seed(self.seed, "vqa"),
            ..self.vqa.clone()
        }
    }
}

/// Flag overrides shared by the pipeline commands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct PipelineArgs {
    /// TOML configuration file; flags take precedence over its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Smoothness weight of the QUBO
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Similarity bandwidth as a multiple of std(z)
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Downsample target such as 42x42, or `none`
    #[arg(long)]
    pub resize: Option<Size>,
    /// Root seed; component seeds are derived from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub polarity: Option<Polarity>,
    #[arg(long)]
    pub otsu_bins: Option<usize>,

    /// Filter steepness
    #[arg(long)]
    pub mu: Option<f64>,
    /// Filter gray levels
    #[arg(long)]
    pub levels: Option<usize>,
    /// Filter quantile for the second gray level
    #[arg(long)]
    pub percentile: Option<f64>,
    /// Skip min-max normalization of the filter output
    #[arg(long)]
    pub no_normalize: bool,

    #[arg(long)]
    pub reads: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub beta_start: Option<f64>,
    #[arg(long)]
    pub beta_end: Option<f64>,

    #[arg(long)]
    pub layers: Option<usize>,
    /// Warm-start threshold on the filtered image
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub init_spread: Option<f64>,
}

impl PipelineArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> CliResult<PipelineConfig> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::from_toml_file(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $flag:expr) => {
                if let Some(v) = $flag {
                    $field = v;
                }
            };
        }
        set!(c.alpha, self.alpha);
        set!(c.bandwidth_factor, self.bandwidth);
        set!(c.solver, self.solver);
        set!(c.resize_to, self.resize.map(|s| s.0));
        set!(c.seed, self.seed);
        set!(c.output_dir, self.out.clone());
        set!(c.polarity, self.polarity);
        set!(c.otsu_bins, self.otsu_bins);
        set!(c.filter.mu, self.mu);
        set!(c.filter.levels, self.levels);
        set!(c.filter.percentile, self.percentile);
        if self.no_normalize {
            c.filter.normalize_output = false;
        }
        set!(c.sa.reads, self.reads);
        set!(c.sa.sweeps, self.sweeps);
        set!(c.sa.beta_start, self.beta_start);
        set!(c.sa.beta_end, self.beta_end);
        set!(c.vqa.layers, self.layers);
        set!(c.vqa.threshold, self.threshold);
        set!(c.vqa.learning_rate, self.lr);
        set!(c.vqa.epochs, self.epochs);
        set!(c.vqa.init_spread, self.init_spread);
        c.validate()?;
        Ok(c)
    }
}
