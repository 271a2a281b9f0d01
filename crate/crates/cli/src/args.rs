use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tls_spectro::estimator::ShiftSign;
use tls_spectro::{Grid, Method, Range};

#[derive(Debug, Parser)]
#[command(name = "tls-spectro", version, about = "Two-tone spectroscopy simulation and TLS parameter estimation")]
pub struct Cli {
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, env = "TLS_SPECTRO_THREADS")]
    pub parallelism: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a labeled dataset of spectroscopy maps.
    Generate(GenerateArgs),
    /// Run the analytical estimator over a dataset.
    Estimate(EstimateArgs),
    /// Compare predictions or estimates with the dataset labels.
    Evaluate(EvaluateArgs),
    /// Export maps as grayscale PNG images.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Clean,
    Noisy,
}

/// `propagator`, `adaptive`, `adaptive:RTOL:ATOL` or `rk4:DT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodArg(pub Method);

impl FromStr for MethodArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let method = match parts.as_slice() {
            ["propagator"] => Method::Propagator,
            ["adaptive"] => Method::BULK_RK,
            ["adaptive", rtol, atol] => Method::Adaptive { rtol: num(rtol)?, atol: num(atol)? },
            ["rk4", dt] => Method::FixedRk4 { dt: num(dt)? },
            _ => return Err(format!("unknown method '{s}', expected propagator, adaptive[:RTOL:ATOL] or rk4:DT")),
        };
        Ok(MethodArg(method))
    }
}

/// `train,validation,test` sample counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitArg(pub [usize; 3]);

impl FromStr for SplitArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            &[a, b, c] => Ok(SplitArg([a, b, c])),
            _ => Err("expected three comma-separated counts TRAIN,VALIDATION,TEST".into()),
        }
    }
}

/// `lo:hi`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg(pub Range);

impl FromStr for RangeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("'{lo}': {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("'{hi}': {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("invalid range {lo}:{hi}"));
        }
        Ok(RangeArg(Range::new(lo, hi)))
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory; must not hold a dataset yet.
    #[arg(long)]
    pub out: PathBuf,
    /// Start from a saved configuration (run.json or manifest.json).
    /// Flags given explicitly override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of samples [default: 2200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Global seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noise mode [default: clean]
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// Per-sample noise width range in noisy mode, lo:hi.
    #[arg(long)]
    pub noise_width: Option<RangeArg>,
    /// Drive-frequency grid lo:hi:n in GHz.
    #[arg(long)]
    pub grid_omega: Option<Grid>,
    /// Pulse-length grid lo:hi:n in ns.
    #[arg(long)]
    pub grid_t: Option<Grid>,
    /// Drive amplitude A in GHz.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Solver: propagator, adaptive, adaptive:RTOL:ATOL or rk4:DT [default: propagator]
    #[arg(long)]
    pub method: Option<MethodArg>,
    /// Split sizes TRAIN,VALIDATION,TEST; defaults scale 1400/600/200 to n.
    #[arg(long, conflicts_with = "no_splits")]
    pub splits: Option<SplitArg>,
    /// Leave all samples unsplit
    #[arg(long)]
    pub no_splits: bool,
    /// Also write PNG previews.
    #[arg(long)]
    pub png: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RulesArg {
    /// All automatic rejection rules.
    Default,
    /// Only convergence, amplitude, peak collision and range checks.
    Minimal,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Dataset directory
    #[arg(long)]
    pub dataset: PathBuf,
    /// Estimates CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Start from a saved estimator configuration (the .run.json written
    /// next to an earlier estimates file).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Peak search half-width in GHz.
    #[arg(long)]
    pub window: Option<f64>,
    /// Sign of the dispersive correction: repulsion (ν̃ − ĝ²/Δ̃) or additive (ν̃ + ĝ²/Δ̃) [default: repulsion]
    #[arg(long)]
    pub shift_sign: Option<ShiftSign>,
    #[arg(long, value_enum)]
    pub rules: Option<RulesArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitFilter {
    Train,
    Validation,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset directory
    #[arg(long)]
    pub dataset: PathBuf,
    /// Predictions or estimates CSV, optionally named: NAME=PATH.
    #[arg(long = "predictions", required = true)]
    pub predictions: Vec<String>,
    /// Only score samples of this split.
    #[arg(long, value_enum, default_value = "all")]
    pub split: SplitFilter,
    /// Write the report here in addition to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write predicted-vs-target CSVs into this directory.
    #[arg(long)]
    pub scatter_dir: Option<PathBuf>,
    /// Detuning bins for the error trend of analytic estimates.
    #[arg(long, default_value_t = 5)]
    pub detuning_bins: usize,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Map files to render. With --dataset, sample indices may be given
    /// through --index instead.
    pub files: Vec<PathBuf>,
    /// Dataset directory; renders samples by index
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Sample index to render; repeatable
    #[arg(long, requires = "dataset")]
    pub index: Vec<usize>,
    /// Render every sample of the dataset.
    #[arg(long, requires = "dataset", conflicts_with = "index")]
    pub all: bool,
    /// Output directory, or the PNG path when rendering a single file.
    #[arg(long)]
    pub out: PathBuf,
}
