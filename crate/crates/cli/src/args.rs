use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maclip::{FixedWeights, Mode, ScoreConfig, SigmaSource};

#[derive(Debug, Parser)]
#[command(name = "maclip", version, about = "Training-free image quality scoring from CLIP embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every image in an embedding file
    Score(ScoreArgs),
    /// Correlate a score CSV with MOS
    Eval(EvalArgs),
    /// SRCC/PLCC across a grid of Box-Cox powers
    SweepLambda(SweepArgs),
    /// SRCC/PLCC for every branch, norm and fixed-weight variant
    Ablate(AblateArgs),
    /// Joined MOS/score table for scatter plots
    PlotData(PlotArgs),
}

/// Hyperparameters shared by every subcommand. Unset values take the library defaults.
#[derive(Debug, Clone, Args, Default)]
pub struct ConfigArgs {
    /// Which score goes into the q column [default: fused]
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Box-Cox power [default: 0.5]
    #[arg(long = "lambda", allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Fusion sensitivity to the cue discrepancy [default: 1.0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Softmax temperature of the similarity cue [default: 0.01]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Stability constant [default: 1e-8]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Prior-trust logit of the similarity cue [default: 1.0]
    #[arg(long, allow_negative_numbers = true)]
    pub base_sim: Option<f64>,
    /// Prior-trust logit of the magnitude cue [default: 0.6]
    #[arg(long, allow_negative_numbers = true)]
    pub base_mag: Option<f64>,
    /// Weights `W_SIM,W_MAG` for --mode fixed [default: 0.5,0.5]
    #[arg(long, value_parser = parse_weights)]
    pub fixed_weights: Option<FixedWeights>,
    /// Standard deviation of |F| (abs) or of F (raw) in the magnitude cue [default: abs]
    #[arg(long, value_parser = parse_sigma)]
    pub sigma_source: Option<SigmaSource>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> maclip::Result<ScoreConfig> {
        let d = ScoreConfig::default();
        let config = ScoreConfig {
            lambda: self.lambda.unwrap_or(d.lambda),
            alpha: self.alpha.unwrap_or(d.alpha),
            tau: self.tau.unwrap_or(d.tau),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            base_sim: self.base_sim.unwrap_or(d.base_sim),
            base_mag: self.base_mag.unwrap_or(d.base_mag),
            mode: self.mode.unwrap_or(d.mode),
            fixed_weights: self.fixed_weights.unwrap_or(d.fixed_weights),
            sigma_source: self.sigma_source.unwrap_or(d.sigma_source),
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: maclip::Error| e.to_string())
}

fn parse_sigma(s: &str) -> Result<SigmaSource, String> {
    s.parse().map_err(|e: maclip::Error| e.to_string())
}

fn parse_weights(s: &str) -> Result<FixedWeights, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected W_SIM,W_MAG, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    FixedWeights::new(num(a)?, num(b)?).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// MAE1 image embedding file
    #[arg(long)]
    pub embeddings: PathBuf,
    /// MAE1 prompt file (rows "pos" and "neg"); optional for mag, l1 and l2
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    /// Output CSV; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Score CSV written by `score`
    #[arg(long)]
    pub scores: PathBuf,
    /// MOS CSV with header image_id,mos
    #[arg(long)]
    pub mos: PathBuf,
    /// Output JSON; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also report PLCC after a 4-parameter logistic mapping
    #[arg(long)]
    pub logistic: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub prompts: Option<PathBuf>,
    #[arg(long)]
    pub mos: PathBuf,
    /// Box-Cox powers as START:STOP:STEP (inclusive)
    #[arg(long, default_value = "0:2:0.1")]
    pub grid: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub prompts: PathBuf,
    #[arg(long)]
    pub mos: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Add a logistic-mapped PLCC column
    #[arg(long)]
    pub logistic: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortKey {
    Id,
    Mos,
    Q,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub mos: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sort rows ascending by this column; score-file order when omitted
    #[arg(long, value_enum)]
    pub sort: Option<SortKey>,
}
