//! Scoring hyperparameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which score ends up in the `q` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Confidence-weighted fusion of the similarity and magnitude cues.
    #[default]
    Fused,
    /// Prompt similarity only.
    Sim,
    /// Box-Cox magnitude only.
    Mag,
    /// Mean absolute activation.
    L1,
    /// Euclidean norm divided by the square root of the dimension.
    L2,
    /// Fixed convex combination given by [`ScoreConfig::fixed_weights`].
    Fixed,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Fused, Mode::Sim, Mode::Mag, Mode::L1, Mode::L2, Mode::Fixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fused => "fused",
            Mode::Sim => "sim",
            Mode::Mag => "mag",
            Mode::L1 => "l1",
            Mode::L2 => "l2",
            Mode::Fixed => "fixed",
        }
    }

    /// Whether the mode needs prompt embeddings to produce `q`.
    pub fn needs_prompts(self) -> bool {
        matches!(self, Mode::Fused | Mode::Sim | Mode::Fixed)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mode {s:?}")))
    }
}

/// What the per-image standard deviation in the magnitude cue is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SigmaSource {
    /// Standard deviation of the absolute activations `|F|`.
    #[default]
    Abs,
    /// Standard deviation of the signed activations `F`.
    Raw,
}

impl FromStr for SigmaSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" => Ok(SigmaSource::Abs),
            "raw" => Ok(SigmaSource::Raw),
            _ => Err(Error::InvalidConfig(format!("unknown sigma source {s:?}"))),
        }
    }
}

/// Weights for [`Mode::Fixed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedWeights {
    pub w_sim: f64,
    pub w_mag: f64,
}

impl FixedWeights {
    const SIMPLEX_TOL: f64 = 1e-9;

    pub fn new(w_sim: f64, w_mag: f64) -> Result<Self> {
        let w = FixedWeights { w_sim, w_mag };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.w_sim.is_finite()
            && self.w_mag.is_finite()
            && self.w_sim >= 0.0
            && self.w_mag >= 0.0
            && (self.w_sim + self.w_mag - 1.0).abs() <= Self::SIMPLEX_TOL;
        if ok {
            Ok(())
        } else {
            Err(Error::NotOnSimplex {
                w_sim: self.w_sim,
                w_mag: self.w_mag,
            })
        }
    }
}

impl Default for FixedWeights {
    fn default() -> Self {
        FixedWeights { w_sim: 0.5, w_mag: 0.5 }
    }
}

/// Every knob of the scorer. [`ScoreConfig::default`] gives the reference setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Box-Cox power.
    pub lambda: f64,
    /// Sensitivity of the fusion weights to the cue discrepancy.
    pub alpha: f64,
    /// Softmax temperature of the prompt similarity cue.
    pub tau: f64,
    /// Stability constant added to the standard deviation and used as the norm floor.
    pub epsilon: f64,
    /// Prior-trust logit of the similarity cue.
    pub base_sim: f64,
    /// Prior-trust logit of the magnitude cue.
    pub base_mag: f64,
    pub mode: Mode,
    pub fixed_weights: FixedWeights,
    pub sigma_source: SigmaSource,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            lambda: 0.5,
            alpha: 1.0,
            tau: 0.01,
            epsilon: 1e-8,
            base_sim: 1.0,
            base_mag: 0.6,
            mode: Mode::Fused,
            fixed_weights: FixedWeights::default(),
            sigma_source: SigmaSource::Abs,
        }
    }
}

impl ScoreConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !self.lambda.is_finite() {
            return bad(format!("lambda must be finite, got {}", self.lambda));
        }
        if !(self.base_sim.is_finite() && self.base_mag.is_finite()) {
            return bad("base constants must be finite".to_string());
        }
        if self.mode == Mode::Fixed {
            self.fixed_weights.validate()?;
        }
        Ok(())
    }
}
