//! Confidence-guided fusion of the two cues.
//!
//! The signed discrepancy `Δ = q_sim − q_mag` shifts two logits in opposite
//! directions,
//!
//! ```text
//! γ_sim = base_sim + αΔ,   γ_mag = base_mag − αΔ,
//! ```
//!
//! and a softmax over them gives the weights of a convex combination. A
//! two-way softmax is a logistic of the logit gap, so
//! `w_sim = σ(base_sim − base_mag + 2αΔ)`; that is what gets evaluated.
//!
//! The cues are fused on their native scales. `q_sim` lives in `(0, 1)` while
//! `q_mag` is unbounded above, so the fused `q` is not confined to `[0, 1]`.
//!
//! Weights are kept strictly inside `(0, 1)`: a saturated logistic is clamped
//! one ulp away from 0 or 1, so the pair still sums to 1 within 1e-16.

use serde::{Deserialize, Serialize};

use crate::config::{FixedWeights, ScoreConfig};
use crate::error::{Error, Result};
use crate::similarity::{logistic, open_unit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionWeights {
    pub w_sim: f64,
    pub w_mag: f64,
    pub delta: f64,
}

/// Scores of one image as written to the score CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub id: String,
    /// Absent when the run had no prompt embeddings.
    pub q_sim: Option<f64>,
    pub q_mag: f64,
    pub w_sim: f64,
    pub w_mag: f64,
    pub q: f64,
    pub degenerate: bool,
}

fn check_finite(q_sim: f64, q_mag: f64) -> Result<()> {
    if q_sim.is_finite() && q_mag.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteInput { what: "fusion input" })
    }
}

/// Adaptive weights for one image.
pub fn fusion_weights(q_sim: f64, q_mag: f64, config: &ScoreConfig) -> Result<FusionWeights> {
    check_finite(q_sim, q_mag)?;
    if !(config.alpha >= 0.0 && config.alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be non-negative, got {}", config.alpha)));
    }
    let delta = q_sim - q_mag;
    let gap = (config.base_sim - config.base_mag) + 2.0 * config.alpha * delta;
    Ok(FusionWeights {
        w_sim: open_unit(logistic(gap)),
        w_mag: open_unit(logistic(-gap)),
        delta,
    })
}

/// Fused quality and the weights that produced it.
pub fn fuse(q_sim: f64, q_mag: f64, config: &ScoreConfig) -> Result<(FusionWeights, f64)> {
    let w = fusion_weights(q_sim, q_mag, config)?;
    Ok((w, w.w_sim * q_sim + w.w_mag * q_mag))
}

/// Fixed convex combination `w_sim·q_sim + w_mag·q_mag`.
pub fn fuse_fixed(q_sim: f64, q_mag: f64, w_sim: f64, w_mag: f64) -> Result<f64> {
    check_finite(q_sim, q_mag)?;
    FixedWeights::new(w_sim, w_mag)?;
    Ok(w_sim * q_sim + w_mag * q_mag)
}
