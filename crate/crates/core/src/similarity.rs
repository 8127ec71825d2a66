//! Prompt-similarity cue.
//!
//! An image is scored by how much closer its embedding points to the positive
//! prompt than to the negative one. The two cosine similarities go through a
//! two-way softmax at temperature `tau`, which is the same as a logistic of
//! the similarity gap divided by `tau`:
//!
//! ```text
//! q_sim = exp(s⁺/τ) / (exp(s⁺/τ) + exp(s⁻/τ)) = σ((s⁺ − s⁻)/τ)
//! ```
//!
//! Only the gap form is evaluated, so `tau` can be tiny without overflow.

use crate::config::ScoreConfig;
use crate::error::{Error, Result};
use crate::io::PromptPair;

/// Default floor for vector norms in [`cosine`].
pub const DEFAULT_MIN_NORM: f64 = 1e-8;

/// Largest `f64` below 1.
const MAX_BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Cosine similarities of one image against the two prompts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityPair {
    pub s_pos: f64,
    pub s_neg: f64,
}

impl SimilarityPair {
    /// `q_sim` for this pair at temperature `tau`.
    ///
    /// Kept inside the open interval `(0, 1)` even when the logistic saturates
    /// in `f64`; the clamp moves the value by at most one ulp of 1.0.
    pub fn quality(&self, tau: f64) -> f64 {
        open_unit(logistic((self.s_pos - self.s_neg) / tau))
    }
}

/// Clamps a probability into the open interval `(0, 1)`.
pub(crate) fn open_unit(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, MAX_BELOW_ONE)
}

/// Numerically stable logistic function `1 / (1 + e^{-z})`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity, erroring when either norm is at or below `min_norm`.
pub fn cosine_with_min_norm(a: &[f64], b: &[f64], min_norm: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    let (na, nb) = (norm(a), norm(b));
    if !(na.is_finite() && nb.is_finite()) {
        return Err(Error::NonFiniteInput { what: "cosine operand" });
    }
    for n in [na, nb] {
        if n <= min_norm {
            return Err(Error::ZeroNorm { norm: n, min: min_norm });
        }
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine similarity of two equal-length vectors.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    cosine_with_min_norm(a, b, DEFAULT_MIN_NORM)
}

pub fn similarity_pair(image_row: &[f64], prompts: &PromptPair, min_norm: f64) -> Result<SimilarityPair> {
    if image_row.len() != prompts.dim() {
        return Err(Error::DimensionMismatch {
            context: "image embedding",
            expected: prompts.dim(),
            found: image_row.len(),
        });
    }
    Ok(SimilarityPair {
        s_pos: cosine_with_min_norm(image_row, prompts.pos(), min_norm)?,
        s_neg: cosine_with_min_norm(image_row, prompts.neg(), min_norm)?,
    })
}

/// Prompt-similarity quality of one image, strictly inside `(0, 1)`.
pub fn q_sim(image_row: &[f64], prompts: &PromptPair, config: &ScoreConfig) -> Result<f64> {
    Ok(similarity_pair(image_row, prompts, config.epsilon)?.quality(config.tau))
}
