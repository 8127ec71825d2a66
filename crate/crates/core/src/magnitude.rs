//! Magnitude cue.
//!
//! Cosine similarity throws away the length of the image embedding. The
//! magnitude cue keeps it, but in a form that does not depend on the overall
//! scale of the vector:
//!
//! 1. take absolute activations `|F_d|`;
//! 2. divide by their standard deviation over the `D` dimensions (plus `ε`);
//! 3. apply the shifted Box-Cox transform `((x + 1)^λ − 1) / λ`, or
//!    `ln(x + 1)` at `λ = 0`;
//! 4. average over dimensions.
//!
//! Step 2 makes the score invariant to multiplying the embedding by a
//! positive constant. The plain L1/L2 summaries in [`q_mag_variant`] are not,
//! which is what they are kept around to demonstrate.

use serde::{Deserialize, Serialize};

use crate::config::{ScoreConfig, SigmaSource};
use crate::error::{Error, Result};

/// Standard deviations below this mark a row as degenerate.
pub const DEGENERATE_SIGMA: f64 = 1e-6;

/// Below this |λ| the transform is evaluated as `expm1(λ·ln1p(x))/λ`.
const SMALL_LAMBDA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeVariant {
    BoxCox,
    L1,
    L2,
}

/// Magnitude score of one image together with the statistic it was normalized by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeBreakdown {
    pub sigma: f64,
    pub q_mag: f64,
    pub variant: MagnitudeVariant,
}

impl MagnitudeBreakdown {
    /// True when the activations were (nearly) constant and the normalization blew up.
    pub fn is_degenerate(&self) -> bool {
        self.variant == MagnitudeVariant::BoxCox && self.sigma < DEGENERATE_SIGMA
    }
}

/// Shifted Box-Cox transform of a non-negative value.
pub fn boxcox(x: f64, lambda: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::NegativeInput(x));
    }
    Ok(boxcox_unchecked(x, lambda))
}

#[inline]
fn boxcox_unchecked(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.ln_1p()
    } else if lambda.abs() < SMALL_LAMBDA {
        (lambda * x.ln_1p()).exp_m1() / lambda
    } else {
        ((x + 1.0).powf(lambda) - 1.0) / lambda
    }
}

/// Mean Box-Cox value of an already-normalized, non-negative profile.
pub fn transformed_mean(normalized: &[f64], lambda: f64) -> Result<f64> {
    if normalized.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut sum = 0.0;
    for &x in normalized {
        sum += boxcox(x, lambda)?;
    }
    Ok(sum / normalized.len() as f64)
}

/// Population standard deviation, two-pass, fixed left-to-right summation.
pub(crate) fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / n as f64).sqrt()
}

fn check_row(row: &[f64]) -> Result<()> {
    if row.is_empty() {
        return Err(Error::EmptyVector);
    }
    if row.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { what: "embedding row" });
    }
    Ok(())
}

/// Box-Cox magnitude score of one embedding row.
pub fn q_mag(image_row: &[f64], config: &ScoreConfig) -> Result<MagnitudeBreakdown> {
    check_row(image_row)?;
    let abs = image_row.iter().map(|v| v.abs());
    let sigma = match config.sigma_source {
        SigmaSource::Abs => population_std(abs.clone()),
        SigmaSource::Raw => population_std(image_row.iter().copied()),
    };
    let scale = sigma + config.epsilon;
    let sum: f64 = abs.map(|a| boxcox_unchecked(a / scale, config.lambda)).sum();
    Ok(MagnitudeBreakdown {
        sigma,
        q_mag: sum / image_row.len() as f64,
        variant: MagnitudeVariant::BoxCox,
    })
}

/// Unnormalized magnitude summaries: mean |F| (`L1`) or ‖F‖₂/√D (`L2`).
///
/// Passing [`MagnitudeVariant::BoxCox`] is an error; use [`q_mag`] for that.
pub fn q_mag_variant(image_row: &[f64], variant: MagnitudeVariant) -> Result<f64> {
    check_row(image_row)?;
    let d = image_row.len() as f64;
    match variant {
        MagnitudeVariant::L1 => Ok(image_row.iter().map(|v| v.abs()).sum::<f64>() / d),
        MagnitudeVariant::L2 => Ok((image_row.iter().map(|v| v * v).sum::<f64>() / d).sqrt()),
        MagnitudeVariant::BoxCox => Err(Error::InvalidConfig(
            "q_mag_variant takes l1 or l2; Box-Cox needs a ScoreConfig".into(),
        )),
    }
}

/// 1-D Wasserstein-1 distance between two equal-size empirical distributions.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyVector);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { what: "distribution sample" });
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    let (sa, sb) = (sorted(a), sorted(b));
    let total: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / a.len() as f64)
}
