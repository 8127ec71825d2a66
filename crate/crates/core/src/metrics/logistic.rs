//! Four-parameter logistic mapping of predictions onto the MOS scale.
//!
//! ```text
//! f(x) = (β₁ − β₂) / (1 + exp(−(x − β₃)/|β₄|)) + β₂
//! ```
//!
//! Fitted by least squares with the simplex minimizer, starting from
//! `β₁ = max(mos)`, `β₂ = min(mos)`, `β₃ = median(pred)`, `β₄ = std(pred)`.

use serde::{Deserialize, Serialize};

use super::simplex::{minimize, SimplexOptions};
use crate::error::{Error, Result};
use crate::magnitude::population_std;
use crate::similarity::logistic;

/// Minimum number of points for a fit.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams(pub [f64; 4]);

impl LogisticParams {
    pub fn eval(&self, x: f64) -> f64 {
        let [b1, b2, b3, b4] = self.0;
        (b1 - b2) * logistic((x - b3) / b4.abs()) + b2
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub mapped: Vec<f64>,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn median(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len().is_multiple_of(2) {
        0.5 * (s[m - 1] + s[m])
    } else {
        s[m]
    }
}

pub fn initial_params(pred: &[f64], mos: &[f64]) -> LogisticParams {
    let max = mos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = mos.iter().copied().fold(f64::INFINITY, f64::min);
    LogisticParams([max, min, median(pred), population_std(pred.iter().copied())])
}

/// Fits the logistic to `(pred, mos)` pairs.
///
/// Non-convergence is not an error: the best parameters found are returned
/// with `converged == false` and callers decide what to report.
pub fn logistic_fit(pred: &[f64], mos: &[f64]) -> Result<LogisticFit> {
    logistic_fit_with(pred, mos, &SimplexOptions::default())
}

pub fn logistic_fit_with(pred: &[f64], mos: &[f64], opts: &SimplexOptions) -> Result<LogisticFit> {
    if pred.len() != mos.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: mos.len(),
        });
    }
    if pred.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            got: pred.len(),
        });
    }
    if pred.iter().chain(mos).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { what: "logistic fit input" });
    }
    let init = initial_params(pred, mos);
    if init.0[3] == 0.0 {
        return Err(Error::ZeroVariance { what: "predictions" });
    }

    let sse = |p: &[f64]| {
        let params = LogisticParams([p[0], p[1], p[2], p[3]]);
        pred.iter()
            .zip(mos)
            .map(|(&x, &y)| {
                let r = params.eval(x) - y;
                r * r
            })
            .sum::<f64>()
    };
    let result = minimize(sse, &init.0, opts);
    let p = &result.point;
    let params = LogisticParams([p[0], p[1], p[2], p[3]]);
    Ok(LogisticFit {
        mapped: pred.iter().map(|&x| params.eval(x)).collect(),
        params,
        sse: result.value,
        iterations: result.iterations,
        converged: result.converged,
    })
}
