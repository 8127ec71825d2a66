use serde::{Deserialize, Serialize};

use super::correlation::{plcc, srcc, MIN_SAMPLES};
use super::logistic::{logistic_fit, MIN_FIT_SAMPLES};
use crate::config::ScoreConfig;
use crate::error::{Error, Result};
use crate::fusion::QualityRecord;
use crate::io::{quantize, MosTable};

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    /// Also fit the 4-parameter logistic and report the mapped PLCC.
    pub logistic: bool,
    /// Configuration echoed into the report.
    pub config: ScoreConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Joined (scored and rated) images.
    pub n: usize,
    /// MOS entries without a score.
    pub skipped_mos: usize,
    /// Scored images without a MOS entry.
    pub skipped_scores: usize,
    pub srcc: f64,
    pub plcc_raw: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plcc_logistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub logistic_params: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub logistic_converged: Option<bool>,
    pub warnings: Vec<String>,
    pub config: ScoreConfig,
}

impl EvalReport {
    /// Copy with every statistic rounded to its 9-significant-digit text value.
    pub fn rounded(&self) -> Self {
        EvalReport {
            srcc: quantize(self.srcc),
            plcc_raw: quantize(self.plcc_raw),
            plcc_logistic: self.plcc_logistic.map(quantize),
            logistic_params: self.logistic_params.map(|p| p.map(quantize)),
            ..self.clone()
        }
    }
}

/// Pairs of `(prediction, mos)` joined by id, ordered by id.
#[derive(Debug, Clone, Default)]
pub struct Joined {
    pub ids: Vec<String>,
    pub pred: Vec<f64>,
    pub mos: Vec<f64>,
    pub skipped_mos: usize,
    pub skipped_scores: usize,
}

pub fn join(records: &[QualityRecord], mos: &MosTable) -> Joined {
    let mut pairs: Vec<(&str, f64, f64)> = records
        .iter()
        .filter_map(|r| mos.get(&r.id).map(|m| (r.id.as_str(), r.q, m)))
        .collect();
    pairs.sort_by(|a, b| a.0.cmp(b.0));
    let n = pairs.len();
    let mut j = Joined {
        skipped_mos: mos.len() - n,
        skipped_scores: records.len() - n,
        ..Joined::default()
    };
    for (id, p, m) in pairs {
        j.ids.push(id.to_string());
        j.pred.push(p);
        j.mos.push(m);
    }
    j
}

/// Correlates scores with MOS. Input order never affects the result.
pub fn evaluate(records: &[QualityRecord], mos: &MosTable, options: &EvalOptions) -> Result<EvalReport> {
    let joined = join(records, mos);
    let n = joined.pred.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let mut warnings = Vec::new();
    if joined.skipped_mos > 0 {
        warnings.push(format!("{} MOS entries have no score", joined.skipped_mos));
    }
    if joined.skipped_scores > 0 {
        warnings.push(format!("{} scored images have no MOS entry", joined.skipped_scores));
    }

    let mut report = EvalReport {
        n,
        skipped_mos: joined.skipped_mos,
        skipped_scores: joined.skipped_scores,
        srcc: srcc(&joined.pred, &joined.mos)?,
        plcc_raw: plcc(&joined.pred, &joined.mos)?,
        plcc_logistic: None,
        logistic_params: None,
        logistic_converged: None,
        warnings,
        config: options.config,
    };

    if options.logistic {
        if n < MIN_FIT_SAMPLES {
            report
                .warnings
                .push(format!("logistic mapping skipped: {n} samples, need {MIN_FIT_SAMPLES}"));
        } else {
            match logistic_fit(&joined.pred, &joined.mos) {
                Ok(fit) => {
                    report.logistic_params = Some(fit.params.0);
                    report.logistic_converged = Some(fit.converged);
                    if fit.converged {
                        match plcc(&fit.mapped, &joined.mos) {
                            Ok(r) => report.plcc_logistic = Some(r),
                            Err(e) => report.warnings.push(format!("mapped PLCC unavailable: {e}")),
                        }
                    } else {
                        report.warnings.push(format!(
                            "logistic fit did not converge in {} iterations; only raw PLCC reported",
                            fit.iterations
                        ));
                    }
                }
                Err(e) => report.warnings.push(format!("logistic mapping skipped: {e}")),
            }
        }
    }
    log::debug!("evaluated {n} pairs: srcc={} plcc={}", report.srcc, report.plcc_raw);
    Ok(report)
}
