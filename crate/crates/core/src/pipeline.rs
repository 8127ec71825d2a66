//! Scoring a whole embedding matrix.
//!
//! Rows are scored independently on a rayon pool and collected in input
//! order, so the number of workers never changes the output.

use rayon::prelude::*;

use crate::config::{Mode, ScoreConfig};
use crate::error::{Error, Result};
use crate::fusion::{fuse, fuse_fixed, QualityRecord};
use crate::io::{EmbeddingMatrix, PromptPair};
use crate::magnitude::{q_mag, q_mag_variant, MagnitudeVariant};
use crate::similarity::similarity_pair;

fn widen(row: &[f32]) -> Vec<f64> {
    row.iter().map(|&x| f64::from(x)).collect()
}

fn run_parallel<T: Send>(
    n: usize,
    jobs: Option<usize>,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// `q_sim` for every row. Computed once and reused by λ sweeps and ablations.
pub fn similarity_scores(
    images: &EmbeddingMatrix,
    prompts: &PromptPair,
    config: &ScoreConfig,
    jobs: Option<usize>,
) -> Result<Vec<f64>> {
    config.validate()?;
    check_dims(images, prompts)?;
    run_parallel(images.len(), jobs, |i| {
        Ok(similarity_pair(&widen(images.row(i)), prompts, config.epsilon)?.quality(config.tau))
    })
}

fn check_dims(images: &EmbeddingMatrix, prompts: &PromptPair) -> Result<()> {
    if images.dim() != prompts.dim() {
        return Err(Error::DimensionMismatch {
            context: "prompt embeddings",
            expected: images.dim(),
            found: prompts.dim(),
        });
    }
    Ok(())
}

/// Builds the record for one row given its (optional) similarity score.
pub fn score_row(id: &str, row: &[f64], q_sim: Option<f64>, config: &ScoreConfig) -> Result<QualityRecord> {
    let need_sim = || {
        q_sim.ok_or(Error::PromptsRequired {
            mode: config.mode.as_str(),
        })
    };
    let record = |q_mag: f64, w_sim: f64, w_mag: f64, q: f64, degenerate: bool| QualityRecord {
        id: id.to_string(),
        q_sim,
        q_mag,
        w_sim,
        w_mag,
        q,
        degenerate,
    };
    match config.mode {
        Mode::L1 | Mode::L2 => {
            let variant = if config.mode == Mode::L1 {
                MagnitudeVariant::L1
            } else {
                MagnitudeVariant::L2
            };
            let m = q_mag_variant(row, variant)?;
            Ok(record(m, 0.0, 1.0, m, false))
        }
        mode => {
            let mag = q_mag(row, config)?;
            let degenerate = mag.is_degenerate();
            let m = mag.q_mag;
            match mode {
                Mode::Fused => {
                    let s = need_sim()?;
                    let (w, q) = fuse(s, m, config)?;
                    Ok(record(m, w.w_sim, w.w_mag, q, degenerate))
                }
                Mode::Sim => Ok(record(m, 1.0, 0.0, need_sim()?, degenerate)),
                Mode::Mag => Ok(record(m, 0.0, 1.0, m, degenerate)),
                Mode::Fixed => {
                    let s = need_sim()?;
                    let fw = config.fixed_weights;
                    let q = fuse_fixed(s, m, fw.w_sim, fw.w_mag)?;
                    Ok(record(m, fw.w_sim, fw.w_mag, q, degenerate))
                }
                Mode::L1 | Mode::L2 => unreachable!(),
            }
        }
    }
}

/// Scores every row given precomputed similarity scores (if any).
pub fn score_with_similarities(
    images: &EmbeddingMatrix,
    similarities: Option<&[f64]>,
    config: &ScoreConfig,
    jobs: Option<usize>,
) -> Result<Vec<QualityRecord>> {
    config.validate()?;
    if let Some(s) = similarities {
        if s.len() != images.len() {
            return Err(Error::LengthMismatch {
                left: images.len(),
                right: s.len(),
            });
        }
    } else if config.mode.needs_prompts() {
        return Err(Error::PromptsRequired {
            mode: config.mode.as_str(),
        });
    }
    run_parallel(images.len(), jobs, |i| {
        score_row(
            &images.ids()[i],
            &widen(images.row(i)),
            similarities.map(|s| s[i]),
            config,
        )
    })
}

/// Scores every row of `images`. Prompts are optional for the magnitude-only modes;
/// when given they still fill the `q_sim` column.
pub fn score_matrix(
    images: &EmbeddingMatrix,
    prompts: Option<&PromptPair>,
    config: &ScoreConfig,
    jobs: Option<usize>,
) -> Result<Vec<QualityRecord>> {
    let sims = prompts
        .map(|p| similarity_scores(images, p, config, jobs))
        .transpose()?;
    score_with_similarities(images, sims.as_deref(), config, jobs)
}
