//! Training-free image quality scoring from CLIP embeddings.
//!
//! Two cues are computed per image embedding:
//!
//! * [`similarity`]: softmax over cosine similarities with a positive and a
//!   negative quality prompt;
//! * [`magnitude`]: mean Box-Cox transform of the absolute activations after
//!   normalizing by their standard deviation.
//!
//! [`fusion`] combines them with weights driven by how much they disagree,
//! [`pipeline`] applies all of that to an [`EmbeddingMatrix`], and
//! [`metrics`] correlates the result with mean opinion scores.
//!
//! ```
//! use maclip::{fuse, q_mag, q_sim, PromptPair, ScoreConfig};
//!
//! let config = ScoreConfig::default();
//! let prompts = PromptPair::new(vec![1.0, 0.2, 0.0], vec![0.0, 0.2, 1.0])?;
//! let image = [0.9, -0.4, 0.3];
//!
//! let s = q_sim(&image, &prompts, &config)?;
//! let m = q_mag(&image, &config)?.q_mag;
//! let (weights, q) = fuse(s, m, &config)?;
//! assert!((weights.w_sim + weights.w_mag - 1.0).abs() < 1e-12);
//! assert!(q >= s.min(m) && q <= s.max(m));
//! # Ok::<(), maclip::Error>(())
//! ```
//!
//! A longer walk-through lives in the `book/` directory of the repository.

pub mod config;
mod error;
pub mod fusion;
pub mod io;
pub mod magnitude;
pub mod metrics;
pub mod pipeline;
pub mod similarity;

pub use config::{FixedWeights, Mode, ScoreConfig, SigmaSource};
pub use error::{Error, ErrorCategory, Result};
pub use fusion::{fuse, fuse_fixed, fusion_weights, FusionWeights, QualityRecord};
pub use io::{read_embeddings, read_mos, read_prompts, write_embeddings, EmbeddingMatrix, MosTable, PromptPair};
pub use magnitude::{boxcox, q_mag, q_mag_variant, wasserstein_1d, MagnitudeBreakdown, MagnitudeVariant};
pub use metrics::{evaluate, logistic_fit, plcc, srcc, EvalOptions, EvalReport};
pub use pipeline::{score_matrix, score_with_similarities, similarity_scores};
pub use similarity::{cosine, q_sim, SimilarityPair};

// Book chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../book/src/similarity.md")]
    mod similarity {}
    #[doc = include_str!("../../../book/src/magnitude.md")]
    mod magnitude {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
