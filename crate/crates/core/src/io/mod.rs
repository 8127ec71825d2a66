//! File formats: MAE1 embeddings, MOS CSV and score CSV.

mod embeddings;
pub mod format;
mod mos;
mod scores;

pub use embeddings::{read_embeddings, read_prompts, write_embeddings, EmbeddingMatrix, PromptPair, HEADER_LEN};
pub use format::{fmt_sig, quantize};
pub use mos::{read_mos, MosTable, MOS_HEADER};
pub use scores::{parse_scores, read_scores, scores_to_string, write_scores, write_scores_to, SCORES_HEADER};
