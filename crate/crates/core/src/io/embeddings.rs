//! MAE1 embedding files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! 0..4    b"MAE1"
//! 4..8    u32 row count N
//! 8..12   u32 dimension D
//! then N id records: u16 byte length L, L bytes of UTF-8
//! then N*D f32 values, row-major, rows in id order
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MAE1";
pub const HEADER_LEN: usize = 12;

/// N×D matrix of image embeddings with one identifier per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    /// Builds a matrix from row-major `data`, checking every invariant.
    pub fn new(ids: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if ids.len().checked_mul(dim) != Some(data.len()) {
            return Err(Error::ShapeMismatch {
                rows: ids.len(),
                dim,
                len: data.len(),
            });
        }
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(ids.len());
        for (row, id) in ids.iter().enumerate() {
            if id.is_empty() {
                return Err(Error::EmptyId { row });
            }
            if id.len() > u16::MAX as usize {
                return Err(Error::IdTooLong { row, len: id.len() });
            }
            if let Some(&first_row) = seen.get(id.as_str()) {
                return Err(Error::DuplicateId {
                    id: id.clone(),
                    row,
                    first_row,
                });
            }
            seen.insert(id, row);
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(EmbeddingMatrix { ids, dim, data })
    }

    /// Convenience constructor from one `Vec` per row.
    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<f32>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                context: "row",
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(ids, dim, rows.into_iter().flatten().collect())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = (&str, &[f32])> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.data.chunks_exact(self.dim))
    }

    /// Serialized size in bytes.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN
            + self.ids.iter().map(|id| 2 + id.len()).sum::<usize>()
            + self.data.len() * 4
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.ids.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for id in &self.ids {
            out.extend_from_slice(&(id.len() as u16).to_le_bytes());
            out.extend_from_slice(id.as_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let total = bytes.len() as u64;
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                what: "header",
                offset: 0,
                expected: HEADER_LEN as u64,
                actual: total,
            });
        }
        if &bytes[0..3] != b"MAE" {
            let mut found = [0u8; 4];
            found.copy_from_slice(&bytes[0..4]);
            return Err(Error::BadMagic { found });
        }
        if bytes[3] != MAGIC[3] {
            return Err(Error::VersionMismatch {
                found: bytes[3] as char,
            });
        }
        let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }

        let mut offset = HEADER_LEN;
        // cap the pre-allocation: a corrupt header must not trigger a huge alloc
        let mut ids = Vec::with_capacity(n.min(bytes.len() / 2));
        for row in 0..n {
            if bytes.len() < offset + 2 {
                return Err(Error::Truncated {
                    what: "id length",
                    offset: offset as u64,
                    expected: offset as u64 + 2,
                    actual: total,
                });
            }
            let len = u16::from_le_bytes([bytes[offset], bytes[offset + 1]]) as usize;
            let start = offset + 2;
            if bytes.len() < start + len {
                return Err(Error::Truncated {
                    what: "id bytes",
                    offset: start as u64,
                    expected: (start + len) as u64,
                    actual: total,
                });
            }
            let id = std::str::from_utf8(&bytes[start..start + len]).map_err(|_| {
                Error::InvalidUtf8Id {
                    row,
                    offset: start as u64,
                }
            })?;
            ids.push(id.to_owned());
            offset = start + len;
        }

        let expected_end = (n as u64)
            .checked_mul(dim as u64)
            .and_then(|c| c.checked_mul(4))
            .and_then(|c| c.checked_add(offset as u64))
            .ok_or(Error::Truncated {
                what: "payload",
                offset: offset as u64,
                expected: u64::MAX,
                actual: total,
            })?;
        if total < expected_end {
            return Err(Error::Truncated {
                what: "payload",
                offset: offset as u64,
                expected: expected_end,
                actual: total,
            });
        }
        if total > expected_end {
            return Err(Error::TrailingBytes {
                offset: expected_end,
                extra: total - expected_end,
            });
        }
        let data: Vec<f32> = bytes[offset..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(ids, dim, data)
    }
}

/// Positive and negative prompt embeddings, widened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptPair {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl PromptPair {
    pub fn new(pos: Vec<f64>, neg: Vec<f64>) -> Result<Self> {
        if pos.len() != neg.len() {
            return Err(Error::LengthMismatch {
                left: pos.len(),
                right: neg.len(),
            });
        }
        if pos.is_empty() {
            return Err(Error::EmptyVector);
        }
        for v in [&pos, &neg] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteInput { what: "prompt embedding" });
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 0.0 {
                return Err(Error::ZeroNorm { norm, min: 0.0 });
            }
        }
        Ok(PromptPair { pos, neg })
    }

    /// Extracts the pair from a two-row matrix with ids `pos` and `neg` (either order).
    pub fn from_matrix(m: &EmbeddingMatrix) -> Result<Self> {
        if m.len() != 2 {
            return Err(Error::BadPromptFile {
                reason: format!("found {} rows", m.len()),
            });
        }
        let find = |name: &str| {
            m.ids()
                .iter()
                .position(|id| id == name)
                .ok_or_else(|| Error::BadPromptFile {
                    reason: format!("no row with id {name:?}, found {:?}", m.ids()),
                })
        };
        let (p, n) = (find("pos")?, find("neg")?);
        let widen = |i| m.row(i).iter().map(|&x| f64::from(x)).collect();
        Self::new(widen(p), widen(n))
    }

    pub fn to_matrix(&self) -> Result<EmbeddingMatrix> {
        let narrow = |v: &[f64]| v.iter().map(|&x| x as f32).collect::<Vec<_>>();
        EmbeddingMatrix::from_rows(
            vec!["pos".into(), "neg".into()],
            vec![narrow(&self.pos), narrow(&self.neg)],
        )
    }

    pub fn pos(&self) -> &[f64] {
        &self.pos
    }

    pub fn neg(&self) -> &[f64] {
        &self.neg
    }

    pub fn dim(&self) -> usize {
        self.pos.len()
    }
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    EmbeddingMatrix::from_bytes(&bytes)
}

pub fn write_embeddings(matrix: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, matrix.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_prompts(path: impl AsRef<Path>) -> Result<PromptPair> {
    PromptPair::from_matrix(&read_embeddings(path)?)
}
