use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MOS_HEADER: &str = "image_id,mos";

/// Ground-truth mean opinion scores keyed by image id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MosTable {
    entries: BTreeMap<String, f64>,
}

impl MosTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry, refusing empty ids, duplicates and non-finite scores.
    pub fn insert(&mut self, id: impl Into<String>, mos: f64) -> Result<()> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyId { row: self.entries.len() });
        }
        if !mos.is_finite() {
            return Err(Error::NonFiniteInput { what: "MOS" });
        }
        if self.entries.contains_key(&id) {
            return Err(Error::DuplicateRowId {
                path: "<memory>".into(),
                row: self.entries.len() as u64 + 1,
                id,
            });
        }
        self.entries.insert(id, mos);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.entries.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Parses MOS CSV text; `origin` names the source in error messages.
    ///
    /// Rows are numbered from 1 with the header as row 1, so the first data
    /// row is row 2.
    pub fn parse_csv(text: &str, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| csv_error(origin, e))?,
            None => {
                return Err(Error::MissingHeader {
                    path: origin.into(),
                    expected: MOS_HEADER,
                })
            }
        };
        if header.len() != 2 || &header[0] != "image_id" || &header[1] != "mos" {
            return Err(Error::MissingHeader {
                path: origin.into(),
                expected: MOS_HEADER,
            });
        }

        let mut table = MosTable::new();
        for record in records {
            let record = record.map_err(|e| csv_error(origin, e))?;
            let row = record.position().map_or(0, |p| p.line());
            if record.len() != 2 {
                return Err(Error::BadRow {
                    path: origin.into(),
                    row,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let id = &record[0];
            if id.is_empty() {
                return Err(Error::BadRow {
                    path: origin.into(),
                    row,
                    message: "empty image_id".into(),
                });
            }
            let mos: f64 = record[1]
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::ParseField {
                    path: origin.into(),
                    row,
                    column: "mos",
                    value: record[1].to_string(),
                })?;
            if table.entries.contains_key(id) {
                return Err(Error::DuplicateRowId {
                    path: origin.into(),
                    row,
                    id: id.to_string(),
                });
            }
            table.entries.insert(id.to_string(), mos);
        }
        Ok(table)
    }
}

impl FromIterator<(String, f64)> for MosTable {
    /// Later duplicates overwrite earlier ones; use [`MosTable::insert`] for checked building.
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        MosTable {
            entries: iter.into_iter().collect(),
        }
    }
}

pub(crate) fn csv_error(origin: &str, e: csv::Error) -> Error {
    Error::Csv {
        path: origin.into(),
        message: e.to_string(),
    }
}

pub fn read_mos(path: impl AsRef<Path>) -> Result<MosTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MosTable::parse_csv(&text, &path.display().to_string())
}
