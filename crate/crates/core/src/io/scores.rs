//! Per-image score CSV: `image_id,q_sim,q_mag,w_sim,w_mag,q,degenerate`.
//!
//! `q_sim` is left empty when no prompts were supplied.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::format::fmt_sig;
use super::mos::csv_error;
use crate::error::{Error, Result};
use crate::fusion::QualityRecord;

pub const SCORES_HEADER: [&str; 7] = ["image_id", "q_sim", "q_mag", "w_sim", "w_mag", "q", "degenerate"];

pub fn write_scores_to<W: Write>(records: &[QualityRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let to_err = |e| csv_error("<scores output>", e);
    w.write_record(SCORES_HEADER).map_err(to_err)?;
    for r in records {
        w.write_record([
            r.id.clone(),
            r.q_sim.map(fmt_sig).unwrap_or_default(),
            fmt_sig(r.q_mag),
            fmt_sig(r.w_sim),
            fmt_sig(r.w_mag),
            fmt_sig(r.q),
            r.degenerate.to_string(),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("<scores output>", e))
}

pub fn scores_to_string(records: &[QualityRecord]) -> String {
    let mut buf = Vec::new();
    write_scores_to(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn write_scores(records: &[QualityRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scores_to_string(records)).map_err(|e| Error::io(path, e))
}

pub fn parse_scores(text: &str, origin: &str) -> Result<Vec<QualityRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header_ok = match records.next() {
        Some(r) => {
            let r = r.map_err(|e| csv_error(origin, e))?;
            r.iter().eq(SCORES_HEADER.iter().copied())
        }
        None => false,
    };
    if !header_ok {
        return Err(Error::MissingHeader {
            path: origin.into(),
            expected: "image_id,q_sim,q_mag,w_sim,w_mag,q,degenerate",
        });
    }

    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in records {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != SCORES_HEADER.len() {
            return Err(Error::BadRow {
                path: origin.into(),
                row,
                message: format!("expected {} fields, found {}", SCORES_HEADER.len(), record.len()),
            });
        }
        let num = |idx: usize| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::ParseField {
                    path: origin.into(),
                    row,
                    column: SCORES_HEADER[idx],
                    value: record[idx].to_string(),
                })
        };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::BadRow {
                path: origin.into(),
                row,
                message: "empty image_id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateRowId {
                path: origin.into(),
                row,
                id,
            });
        }
        let q_sim = if record[1].is_empty() { None } else { Some(num(1)?) };
        let degenerate = match &record[6] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::ParseField {
                    path: origin.into(),
                    row,
                    column: "degenerate",
                    value: other.to_string(),
                })
            }
        };
        out.push(QualityRecord {
            id,
            q_sim,
            q_mag: num(2)?,
            w_sim: num(3)?,
            w_mag: num(4)?,
            q: num(5)?,
            degenerate,
        });
    }
    Ok(out)
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<Vec<QualityRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scores(&text, &path.display().to_string())
}
