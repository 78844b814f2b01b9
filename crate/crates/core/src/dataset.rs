//! The tab-separated dataset format: `id<TAB>frequency<TAB>magnitude`, one
//! type per line.
//!
//! A header line is accepted in first position. Blank lines and lines
//! starting with `#` are skipped.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::repertoire::Repertoire;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub id: String,
    pub frequency: f64,
    pub magnitude: f64,
}

fn parse_number(field: &str, what: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad {what} `{field}`") })
}

pub fn parse_dataset(text: &str) -> Result<Vec<DatasetRow>> {
    let mut rows = Vec::new();
    let mut first = true;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let is_first = std::mem::replace(&mut first, false);
        if is_first && fields[1].trim().parse::<f64>().is_err() && fields[2].trim().parse::<f64>().is_err() {
            continue;
        }
        let frequency = parse_number(fields[1], "frequency", line)?;
        let magnitude = parse_number(fields[2], "magnitude", line)?;
        if !frequency.is_finite() || frequency < 0.0 {
            return Err(Error::Parse { line, message: format!("frequency must be >= 0, got {frequency}") });
        }
        if !magnitude.is_finite() || magnitude <= 0.0 {
            return Err(Error::Parse { line, message: format!("magnitude must be > 0, got {magnitude}") });
        }
        rows.push(DatasetRow { id: fields[0].to_string(), frequency, magnitude });
    }
    Ok(rows)
}

pub fn read_dataset<R: Read>(mut reader: R) -> Result<Vec<DatasetRow>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::InvalidUtf8 { offset: e.valid_up_to() })?;
    parse_dataset(text)
}

pub fn rows_to_repertoire(rows: &[DatasetRow]) -> Result<Repertoire> {
    Repertoire::from_frequencies(rows.iter().map(|r| (r.id.clone(), r.frequency, r.magnitude)))
}

pub fn write_dataset<W, I, S>(mut out: W, rows: I, header: bool) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (S, f64, f64)>,
    S: AsRef<str>,
{
    if header {
        writeln!(out, "id\tfrequency\tmagnitude")?;
    }
    for (id, f, m) in rows {
        writeln!(out, "{}\t{f}\t{m}", id.as_ref())?;
    }
    Ok(())
}
