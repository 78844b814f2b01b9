//! Turning raw text into a word frequency/length table.
//!
//! Tokens are maximal runs of alphanumeric codepoints, lowercased. A token's
//! magnitude is its length in Unicode codepoints.

use std::collections::HashMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::repertoire::Repertoire;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub token: String,
    pub frequency: u64,
    pub length: usize,
}

/// Token counts ordered by decreasing frequency, ties by token.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FrequencyTable {
    entries: Vec<TableEntry>,
}

impl FrequencyTable {
    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(counts: I) -> Self {
        let mut entries: Vec<TableEntry> = counts
            .into_iter()
            .filter(|(t, n)| *n > 0 && !t.is_empty())
            .map(|(token, frequency)| {
                let length = token.chars().count();
                TableEntry { token, frequency, length }
            })
            .collect();
        entries.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.token.cmp(&b.token)));
        Self { entries }
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn total_tokens(&self) -> u64 {
        self.entries.iter().map(|e| e.frequency).sum()
    }

    pub fn to_repertoire(&self) -> Result<Repertoire> {
        Repertoire::from_frequencies(
            self.entries.iter().map(|e| (e.token.clone(), e.frequency as f64, e.length as f64)),
        )
    }
}

pub fn tokenize_str(text: &str) -> FrequencyTable {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for token in text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        *counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    FrequencyTable::from_counts(counts)
}

/// Reads the whole stream and tokenizes it. Invalid UTF-8 is reported with
/// the byte offset of the first bad sequence.
pub fn tokenize_corpus<R: Read>(mut reader: R) -> Result<FrequencyTable> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::InvalidUtf8 { offset: e.valid_up_to() })?;
    Ok(tokenize_str(text))
}
