//! Shared CSV plumbing for the input tables.

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{Error, Result};

/// A header-indexed view over a CSV document. Header and field values are
/// trimmed; rows that are empty or whitespace-only are skipped.
pub(crate) struct Table {
    headers: Vec<String>,
    rows: Vec<(u64, StringRecord)>,
}

impl Table {
    pub(crate) fn parse(text: &str) -> Result<Self> {
        let mut reader = ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()?
            .iter()
            .map(|h| h.trim_start_matches('\u{feff}').trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let line = record.position().map_or(0, |p| p.line());
            rows.push((line, record));
        }
        Ok(Self { headers, rows })
    }

    pub(crate) fn column(&self, name: &str) -> Result<usize> {
        self.optional_column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub(crate) fn optional_column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = Row<'_>> {
        self.rows.iter().map(|(line, record)| Row {
            line: *line,
            record,
        })
    }
}

pub(crate) struct Row<'a> {
    pub(crate) line: u64,
    record: &'a StringRecord,
}

impl Row<'_> {
    /// Field at `index`, or the empty string for short rows.
    pub(crate) fn get(&self, index: usize) -> &str {
        self.record.get(index).unwrap_or("")
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            row: self.line,
            message: message.into(),
        }
    }
}
