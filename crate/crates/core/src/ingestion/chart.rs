use std::io::Read;

use thiserror::Error;

use crate::domain::UnknownToken;
use crate::labeling::{ChartError, Leaning, LeaningMap};

#[derive(Debug, Error)]
pub enum ChartParseError {
    #[error("line {line}: source {source_domain:?} listed more than once")]
    DuplicateSource { line: u64, source_domain: String },
    #[error("line {line}: {source}")]
    UnknownLeaningToken {
        line: u64,
        #[source]
        source: UnknownToken,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Reads a two-column `source_domain,leaning` chart.
///
/// Comma or tab separated (detected from the first data line). A first row
/// whose leaning column is not a leaning token and whose source column is
/// not a hostname is taken as a header. `#` starts a comment line.
pub fn parse_leaning_chart<R: Read>(mut input: R) -> Result<LeaningMap, ChartParseError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .unwrap_or_default();
    let delimiter = if first.contains('\t') { b'\t' } else { b',' };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut chart = LeaningMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| ChartParseError::Malformed {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() < 2 {
            return Err(ChartParseError::Malformed {
                line,
                reason: "expected two columns: source_domain, leaning".into(),
            });
        }
        let (source, token) = (&rec[0], &rec[1]);
        let leaning = match token.parse::<Leaning>() {
            Ok(l) => l,
            Err(_) if i == 0 && !source.contains('.') => continue,
            Err(source) => return Err(ChartParseError::UnknownLeaningToken { line, source }),
        };
        chart.insert(source, leaning).map_err(|e| match e {
            ChartError::DuplicateSource(source_domain) => ChartParseError::DuplicateSource {
                line,
                source_domain,
            },
            ChartError::InvalidSource(s) => ChartParseError::Malformed {
                line,
                reason: format!("{s:?} is not a hostname"),
            },
        })?;
    }
    Ok(chart)
}
