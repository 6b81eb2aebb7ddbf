use std::path::Path;

use super::FormatError;

pub(crate) struct CsvTable {
    pub name: String,
    pub headers: Vec<String>,
    /// (line number, cells)
    pub rows: Vec<(u64, Vec<String>)>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Fails unless the header equals `expected` exactly.
    pub fn expect_headers(&self, expected: &[&str]) -> Result<(), FormatError> {
        for h in &self.headers {
            if !expected.contains(&h.as_str()) {
                return Err(FormatError::UnknownColumn {
                    table: self.name.clone(),
                    column: h.clone(),
                });
            }
        }
        if self.headers.len() != expected.len()
            || self.headers.iter().zip(expected).any(|(a, b)| a != b)
        {
            return Err(FormatError::MalformedRow {
                table: self.name.clone(),
                line: 1,
                message: format!("expected header {}", expected.join(",")),
            });
        }
        Ok(())
    }

    pub fn malformed(&self, line: u64, message: impl Into<String>) -> FormatError {
        FormatError::MalformedRow {
            table: self.name.clone(),
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn read_table(path: &Path, name: &str) -> Result<CsvTable, FormatError> {
    if !path.is_file() {
        return Err(FormatError::MissingTable(name.to_owned()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(name, e))?;
    let headers = reader
        .headers()
        .map_err(|e| csv_error(name, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(name, e))?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(CsvTable {
        name: name.to_owned(),
        headers,
        rows,
    })
}

fn csv_error(table: &str, e: csv::Error) -> FormatError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => FormatError::Io {
            path: table.into(),
            source: io,
        },
        kind => FormatError::MalformedRow {
            table: table.to_owned(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// UTF-8, comma separated, minimal double-quote escaping, LF endings.
pub(crate) fn write_table<S: AsRef<str>>(
    path: &Path,
    headers: &[S],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), FormatError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| FormatError::MalformedDocument(e.to_string());
    writer
        .write_record(headers.iter().map(|h| h.as_ref()))
        .map_err(to_err)?;
    for row in rows {
        writer.write_record(&row).map_err(to_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
    super::write_file(path, &bytes)
}
