//! Minimal CSV reading and writing for the study's numeric artifacts.
//!
//! One dialect everywhere: comma separator, `.` decimal point, a single
//! header row, `\n` line endings, no quoting (fields never contain commas).
//! Floats are written as `{:.16e}` (17 significant digits), which
//! round-trips every finite f64 bit pattern, so re-reading an artifact
//! reproduces it exactly.

use crate::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Canonical float formatting for all CSV output.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streaming CSV writer that enforces a fixed column count.
pub struct CsvWriter {
    out: BufWriter<File>,
    path: String,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        let mut writer = Self {
            out: BufWriter::new(file),
            path: path.display().to_string(),
            columns: header.len(),
        };
        writer.write_line(header.iter().copied())?;
        Ok(writer)
    }

    fn write_line<'a>(&mut self, fields: impl Iterator<Item = &'a str>) -> Result<()> {
        let mut first = true;
        for field in fields {
            if !first {
                self.out.write_all(b",").map_err(Error::from)?;
            }
            first = false;
            self.out.write_all(field.as_bytes()).map_err(Error::from)?;
        }
        self.out.write_all(b"\n").map_err(Error::from)
    }

    /// Writes one row; the field count must match the header.
    pub fn write_row(&mut self, fields: &[String]) -> Result<()> {
        assert_eq!(
            fields.len(),
            self.columns,
            "row width mismatch in {}",
            self.path
        );
        self.write_line(fields.iter().map(String::as_str))
    }

    /// Flushes and closes the file.
    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(Error::from)
    }
}

/// A fully parsed CSV file: header plus data rows, all as strings.
pub struct CsvFile {
    pub path: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    fn malformed(&self, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            message,
        }
    }

    /// Index of a required header column.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| self.malformed(format!("missing column {name:?}")))
    }

    pub fn parse_f64(&self, row: usize, col: usize) -> Result<f64> {
        let field = &self.rows[row][col];
        field.parse::<f64>().map_err(|_| {
            self.malformed(format!(
                "row {}, column {}: not a float: {field:?}",
                row + 1,
                col + 1
            ))
        })
    }

    pub fn parse_usize(&self, row: usize, col: usize) -> Result<usize> {
        let field = &self.rows[row][col];
        field.parse::<usize>().map_err(|_| {
            self.malformed(format!(
                "row {}, column {}: not a non-negative integer: {field:?}",
                row + 1,
                col + 1
            ))
        })
    }
}

/// Reads and splits a whole CSV file; every row must match the header width.
pub fn read_csv(path: &Path) -> Result<CsvFile> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let display = path.display().to_string();
    let header_line = lines
        .next()
        .transpose()
        .map_err(|e| Error::file(path, e))?
        .ok_or_else(|| Error::Parse {
            path: display.clone(),
            message: "empty file".into(),
        })?;
    let header: Vec<String> = header_line.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::file(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_owned).collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                path: display,
                message: format!(
                    "row {}: expected {} fields, found {}",
                    i + 1,
                    header.len(),
                    fields.len()
                ),
            });
        }
        rows.push(fields);
    }
    Ok(CsvFile {
        path: display,
        header,
        rows,
    })
}
