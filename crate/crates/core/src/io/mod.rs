//! CSV ingestion and report rendering.
//!
//! All text output is UTF-8 with `\n` line endings, `.` as the decimal point
//! and no thousands separators.

mod render;
mod sheet;

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::units::Unit;

pub use render::{
    render_changes, render_discrepancies, render_records, render_rights, render_sheet,
    render_summary,
};
pub use sheet::{load_sheet, load_sheet_path, write_sheet_csv, LineItemRow, ABSENT, SHEET_COLUMNS};

/// Output format of every renderer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::JsonLines => "json-lines",
        })
    }
}

/// Parses a unit token such as `"10^3 km2"` or `"t"`.
pub fn parse_unit(token: &str) -> Result<Unit> {
    token.parse()
}

/// Headered reader that skips `#` comment lines and trims fields.
pub(crate) fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

/// 1-based line number of a record in its source file.
pub(crate) fn row_of(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

pub(crate) fn parse_field<T>(row: usize, s: &str) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    s.parse().map_err(|e: T::Err| Error::Parse {
        row,
        message: format!("`{s}`: {e}"),
    })
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Parse {
        row: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}
