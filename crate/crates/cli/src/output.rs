use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use radop_core::io::to_json_string;
use serde::Serialize;

/// Rows for CSV export; every cell is already formatted.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: C,
    pub result: R,
}

/// Finished subcommand output.
pub struct Output {
    pub json: String,
    pub table: Option<Table>,
    pub default_stdout: Format,
    /// Set when a mathematical check in the result failed.
    pub assertion_failure: Option<String>,
}

impl Output {
    pub fn new<C: Serialize, R: Serialize>(command: &str, config: C, result: R) -> Result<Self> {
        let report = Report {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            result,
        };
        Ok(Self {
            json: to_json_string(&report)?,
            table: None,
            default_stdout: Format::Json,
            assertion_failure: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn csv_by_default(mut self) -> Self {
        self.default_stdout = Format::Csv;
        self
    }

    pub fn fail_if(mut self, failed: bool, message: impl Into<String>) -> Self {
        if failed {
            self.assertion_failure = Some(message.into());
        }
        self
    }

    fn rendered(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.json.clone()),
            Format::Csv => match &self.table {
                Some(t) => t.to_csv(),
                None => bail!(crate::UsageError(
                    "this subcommand has no tabular output".into()
                )),
            },
        }
    }

    /// Writes to `out` (CSV when it ends in `.csv`, the JSON report
    /// otherwise) or to stdout in `format`.
    pub fn emit(&self, out: Option<&Path>, format: Option<Format>) -> Result<()> {
        match out {
            Some(path) => {
                let is_csv = path
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
                let text = self.rendered(if is_csv { Format::Csv } else { Format::Json })?;
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            None => {
                let text = self.rendered(format.unwrap_or(self.default_stdout))?;
                std::io::stdout().lock().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}
