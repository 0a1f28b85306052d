//! Input decoding. Sequence arguments accept a bare sequence file (JSON or
//! CSV) or a report written by an earlier subcommand, in which case the
//! named field of `result` is used.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use radop_core::io::{parse_json, parse_sequence_csv};
use radop_core::{EigenvalueSequence, Error, GammaSequence, RadialSymbol, SpectrumPath};
use serde::de::DeserializeOwned;
use serde_json::Value;

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn decode_value<T: DeserializeOwned>(value: Value, path: &Path, prefix: &str) -> Result<T, Error> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let field = match (prefix.is_empty(), inner.is_empty() || inner == ".") {
            (true, true) => ".".to_string(),
            (true, false) => inner,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        Error::Format {
            path: path.to_path_buf(),
            field,
            message: e.into_inner().to_string(),
        }
    })
}

/// A bare `T`, or `result.<field>` of a report.
fn read_json_or_report<T: DeserializeOwned>(path: &Path, field: &str) -> Result<T, Error> {
    let text = read_text(path)?;
    let value: Value = parse_json(&text, path)?;
    let is_report = value.get("command").is_some() && value.get("result").is_some();
    if !is_report {
        return decode_value(value, path, "");
    }
    let inner = value
        .get("result")
        .and_then(|r| r.get(field))
        .cloned()
        .ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            field: format!("result.{field}"),
            message: "report has no such field".into(),
        })?;
    decode_value(inner, path, &format!("result.{field}"))
}

pub fn lambda(path: &Path) -> Result<EigenvalueSequence, Error> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_sequence_csv(&read_text(path)?, path)
    } else {
        read_json_or_report(path, "lambda")
    }
}

pub fn gamma(path: &Path) -> Result<GammaSequence, Error> {
    read_json_or_report(path, "gamma")
}

pub fn symbol(path: &Path) -> Result<RadialSymbol, Error> {
    read_json_or_report(path, "symbol")
}

pub fn spectrum_path(path: &Path) -> Result<SpectrumPath, Error> {
    read_json_or_report(path, "path")
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}
