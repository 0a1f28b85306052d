//! JSON and CSV interchange.
//!
//! Sequences are `{"values": [[re, im], ...]}` in JSON or a CSV with header
//! `n,re,im`. Decoding errors name the file and the offending field.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::EigenvalueSequence;

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Decodes JSON text; `origin` labels errors.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        Error::Format {
            path: origin.to_path_buf(),
            field: if field.is_empty() { ".".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_json(&text, path)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?).map_err(|e| io_error(path, e))
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    n: usize,
    re: f64,
    im: f64,
}

pub fn parse_sequence_csv(text: &str, origin: &Path) -> Result<EigenvalueSequence> {
    let format = |field: String, message: String| Error::Format {
        path: origin.to_path_buf(),
        field,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format("header".into(), e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["n", "re", "im"] {
        return Err(format("header".into(), "expected `n,re,im`".into()));
    }
    let mut values = Vec::new();
    for (i, row) in reader.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| format(format!("row {}", i + 1), e.to_string()))?;
        if row.n != i {
            return Err(format(
                format!("row {}", i + 1),
                format!("index {} out of order, expected {i}", row.n),
            ));
        }
        values.push(num_complex::Complex64::new(row.re, row.im));
    }
    EigenvalueSequence::new(values).map_err(|e| format("values".into(), e.to_string()))
}

/// Reads a sequence as CSV when the extension is `.csv`, JSON otherwise.
pub fn read_sequence(path: &Path) -> Result<EigenvalueSequence> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    if is_csv(path) {
        parse_sequence_csv(&text, path)
    } else {
        parse_json(&text, path)
    }
}

/// CSV text with header `n,re,im`; floats use the shortest round-trip form.
pub fn sequence_csv_string(seq: &EigenvalueSequence) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, v) in seq.values().iter().enumerate() {
        out.push_str(&format!("{n},{:?},{:?}\n", v.re, v.im));
    }
    out
}

/// Writes CSV when the extension is `.csv`, JSON otherwise.
pub fn write_sequence(path: &Path, seq: &EigenvalueSequence) -> Result<()> {
    if is_csv(path) {
        fs::write(path, sequence_csv_string(seq)).map_err(|e| io_error(path, e))
    } else {
        write_json(path, seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::RadialSymbol;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.csv");
        let s = EigenvalueSequence::from_real(&[1.0, 0.5, -0.25]).unwrap();
        write_sequence(&path, &s).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n,re,im\n0,1.0,0.0\n"));
        assert_eq!(read_sequence(&path).unwrap(), s);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.json");
        let s = EigenvalueSequence::from_fn(3, |n| num_complex::Complex64::new(n as f64, -1.0))
            .unwrap();
        write_sequence(&path, &s).unwrap();
        assert_eq!(read_sequence(&path).unwrap(), s);
    }

    #[test]
    fn format_errors_name_the_field() {
        let err = parse_json::<EigenvalueSequence>(
            r#"{"values": [[1, 0], [2, "x"]]}"#,
            Path::new("in.json"),
        )
        .unwrap_err();
        match err {
            Error::Format { field, path, .. } => {
                assert_eq!(path, Path::new("in.json"));
                assert_eq!(field, "values[1][1]");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err =
            parse_json::<RadialSymbol>(r#"{"variant": "power", "s": "two"}"#, Path::new("s.json"))
                .unwrap_err();
        assert!(
            matches!(err, Error::Format { ref field, .. } if field == "s"),
            "{err:?}"
        );
    }

    #[test]
    fn csv_errors() {
        let p = Path::new("x.csv");
        assert!(parse_sequence_csv("a,b,c\n0,1,2\n", p).is_err());
        assert!(parse_sequence_csv("n,re,im\n1,1,2\n", p).is_err());
        assert!(parse_sequence_csv("n,re,im\n0,oops,2\n", p).is_err());
        assert!(parse_sequence_csv("n,re,im\n", p).is_err());
    }
}
