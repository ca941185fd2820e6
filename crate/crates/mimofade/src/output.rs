//! CSV and JSON writers for table rows.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// CSV with a header row, or a pretty-printed JSON array. Non-finite
/// numbers are written as `inf`/`NaN` in CSV and `null` in JSON.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, out: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes `rows` to `<dir>/<name>.<ext>` when a directory is given, else
/// to stdout. Returns the file written, if any.
pub fn emit<T: Serialize>(rows: &[T], name: &str, dir: Option<&Path>, format: Format) -> anyhow::Result<Option<PathBuf>> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{name}.{}", format.extension()));
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_rows(rows, format, file)?;
            Ok(Some(path))
        }
        None => {
            write_rows(rows, format, std::io::stdout().lock())?;
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        b: f64,
    }

    #[test]
    fn csv_has_header_and_special_values() {
        let mut buf = Vec::new();
        write_rows(&[Row { a: 1, b: 0.5 }, Row { a: 2, b: f64::INFINITY }], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n2,inf\n");
    }

    #[test]
    fn json_is_an_array() {
        let mut buf = Vec::new();
        write_rows(&[Row { a: 1, b: f64::NAN }], Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["a"], 1);
        assert!(v[0]["b"].is_null());
    }
}
