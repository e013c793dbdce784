//! CSV ingestion and result/metadata writing.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde_json::{json, Value};

use super::CliError;

/// A numeric table read from CSV plus where it came from.
#[derive(Debug)]
pub struct Table {
    pub values: Array2<f64>,
    pub source: String,
    pub header: bool,
}

impl Table {
    pub fn describe(&self) -> Value {
        json!({
            "path": self.source,
            "rows": self.values.nrows(),
            "columns": self.values.ncols(),
            "header_detected": self.header,
        })
    }
}

fn source_name(path: Option<&Path>) -> String {
    match path {
        Some(p) if p != Path::new("-") => p.display().to_string(),
        _ => "<stdin>".to_string(),
    }
}

/// Reads a numeric CSV table. `None` or `-` reads stdin.
///
/// A first record in which no field parses as a number is taken as a header.
/// Any other unparseable field is a data error naming its row and column.
pub fn read_table(path: Option<&Path>) -> Result<Table, CliError> {
    let source = source_name(path);
    let reader: Box<dyn Read> = match path {
        Some(p) if p != Path::new("-") => {
            Box::new(File::open(p).map_err(|e| CliError::data(format!("{source}: cannot open: {e}")))?)
        }
        _ => Box::new(io::stdin()),
    };
    parse_table(reader, source)
}

pub fn parse_table<R: Read>(reader: R, source: String) -> Result<Table, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut flat = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    let mut header = false;
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("{source}: {e}")))?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if rows == 0 && !header && parsed.iter().all(Result::is_err) {
            header = true;
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::data(format!(
                "{source}: row {line}: expected {expected} columns, found {}",
                record.len()
            )));
        }
        for (col, (field, value)) in record.iter().zip(parsed).enumerate() {
            match value {
                Ok(v) if v.is_finite() => flat.push(v),
                _ => {
                    return Err(CliError::data(format!(
                        "{source}: row {line}, column {}: cannot parse '{field}' as a finite number",
                        col + 1
                    )))
                }
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::data(format!("{source}: no data rows")));
    }
    let values = Array2::from_shape_vec((rows, width.unwrap_or(0)), flat)
        .map_err(|e| CliError::data(format!("{source}: {e}")))?;
    Ok(Table { values, source, header })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn matrix_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_json(m: &Array2<f64>) -> Value {
    Value::Array(m.rows().into_iter().map(|r| json!(r.to_vec())).collect())
}

/// Destination for the primary result and its metadata sidecar.
pub struct Sink {
    pub output: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    fn meta_path(&self) -> Option<PathBuf> {
        if let Some(m) = &self.meta {
            return Some(m.clone());
        }
        self.output.as_ref().filter(|p| p.as_path() != Path::new("-")).map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    }

    /// Writes `csv` or `json` (per format), then the metadata sidecar.
    pub fn emit(&self, csv: String, json: Value, meta: Value) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => csv,
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json).expect("serializable");
                s.push('\n');
                s
            }
        };
        write_to(self.output.as_deref(), body.as_bytes())?;
        if let Some(path) = self.meta_path() {
            let mut s = serde_json::to_string_pretty(&meta).expect("serializable");
            s.push('\n');
            write_to(Some(&path), s.as_bytes())?;
        }
        Ok(())
    }
}

pub fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::create(p).map_err(|e| CliError::data(format!("{}: cannot create: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::data(format!("{}: write failed: {e}", p.display())))
        }
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::data(format!("<stdout>: write failed: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Table, CliError> {
        parse_table(text.as_bytes(), "t.csv".into())
    }

    #[test]
    fn header_is_detected() {
        let t = parse("a,b\n1,2\n3,4\n").unwrap();
        assert!(t.header);
        assert_eq!(t.values, ndarray::array![[1.0, 2.0], [3.0, 4.0]]);
        let t = parse("1,2\n3,4\n").unwrap();
        assert!(!t.header);
    }

    #[test]
    fn bad_field_is_located() {
        let err = parse("x,y\n1,2\n3,oops\n").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("row 3, column 2"), "{}", err.message);
        let err = parse("1,2\n3\n").unwrap_err();
        assert!(err.message.contains("row 2"), "{}", err.message);
        let err = parse("1,nan\n").unwrap_err();
        assert!(err.message.contains("row 1, column 2"), "{}", err.message);
        assert!(parse("a,b\n").is_err());
    }

    #[test]
    fn round_trip_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
