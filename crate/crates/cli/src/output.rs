//! JSON result documents and CSV tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use maxzonoid::geometry::Estimate;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub const TOOL: &str = "maxzonoid";

#[derive(Debug, Serialize)]
pub struct ResultDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub operation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Value>,
    pub results: Value,
}

impl ResultDocument {
    pub fn new(operation: &str, model: Option<Value>, results: Value) -> Self {
        ResultDocument { tool: TOOL, version: maxzonoid::VERSION, operation: operation.into(), model, results }
    }
}

/// Estimate with its provenance: exact values carry `"method": "exact"`,
/// Monte Carlo ones the sample size and seed.
pub fn estimate_json(e: Estimate, mc: Option<(usize, u64)>) -> Value {
    match mc {
        Some((samples, seed)) => json!({
            "value": e.value, "std_error": e.std_error, "method": "monte_carlo", "samples": samples, "seed": seed
        }),
        None => json!({ "value": e.value, "std_error": 0.0, "method": "exact" }),
    }
}

/// Destination for the command output: a file or standard output.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<&Path>) -> Self {
        Sink { path: path.map(Path::to_path_buf) }
    }

    pub fn open(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.path {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        }
    }

    pub fn write_text(&self, text: &str) -> Result<(), CliError> {
        let mut w = self.open()?;
        w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(io_error)
    }

    pub fn write_json(&self, doc: &ResultDocument) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(doc).expect("result documents serialize");
        text.push('\n');
        self.write_text(&text)
    }

    /// `#`-prefixed `key=value` metadata lines, a header line, then rows.
    pub fn write_csv(&self, meta: &[(&str, String)], header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut w = self.open()?;
        for (k, v) in meta {
            writeln!(w, "# {k}={v}").map_err(io_error)?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header).map_err(csv_error)?;
        let mut cells = Vec::new();
        for r in rows {
            cells.clear();
            cells.extend(r.iter().map(|v| format_cell(*v)));
            csv.write_record(&cells).map_err(csv_error)?;
        }
        csv.flush().map_err(io_error)
    }
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        // shortest representation that parses back to the same value
        format!("{v}")
    }
}

fn io_error(e: io::Error) -> CliError {
    CliError::Usage(format!("write failed: {e}"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Usage(format!("write failed: {e}"))
}

/// Numeric CSV table: header plus rows, metadata lines skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn ncols(&self) -> usize {
        self.header.len()
    }
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_table(file, &path.display().to_string())
}

pub fn parse_table<R: io::Read>(input: R, name: &str) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{name}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(CliError::Validation(format!("{name}: missing header line")));
    }
    if header.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(CliError::Validation(format!("{name}: the first line must be a header, found numbers")));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{name}: {e}")))?;
        let row: Result<Vec<f64>, CliError> = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| CliError::Validation(format!("{name}: data row {}: '{c}' is not a number", i + 1)))
            })
            .collect();
        rows.push(row?);
    }
    Ok(Table { header, rows })
}
