use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::args::{Format, GlobalArgs};
use crate::error::CliResult;

/// Shortest `%g`-style rendering with 12 significant digits. Independent of
/// locale; `-0` prints as `0`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Value rounded the same way as [`fmt_sig`], for JSON output.
pub fn json_num(v: f64) -> Value {
    if v.is_finite() {
        json!(fmt_sig(v).parse::<f64>().expect("formatted float parses"))
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json_num(*v),
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Emitter {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub invocation: String,
}

impl Emitter {
    pub fn new(global: &GlobalArgs, args: impl Iterator<Item = String>) -> Self {
        let mut invocation = String::from("fanin");
        for a in args {
            invocation.push(' ');
            if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == '"') {
                invocation.push_str(&format!("{a:?}"));
            } else {
                invocation.push_str(&a);
            }
        }
        Self {
            output: global.output.clone(),
            format: global.format,
            invocation,
        }
    }

    pub fn header(&self) -> String {
        format!("# fanin {} | {}", fanin_core::VERSION, self.invocation)
    }

    /// Writes the table in the selected format. `meta` is merged into the
    /// JSON envelope and ignored for CSV.
    pub fn table(&self, table: &Table, meta: Value) -> CliResult {
        let bytes = match self.format {
            Format::Csv => self.csv_bytes(table)?,
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let mut doc = json!({
                    "version": fanin_core::VERSION,
                    "invocation": self.invocation,
                    "columns": table.columns,
                    "rows": rows,
                });
                if let (Value::Object(doc), Value::Object(meta)) = (&mut doc, meta) {
                    doc.extend(meta);
                }
                json_bytes(&doc)?
            }
        };
        self.write(&bytes)
    }

    /// JSON reports are emitted as JSON whatever `--format` says.
    pub fn json(&self, value: &Value) -> CliResult {
        self.write(&json_bytes(value)?)
    }

    fn csv_bytes(&self, table: &Table) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.header())?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        w.write_record(&table.columns).map_err(csv_err)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| csv_err(e.into_error().into()))
    }

    fn write(&self, bytes: &[u8]) -> CliResult {
        match &self.output {
            Some(path) => write_file(path, bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

pub fn json_bytes(value: &Value) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| crate::error::CliError::usage(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    std::fs::write(path, bytes).map_err(|e| crate::error::CliError::usage(format!("{}: {e}", path.display())))
}

fn csv_err(e: csv::Error) -> crate::error::CliError {
    crate::error::CliError::usage(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(0.7), "0.7");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(201.0), "201");
        assert_eq!(fmt_sig(6.892779493333e-12), "6.89277949333e-12");
        assert_eq!(fmt_sig(1e-5), "0.00001");
        assert_eq!(fmt_sig(1.5e-6), "1.5e-6");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
        assert_eq!(fmt_sig(1234567890123.0), "1.23456789012e12");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(9.9999999999996), "10");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn json_numbers_are_rounded() {
        assert_eq!(json_num(1.0 / 3.0), json!(0.333333333333));
        assert_eq!(json_num(f64::INFINITY), Value::Null);
    }
}
