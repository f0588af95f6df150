//! Tables and their CSV, JSON and gnuplot renderings.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no NaN or infinity.
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tolerances: Value,
    pub notes: Vec<String>,
    /// Extra JSON-only content, such as failure details.
    pub details: Option<Value>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            parameters: Value::Object(Map::new()),
            seed: None,
            tolerances: Value::Object(Map::new()),
            notes: Vec::new(),
            details: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(CliError::output)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(CliError::output)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::output(e.into_error()))?;
        String::from_utf8(bytes).map_err(CliError::output)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = json!({
            "tool": "chaincli",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "columns": self.columns,
            "rows": rows,
            "notes": self.notes,
        });
        if let Some(d) = &self.details {
            doc["details"] = d.clone();
        }
        let mut s = serde_json::to_string_pretty(&doc).map_err(CliError::output)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes through a temporary file in the target directory, then renames
/// it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// How a table is drawn by gnuplot.
#[derive(Debug, Clone, Copy)]
pub enum PlotKind {
    /// Horizontal segments from column `lo` to `hi`, one line per row index.
    Intervals { lo: usize, hi: usize, label: &'static str },
    /// Vertical segments at column `x`, from `lo` to `hi`.
    BandMap { x: usize, lo: usize, hi: usize, xlabel: &'static str, ylabel: &'static str },
    /// Points with error bars.
    Curve { x: usize, y: usize, err: usize, xlabel: &'static str, ylabel: &'static str },
    /// Impulses at column `x`.
    Impulses { x: usize, label: &'static str },
}

/// A gnuplot script reading `csv_name`, which must sit next to the script.
pub fn gnuplot_script(csv_name: &str, title: &str, kind: PlotKind) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key off\n");
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "")));
    let data = format!("'{}' every ::1", csv_name.replace('\'', ""));
    match kind {
        PlotKind::Intervals { lo, hi, label } => {
            s.push_str(&format!("set xlabel '{label}'\nset ylabel 'band'\nset yrange [0:*]\n"));
            s.push_str(&format!(
                "plot {data} using {lo}:($0+1):(${hi}-${lo}):(0) with vectors nohead lw 6, \\\n     {data} using {lo}:($0+1) with points pt 7 ps 0.6\n"
            ));
        }
        PlotKind::BandMap { x, lo, hi, xlabel, ylabel } => {
            s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"));
            s.push_str(&format!(
                "plot {data} using {x}:{lo}:(0):(${hi}-${lo}) with vectors nohead lw 2, \\\n     {data} using {x}:{lo} with dots\n"
            ));
        }
        PlotKind::Curve { x, y, err, xlabel, ylabel } => {
            s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\nset yrange [0:1]\n"));
            s.push_str(&format!("plot {data} using {x}:{y}:{err} with yerrorlines pt 7\n"));
        }
        PlotKind::Impulses { x, label } => {
            s.push_str(&format!("set xlabel '{label}'\nset yrange [0:1.2]\nunset ytics\n"));
            s.push_str(&format!("plot {data} using {x}:(1) with impulses lw 2\n"));
        }
    }
    s.push_str("pause mouse close\n");
    s
}

/// Path of the gnuplot script written beside `out`.
pub fn script_path(out: &Path) -> PathBuf {
    out.with_extension("gp")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE, 0.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(1.5), "1.5000000000000000e0");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn text_cells_are_quoted() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![Cell::Num(1.0), "x, y".into()]);
        t.push(vec![Cell::Empty, Cell::Num(f64::NAN)]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1.0000000000000000e0,\"x, y\"\n,nan\n");
        let doc: Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert!(doc["rows"][1]["a"].is_null() && doc["rows"][1]["b"].is_null());
    }
}
