//! Tables, verdicts and their CSV / JSON emission.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Bumped whenever the summary layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Weakstar,
    SphereInstability,
    Revolution,
    FlatSmallp,
    Pinfty,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Weakstar,
        Experiment::SphereInstability,
        Experiment::Revolution,
        Experiment::FlatSmallp,
        Experiment::Pinfty,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Weakstar => "weakstar",
            Experiment::SphereInstability => "sphere-instability",
            Experiment::Revolution => "revolution",
            Experiment::FlatSmallp => "flat-smallp",
            Experiment::Pinfty => "pinfty",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats carry 17 significant digits so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) if x.is_nan() => "NaN".into(),
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Fixed-column table; unset cells stay empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Append a row given as `(column, value)` pairs.
    pub fn push(&mut self, cells: Vec<(&'static str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        for (name, cell) in cells {
            let i = self.column_index(name).unwrap_or_else(|| panic!("no column `{name}`"));
            row[i] = cell;
        }
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Cell of `column` in `row`.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        self.column_index(column).and_then(|i| self.rows.get(row).map(|r| &r[i]))
    }

    /// Rows whose column `kind` renders as `value`.
    pub fn select<'a>(&'a self, column: &str, value: &'a str) -> impl Iterator<Item = usize> + 'a {
        let i = self.column_index(column);
        (0..self.rows.len()).filter(move |r| i.is_some_and(|i| self.rows[*r][i].render() == value))
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// One asserted inequality. `margin ≥ 0` exactly when it holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

impl Check {
    /// `measured ≤ bound + tol`.
    pub fn at_most(name: &str, measured: f64, bound: f64, tol: f64) -> Self {
        let margin = bound + tol - measured;
        Self { name: name.into(), passed: margin >= 0.0, margin, detail: format!("{measured:.6e} ≤ {bound:.6e} + {tol:.1e}") }
    }

    /// `measured ≥ bound − tol`.
    pub fn at_least(name: &str, measured: f64, bound: f64, tol: f64) -> Self {
        let margin = measured - (bound - tol);
        Self { name: name.into(), passed: margin >= 0.0, margin, detail: format!("{measured:.6e} ≥ {bound:.6e} − {tol:.1e}") }
    }

    /// A yes/no property; the margin is ±1.
    pub fn holds(name: &str, ok: bool, detail: String) -> Self {
        Self { name: name.into(), passed: ok, margin: if ok { 1.0 } else { -1.0 }, detail }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NO-DATA")]
    NoData,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NoData => "NO-DATA",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub table: Table,
    pub checks: Vec<Check>,
    /// largest `|‖u(t)‖ − ‖u(0)‖|` over the evolutions performed
    pub max_unitarity_defect: f64,
    pub elapsed_seconds: f64,
}

impl ExperimentReport {
    pub fn new(experiment: Experiment, table: Table) -> Self {
        Self { experiment, table, checks: Vec::new(), max_unitarity_defect: 0.0, elapsed_seconds: 0.0 }
    }

    pub fn verdict(&self) -> Verdict {
        if self.table.is_empty() {
            Verdict::NoData
        } else if self.checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.checks.iter().map(|c| c.margin).reduce(f64::min)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot encode {path}: {message}")]
    Encode { path: PathBuf, message: String },
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    seed: u64,
    verdict: Verdict,
    experiments: Vec<ExperimentSummary<'a>>,
    config: String,
}

#[derive(Serialize)]
struct ExperimentSummary<'a> {
    name: &'static str,
    verdict: Verdict,
    rows: usize,
    worst_margin: Option<f64>,
    max_unitarity_defect: f64,
    elapsed_seconds: f64,
    checks: &'a [Check],
}

/// Combined verdict: FAIL beats PASS beats NO-DATA.
pub fn overall(reports: &[ExperimentReport]) -> Verdict {
    let v: Vec<Verdict> = reports.iter().map(ExperimentReport::verdict).collect();
    if v.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if v.contains(&Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::NoData
    }
}

/// Write `<experiment>.csv` files and/or `summary.json` under `dir`.
pub fn emit_report(
    reports: &[ExperimentReport],
    dir: &Path,
    format: Format,
    seed: u64,
    config_echo: &str,
) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError::Io { path: dir.into(), source })?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        for r in reports {
            let path = dir.join(format!("{}.csv", r.experiment.name()));
            let text = r.table.to_csv().map_err(|e| EmitError::Encode { path: path.clone(), message: e.to_string() })?;
            fs::write(&path, text).map_err(|source| EmitError::Io { path: path.clone(), source })?;
            written.push(path);
        }
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join("summary.json");
        let summary = Summary {
            schema_version: SCHEMA_VERSION,
            tool: "qmlab",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            verdict: overall(reports),
            experiments: reports
                .iter()
                .map(|r| ExperimentSummary {
                    name: r.experiment.name(),
                    verdict: r.verdict(),
                    rows: r.table.len(),
                    worst_margin: r.worst_margin(),
                    max_unitarity_defect: r.max_unitarity_defect,
                    elapsed_seconds: r.elapsed_seconds,
                    checks: &r.checks,
                })
                .collect(),
            config: config_echo.into(),
        };
        let text = serde_json::to_string_pretty(&summary)
            .map_err(|e| EmitError::Encode { path: path.clone(), message: e.to_string() })?;
        fs::write(&path, text + "\n").map_err(|source| EmitError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.0] {
            let s = Cell::Float(x).render();
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(Cell::Float(f64::NAN).render(), "NaN");
        assert_eq!(Cell::from(None::<f64>).render(), "");
    }

    #[test]
    fn empty_table_is_header_only_and_no_data() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n");
        let r = ExperimentReport::new(Experiment::Pinfty, t);
        assert_eq!(r.verdict(), Verdict::NoData);
    }

    #[test]
    fn single_row_verdict() {
        let mut t = Table::new(&["x", "pass"]);
        t.push(vec![("x", 1.5.into()), ("pass", true.into())]);
        let mut r = ExperimentReport::new(Experiment::Weakstar, t);
        r.checks.push(Check::at_most("x small", 1.5, 2.0, 0.0));
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.worst_margin(), Some(0.5));
        r.checks.push(Check::at_least("x big", 1.5, 2.0, 0.0));
        assert_eq!(r.verdict(), Verdict::Fail);
        assert_eq!(overall(&[r]), Verdict::Fail);
    }
}
