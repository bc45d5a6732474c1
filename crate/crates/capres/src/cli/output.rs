//! Result records and their CSV/JSON serialisation.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// Where the expected value of a record comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// A constant or identity stated by the theory.
    Paper,
    /// Follows from a definition or a symmetry.
    Trivial,
    /// Computed by an independent oracle.
    Derived,
}

impl Provenance {
    /// Lower-case tag written to the tables.
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::Trivial => "trivial",
            Provenance::Derived => "derived",
        }
    }
}

/// Acceptance rule of a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "tol", rename_all = "snake_case")]
pub enum Check {
    /// `|computed − expected| ≤ tol·|expected|`.
    Relative(f64),
    /// `|computed − expected| ≤ tol`.
    Absolute(f64),
    /// `|computed − expected| ≤ tol·(1 + |expected|)`.
    Scaled(f64),
    /// Bit-for-bit equality (exact rational data).
    Exact,
    /// Informational row without a tolerance.
    Report,
}

/// One row of a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Identifier of the quantity.
    pub name: String,
    /// Computed value.
    pub computed: C64,
    /// Expected value, if any.
    pub expected: Option<C64>,
    /// `|computed − expected|`.
    pub abs_err: Option<f64>,
    /// `abs_err / |expected|`.
    pub rel_err: Option<f64>,
    /// Wall-clock time spent on the row.
    pub runtime_ms: u64,
    /// Provenance of the expected value.
    pub provenance: Provenance,
    /// Acceptance rule.
    pub check: Check,
    /// Outcome of the rule.
    pub passed: bool,
    /// Diagnostic text (errors, parameters).
    pub note: String,
}

impl ResultRecord {
    /// A record comparing `computed` with `expected` under `check`.
    pub fn compare(name: impl Into<String>, computed: C64, expected: C64, check: Check, provenance: Provenance) -> Self {
        let abs = (computed - expected).norm();
        let scale = expected.norm();
        let rel = if scale > 0.0 { abs / scale } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
        let passed = computed.re.is_finite()
            && computed.im.is_finite()
            && match check {
                Check::Relative(tol) => abs <= tol * scale,
                Check::Absolute(tol) => abs <= tol,
                Check::Scaled(tol) => abs <= tol * (1.0 + scale),
                Check::Exact => computed == expected,
                Check::Report => true,
            };
        Self {
            name: name.into(),
            computed,
            expected: Some(expected),
            abs_err: Some(abs),
            rel_err: Some(rel),
            runtime_ms: 0,
            provenance,
            check,
            passed,
            note: String::new(),
        }
    }

    /// Exact comparison of two rationals.
    pub fn rational(name: impl Into<String>, computed: Ratio<i64>, expected: Ratio<i64>, provenance: Provenance) -> Self {
        let as_c = |r: Ratio<i64>| C64::new(*r.numer() as f64 / *r.denom() as f64, 0.0);
        let mut rec = Self::compare(name, as_c(computed), as_c(expected), Check::Exact, provenance);
        rec.passed = computed == expected;
        rec.note = format!("{computed} vs {expected}");
        rec
    }

    /// An informational row without an expected value.
    pub fn report(name: impl Into<String>, computed: C64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            computed,
            expected: None,
            abs_err: None,
            rel_err: None,
            runtime_ms: 0,
            provenance,
            check: Check::Report,
            passed: true,
            note: String::new(),
        }
    }

    /// A failed row recording a library error.
    pub fn failure(name: impl Into<String>, err: &Error, provenance: Provenance) -> Self {
        let mut rec = Self::report(name, C64::new(f64::NAN, f64::NAN), provenance);
        rec.passed = false;
        rec.note = err.to_string();
        rec
    }

    /// Attaches a note.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Sets the runtime.
    pub fn with_runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }
}

/// Collects records, timing each one when enabled.
#[derive(Debug, Clone, Default)]
pub struct Recorder {
    timing: bool,
    records: Vec<ResultRecord>,
}

impl Recorder {
    /// A recorder; `timing = false` writes zero runtimes (byte-identical tables).
    pub fn new(timing: bool) -> Self {
        Self {
            timing,
            records: Vec::new(),
        }
    }

    /// Runs `f`, stamping its runtime on the returned record; errors become
    /// failed rows named `name`.
    pub fn record<F>(&mut self, name: &str, provenance: Provenance, f: F)
    where
        F: FnOnce() -> Result<ResultRecord>,
    {
        let start = Instant::now();
        let out = f();
        let ms = if self.timing { start.elapsed().as_millis() as u64 } else { 0 };
        let rec = match out {
            Ok(r) => r,
            Err(e) => ResultRecord::failure(name, &e, provenance),
        };
        self.records.push(rec.with_runtime(ms));
    }

    /// Runs `f`, which yields several records; the runtime is split evenly.
    pub fn record_many<F>(&mut self, name: &str, provenance: Provenance, f: F)
    where
        F: FnOnce() -> Result<Vec<ResultRecord>>,
    {
        let start = Instant::now();
        let out = f();
        let ms = if self.timing { start.elapsed().as_millis() as u64 } else { 0 };
        match out {
            Ok(rs) => {
                let n = rs.len().max(1) as u64;
                self.records.extend(rs.into_iter().map(|r| r.with_runtime(ms / n)));
            }
            Err(e) => self.records.push(ResultRecord::failure(name, &e, provenance).with_runtime(ms)),
        }
    }

    /// Appends a record as is.
    pub fn push(&mut self, rec: ResultRecord) {
        self.records.push(rec);
    }

    /// Whether runtimes are measured.
    pub fn timing(&self) -> bool {
        self.timing
    }

    /// The collected records.
    pub fn into_records(self) -> Vec<ResultRecord> {
        self.records
    }
}

/// Auxiliary numeric table (plot data) emitted next to the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    /// File stem.
    pub name: String,
    /// Column headers.
    pub columns: Vec<String>,
    /// Rows of numbers.
    pub rows: Vec<Vec<f64>>,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Assertion rows.
    pub records: Vec<ResultRecord>,
    /// Plot data.
    pub tables: Vec<DataTable>,
}

impl Outcome {
    /// True when every record passed.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    /// Appends another outcome.
    pub fn extend(&mut self, other: Outcome) {
        self.records.extend(other.records);
        self.tables.extend(other.tables);
    }
}

/// Header of the result CSV.
pub const CSV_COLUMNS: [&str; 9] = [
    "name",
    "computed_re",
    "computed_im",
    "expected_re",
    "expected_im",
    "abs_err",
    "rel_err",
    "runtime_ms",
    "provenance",
];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "n/a".into())
}

/// Serialises records as CSV.
pub fn records_to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidConfig(format!("cannot write CSV: {e}"));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        w.write_record([
            r.name.clone(),
            num(r.computed.re),
            num(r.computed.im),
            opt(r.expected.map(|e| e.re)),
            opt(r.expected.map(|e| e.im)),
            opt(r.abs_err),
            opt(r.rel_err),
            r.runtime_ms.to_string(),
            r.provenance.tag().to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(format!("cannot write CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(format!("CSV is not UTF-8: {e}")))
}

fn table_to_csv(t: &DataTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidConfig(format!("cannot write CSV: {e}"));
    w.write_record(&t.columns).map_err(io)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|x| num(*x))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(format!("cannot write CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(format!("CSV is not UTF-8: {e}")))
}

/// JSON document written next to the CSV.
#[derive(Debug, Clone, Serialize)]
struct JsonReport<'a, C: Serialize> {
    experiment: &'a str,
    seed: u64,
    passed: bool,
    config: &'a C,
    records: &'a [ResultRecord],
}

/// Writes `<dir>/<experiment>.csv`, `<dir>/<experiment>.json` and one CSV per
/// data table; returns the paths written.
pub fn write_outcome<C: Serialize>(
    dir: &Path,
    experiment: &str,
    seed: u64,
    config: &C,
    outcome: &Outcome,
) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::InvalidConfig(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{experiment}.csv"));
    fs::write(&csv_path, records_to_csv(&outcome.records)?).map_err(io)?;
    written.push(csv_path);
    let report = JsonReport {
        experiment,
        seed,
        passed: outcome.passed(),
        config,
        records: &outcome.records,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidConfig(format!("cannot serialise results: {e}")))?;
    let json_path = dir.join(format!("{experiment}.json"));
    fs::write(&json_path, json + "\n").map_err(io)?;
    written.push(json_path);
    for t in &outcome.tables {
        let p = dir.join(format!("{experiment}_{}.csv", t.name));
        fs::write(&p, table_to_csv(t)?).map_err(io)?;
        written.push(p);
    }
    Ok(written)
}
