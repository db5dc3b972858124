//! Convergence trace files: CSV with `#` metadata lines, and a JSON mirror.
//!
//! Numbers are stored as the decimal strings that were written, so reading a
//! file back yields exactly the trace that produced it.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use krybound_core::{DoubleDouble, Real};
use serde::{Deserialize, Serialize};

pub const FORMAT_NAME: &str = "krybound-trace";
pub const FORMAT_VERSION: u32 = 1;

pub const COLUMNS: [&str; 7] = [
    "k",
    "residual_norm",
    "preconditioned_residual_norm",
    "normal_residual_norm",
    "bound_theorem1",
    "bound_cluster",
    "estimate_first_order",
];

/// A finite number in scientific notation, kept as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TraceValue(String);

impl TraceValue {
    /// Formats with the working precision's significant digits (17 or 34).
    pub fn from_real<T: Real>(x: T) -> Result<Self> {
        ensure!(x.is_finite(), "non-finite trace value {}", x.to_f64());
        Ok(Self(x.to_sci_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.to_extended().to_f64()
    }

    pub fn to_extended(&self) -> DoubleDouble {
        self.0.parse().expect("validated on construction")
    }
}

impl FromStr for TraceValue {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let x: DoubleDouble = s.parse().map_err(|_| anyhow::anyhow!("not a number: {s:?}"))?;
        ensure!(x.hi().is_finite(), "non-finite trace value {s:?}");
        Ok(Self(s.to_string()))
    }
}

impl TryFrom<String> for TraceValue {
    type Error = anyhow::Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TraceValue> for String {
    fn from(v: TraceValue) -> Self {
        v.0
    }
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One iteration. Missing quantities are `None` and written as empty cells.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub residual_norm: Option<TraceValue>,
    pub preconditioned_residual_norm: Option<TraceValue>,
    pub normal_residual_norm: Option<TraceValue>,
    pub bound_theorem1: Option<TraceValue>,
    pub bound_cluster: Option<TraceValue>,
    pub estimate_first_order: Option<TraceValue>,
}

impl TraceRow {
    fn cells(&self) -> [Option<&TraceValue>; 6] {
        [
            self.residual_norm.as_ref(),
            self.preconditioned_residual_norm.as_ref(),
            self.normal_residual_norm.as_ref(),
            self.bound_theorem1.as_ref(),
            self.bound_cluster.as_ref(),
            self.estimate_first_order.as_ref(),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    /// Written as `# key=value` lines in key order.
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<TraceRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonTrace {
    format: String,
    version: u32,
    metadata: BTreeMap<String, String>,
    columns: Vec<String>,
    rows: Vec<TraceRow>,
}

impl Trace {
    /// Rows must be numbered `0, 1, 2, …`.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            ensure!(row.k == i, "row {i} has k = {}; k must increase by one from 0", row.k);
        }
        for key in self.metadata.keys() {
            ensure!(
                !key.is_empty() && !key.contains(['=', '\n', '\r']),
                "invalid metadata key {key:?}"
            );
        }
        for value in self.metadata.values() {
            ensure!(!value.contains(['\n', '\r']), "metadata value {value:?} spans lines");
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.validate()?;
        writeln!(w, "# {FORMAT_NAME} v{FORMAT_VERSION}")?;
        for (key, value) in &self.metadata {
            writeln!(w, "# {key}={value}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(COLUMNS)?;
        for row in &self.rows {
            let mut record = vec![row.k.to_string()];
            record.extend(row.cells().iter().map(|c| c.map_or(String::new(), |v| v.to_string())));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let first = lines.next().context("empty trace file")??;
        let want = format!("# {FORMAT_NAME} v{FORMAT_VERSION}");
        ensure!(first.trim_end() == want, "expected header line {want:?}, found {first:?}");
        let mut metadata = BTreeMap::new();
        let mut body = String::new();
        for line in lines {
            let line = line?;
            match line.strip_prefix('#') {
                Some(meta) if body.is_empty() => {
                    let meta = meta.strip_prefix(' ').unwrap_or(meta);
                    let (key, value) = meta
                        .split_once('=')
                        .with_context(|| format!("metadata line without '=': {line:?}"))?;
                    metadata.insert(key.to_string(), value.to_string());
                }
                _ => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        ensure!(header == COLUMNS, "unexpected column header {header:?}");
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let cell = |j: usize| -> Result<Option<TraceValue>> {
                match record.get(j).unwrap_or("") {
                    "" => Ok(None),
                    s => s
                        .parse()
                        .map(Some)
                        .with_context(|| format!("row {i}, column {}", COLUMNS[j])),
                }
            };
            rows.push(TraceRow {
                k: record
                    .get(0)
                    .unwrap_or("")
                    .parse()
                    .with_context(|| format!("row {i}: bad iteration index"))?,
                residual_norm: cell(1)?,
                preconditioned_residual_norm: cell(2)?,
                normal_residual_norm: cell(3)?,
                bound_theorem1: cell(4)?,
                bound_cluster: cell(5)?,
                estimate_first_order: cell(6)?,
            });
        }
        let trace = Self { metadata, rows };
        trace.validate()?;
        Ok(trace)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        self.validate()?;
        let doc = JsonTrace {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            metadata: self.metadata.clone(),
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: self.rows.clone(),
        };
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: std::io::Read>(reader: R) -> Result<Self> {
        let doc: JsonTrace = serde_json::from_reader(reader)?;
        if doc.format != FORMAT_NAME || doc.version != FORMAT_VERSION {
            bail!("unsupported trace format {} v{}", doc.format, doc.version);
        }
        ensure!(doc.columns == COLUMNS, "unexpected columns {:?}", doc.columns);
        let trace = Self {
            metadata: doc.metadata,
            rows: doc.rows,
        };
        trace.validate()?;
        Ok(trace)
    }
}
