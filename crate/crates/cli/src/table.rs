//! Sampled output tables: CSV with a `#` metadata header, or one JSON document.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const POTENTIAL_COLUMNS: [&str; 4] = ["x", "v11", "v12", "v22"];
pub const SPINOR_COLUMNS: [&str; 3] = ["x", "psi1", "psi2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputTable {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    /// Missing values are NaN in memory and `null` in JSON.
    #[serde(with = "nullable_rows")]
    pub rows: Vec<Vec<f64>>,
}

mod nullable_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Vec<Option<f64>>> =
            rows.iter().map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect()).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let opt = Vec::<Vec<Option<f64>>>::deserialize(d)?;
        Ok(opt.into_iter().map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect())
    }
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".to_string()
    }
}

impl OutputTable {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> CliResult<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
            return Err(CliError::config(format!(
                "row {bad} has {} values for {} columns",
                rows[bad].len(),
                columns.len()
            )));
        }
        Ok(Self { metadata: BTreeMap::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows })
    }

    /// Table keyed by a strictly increasing `x` column.
    pub fn spatial(columns: &[&str], rows: Vec<Vec<f64>>) -> CliResult<Self> {
        if rows.windows(2).any(|w| w[0][0].partial_cmp(&w[1][0]) != Some(std::cmp::Ordering::Less)) {
            return Err(CliError::config("x column is not strictly increasing"));
        }
        Self::new(columns, rows)
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out += &self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out += &r.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(",");
            out.push('\n');
        }
        out
    }

    /// Reads the CSV layout written by [`OutputTable::to_csv`]. A plain CSV
    /// with an optional header line is accepted as well.
    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut metadata = BTreeMap::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.split_once('=') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if columns.is_none() && rows.is_empty() => {
                    columns = Some(fields.iter().map(|f| f.to_string()).collect());
                }
                Err(_) => return Err(CliError::config(format!("line {}: non-numeric row", i + 1))),
            }
        }
        let width = columns.as_ref().map(Vec::len).or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
        let columns = columns.unwrap_or_else(|| (0..width).map(|i| format!("c{i}")).collect());
        let names: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut t = Self::new(&names, rows)?;
        t.metadata = metadata;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid table JSON: {e}")))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Metadata and schema without rows.
    pub fn sidecar_json(&self) -> String {
        let doc = serde_json::json!({
            "metadata": self.metadata,
            "columns": self.columns,
            "row_count": self.rows.len(),
        });
        serde_json::to_string_pretty(&doc).expect("sidecar serializes") + "\n"
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        if text.trim_start().starts_with('{') {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.into(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `out.csv` → `out.<tag>.csv`.
pub fn sibling_path(path: &Path, tag: &str) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}
