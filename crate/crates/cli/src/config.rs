//! Flat `key = value` job configuration with dotted section keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dirac_darboux::{Branch, DerivativeMode, GridF64, GridSpec};

use crate::error::{CliError, CliResult};

/// Every key a config may set, with its default (empty means unset).
pub const KEYS: &[(&str, &str)] = &[
    ("model.kind", "coulomb"),
    ("model.m", "1"),
    ("model.e", "0.6"),
    ("model.c", "0"),
    ("model.alpha", "1"),
    ("model.beta", "-1"),
    ("model.kappa", "1"),
    ("model.table", ""),
    ("seeds.levels", "0,1"),
    ("seeds.branches", "auto"),
    ("seeds.form", "auto"),
    ("seeds.energies", ""),
    ("seeds.psi0_1", "1,0"),
    ("seeds.psi0_2", "0,1"),
    ("grid.min", ""),
    ("grid.max", ""),
    ("grid.n", "2001"),
    ("run.mode", "analytic"),
    ("verify.threshold", "1e-7"),
    ("spectrum.n_max", "3"),
    ("transform.map_level", ""),
    ("transform.map_branch", "auto"),
    ("transform.map_energy", ""),
    ("transform.map_psi0", "1,0.5"),
    ("sample.what", "potential"),
    ("output.path", ""),
    ("output.format", "csv"),
    ("output.sidecar", "false"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Free,
    Coulomb,
    CustomTable,
}

impl FromStr for ModelKind {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "free" => Ok(ModelKind::Free),
            "coulomb" => Ok(ModelKind::Coulomb),
            "custom-table" => Ok(ModelKind::CustomTable),
            other => Err(CliError::config(format!("unknown model '{other}'"))),
        }
    }
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Free => "free",
            ModelKind::Coulomb => "coulomb",
            ModelKind::CustomTable => "custom-table",
        }
    }
}

/// `auto` or an explicit sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchChoice {
    Auto,
    Fixed(Branch),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedForm {
    Auto,
    Closed,
    Simplified,
}

/// Raw key-value store; later writes win.
#[derive(Debug, Clone)]
pub struct KeyValues {
    values: BTreeMap<String, String>,
}

impl Default for KeyValues {
    fn default() -> Self {
        let values = KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self { values }
    }
}

impl KeyValues {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => Err(CliError::config(format!("unknown key '{key}'"))),
        }
    }

    /// Applies a `key=value` assignment.
    pub fn assign(&mut self, assignment: &str) -> CliResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("expected key=value, got '{assignment}'")))?;
        self.set(k.trim(), v)
    }

    /// Applies every line of a config text. `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> CliResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.assign(line).map_err(|e| CliError::config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        self.merge_text(&text)
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn parse<T: FromStr>(&self, key: &str) -> CliResult<T> {
        let raw = self.get(key);
        raw.parse().map_err(|_| CliError::config(format!("{key}: cannot parse '{raw}'")))
    }

    fn optional<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        if self.get(key).is_empty() {
            Ok(None)
        } else {
            self.parse(key).map(Some)
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>> {
        let raw = self.get(key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| s.trim().parse().map_err(|_| CliError::config(format!("{key}: cannot parse '{raw}'"))))
            .collect()
    }

    fn pair(&self, key: &str) -> CliResult<[f64; 2]> {
        match self.list::<f64>(key)?.as_slice() {
            &[a, b] => Ok([a, b]),
            _ => Err(CliError::config(format!("{key}: expected two numbers"))),
        }
    }

    /// Set keys other than `output.*`, for output metadata.
    pub fn effective(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .filter(|(k, v)| !v.is_empty() && !k.starts_with("output."))
    }
}

/// Parses `MIN:MAX:N`.
pub fn parse_grid(s: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::config(format!("grid must be MIN:MAX:N, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min = parts[0].trim().parse().map_err(|_| bad())?;
    let max = parts[1].trim().parse().map_err(|_| bad())?;
    let n = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((min, max, n))
}

fn parse_branch(key: &str, s: &str) -> CliResult<BranchChoice> {
    if s == "auto" {
        return Ok(BranchChoice::Auto);
    }
    s.parse::<Branch>()
        .map(BranchChoice::Fixed)
        .map_err(|_| CliError::config(format!("{key}: unknown branch '{s}'")))
}

/// Validated job description.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub model: ModelKind,
    pub mass: f64,
    pub energy: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub table: Option<PathBuf>,
    pub levels: [usize; 2],
    pub branches: [BranchChoice; 2],
    pub form: SeedForm,
    pub energies: Option<[f64; 2]>,
    pub psi0: [[f64; 2]; 2],
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_n: usize,
    pub mode: DerivativeMode,
    pub threshold: f64,
    pub n_max: usize,
    pub map_level: Option<usize>,
    pub map_branch: BranchChoice,
    pub map_energy: Option<f64>,
    pub map_psi0: [f64; 2],
    pub sample_what: String,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub sidecar: bool,
    pub raw: KeyValues,
}

impl JobConfig {
    pub fn from_key_values(kv: KeyValues) -> CliResult<Self> {
        let levels: Vec<usize> = kv.list("seeds.levels")?;
        let levels = match *levels.as_slice() {
            [a, b] if a != b => [a, b],
            [_, _] => return Err(CliError::config("seeds.levels must be distinct")),
            _ => return Err(CliError::config("seeds.levels: expected two level indices")),
        };
        let branches = match kv.get("seeds.branches") {
            "auto" => [BranchChoice::Auto; 2],
            s => match s.split(',').collect::<Vec<_>>().as_slice() {
                &[a, b] => [parse_branch("seeds.branches", a.trim())?, parse_branch("seeds.branches", b.trim())?],
                _ => return Err(CliError::config("seeds.branches: expected 'auto' or two signs")),
            },
        };
        let form = match kv.get("seeds.form") {
            "auto" => SeedForm::Auto,
            "closed" => SeedForm::Closed,
            "simplified" => SeedForm::Simplified,
            other => return Err(CliError::config(format!("seeds.form: unknown form '{other}'"))),
        };
        let energies = match kv.list::<f64>("seeds.energies")?.as_slice() {
            [] => None,
            &[a, b] => Some([a, b]),
            _ => return Err(CliError::config("seeds.energies: expected two energies")),
        };
        let sample_what = kv.get("sample.what").to_string();
        if !["potential", "seed1", "seed2"].contains(&sample_what.as_str()) {
            return Err(CliError::config(format!("sample.what: unknown target '{sample_what}'")));
        }
        let sidecar = match kv.get("output.sidecar") {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(CliError::config(format!("output.sidecar: expected a boolean, got '{other}'"))),
        };
        let mode = kv.get("run.mode");
        let mode = mode.parse().map_err(|_| CliError::config(format!("run.mode: unknown mode '{mode}'")))?;
        Ok(Self {
            model: kv.get("model.kind").parse()?,
            mass: kv.parse("model.m")?,
            energy: kv.parse("model.e")?,
            c: kv.parse("model.c")?,
            alpha: kv.parse("model.alpha")?,
            beta: kv.parse("model.beta")?,
            kappa: kv.parse("model.kappa")?,
            table: kv.optional("model.table")?,
            levels,
            branches,
            form,
            energies,
            psi0: [kv.pair("seeds.psi0_1")?, kv.pair("seeds.psi0_2")?],
            grid_min: kv.optional("grid.min")?,
            grid_max: kv.optional("grid.max")?,
            grid_n: kv.parse("grid.n")?,
            mode,
            threshold: kv.parse("verify.threshold")?,
            n_max: kv.parse("spectrum.n_max")?,
            map_level: kv.optional("transform.map_level")?,
            map_branch: parse_branch("transform.map_branch", kv.get("transform.map_branch"))?,
            map_energy: kv.optional("transform.map_energy")?,
            map_psi0: kv.pair("transform.map_psi0")?,
            sample_what,
            out: kv.optional("output.path")?,
            format: kv.get("output.format").parse()?,
            sidecar,
            raw: kv,
        })
    }

    /// Model-dependent default interval.
    pub fn grid(&self, table_domain: Option<(f64, f64)>) -> CliResult<GridF64> {
        let (lo, hi) = match (self.model, table_domain) {
            (ModelKind::Free, _) => (-10.0, 10.0),
            (ModelKind::Coulomb, _) => (0.1, 20.0),
            (ModelKind::CustomTable, Some(d)) => d,
            (ModelKind::CustomTable, None) => return Err(CliError::config("custom-table needs model.table")),
        };
        let g = GridSpec::new(self.grid_min.unwrap_or(lo), self.grid_max.unwrap_or(hi), self.grid_n)?;
        Ok(g)
    }
}
