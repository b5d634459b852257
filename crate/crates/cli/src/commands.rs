//! `transform`, `verify`, `spectrum` and `sample`.

use std::path::Path;

use dirac_darboux::seeds::coulomb_energy_unchecked;
use dirac_darboux::susy_verify::Certification;
use dirac_darboux::*;

use crate::config::{Format, JobConfig, ModelKind};
use crate::error::{CliError, CliResult};
use crate::models::{build_model, build_transform, coulomb_level_seed, coulomb_params, Model};
use crate::table::{emit, format_number, sibling_path, OutputTable, POTENTIAL_COLUMNS, SPINOR_COLUMNS};

fn base_metadata(command: &str, cfg: &JobConfig) -> Vec<(String, String)> {
    let mut meta = vec![
        ("tool".to_string(), format!("dirac-darboux {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), command.to_string()),
    ];
    meta.extend(cfg.raw.effective().map(|(k, v)| (format!("config.{k}"), v.to_string())));
    meta
}

fn annotate(mut t: OutputTable, meta: &[(String, String)]) -> OutputTable {
    for (k, v) in meta {
        t = t.with_meta(k.clone(), v.clone());
    }
    t
}

/// Writes a table to the configured path (or stdout) plus the optional sidecar.
fn write_table(cfg: &JobConfig, path: Option<&Path>, table: &OutputTable) -> CliResult<()> {
    emit(path, &table.render(cfg.format))?;
    if cfg.sidecar && cfg.format == Format::Csv {
        let p = path.ok_or_else(|| CliError::config("output.sidecar needs an output path"))?;
        emit(Some(&sibling_path(p, "meta").with_extension("json")), &table.sidecar_json())?;
    }
    Ok(())
}

fn potential_rows(v: &PotentialF64, grid: GridF64) -> CliResult<Vec<Vec<f64>>> {
    grid.nodes()
        .map(|x| {
            let m = v.value(x)?;
            Ok(vec![x, m.a11, m.a12, m.a22])
        })
        .collect()
}

fn spinor_rows(f: &SpinorFieldF64) -> Vec<Vec<f64>> {
    f.grid().nodes().zip(f.values()).map(|(x, p)| vec![x, p.c1, p.c2]).collect()
}

/// Spinor of `h₀` selected by `transform.map_level` or `transform.map_energy`.
fn spinor_to_map(cfg: &JobConfig, model: &Model) -> CliResult<Option<SeedF64>> {
    if let Some(e) = cfg.map_energy {
        let [a, b] = cfg.map_psi0;
        return Ok(Some(shooting_seed(&model.h0, e, Spinor2::new(a, b), model.grid)?));
    }
    match (cfg.map_level, model.coulomb) {
        (None, _) => Ok(None),
        (Some(n), Some(p)) => Ok(Some(coulomb_level_seed(p, n, cfg.map_branch)?)),
        (Some(_), None) => Err(CliError::config("transform.map_level needs the coulomb model")),
    }
}

pub fn transform(cfg: &JobConfig) -> CliResult<()> {
    let model = build_model(cfg)?;
    let (t, seed_meta) = build_transform(cfg, &model)?;
    let mut meta = base_metadata("transform", cfg);
    meta.extend(model.metadata.iter().cloned());
    meta.extend(seed_meta);
    let table = OutputTable::spatial(&POTENTIAL_COLUMNS, potential_rows(t.v1(), model.grid)?)?;
    let table = annotate(table, &meta).with_meta("quantity", "v1");
    if let Some(psi) = spinor_to_map(cfg, &model)? {
        let image = t.apply_l(&psi.sample(model.grid, t.h0())?, cfg.mode)?;
        if !image.is_finite() {
            return Err(Error::Overflow { x: f64::NAN }.into());
        }
        let residual = t.h1().eigen_residual_with(&image, psi.energy(), cfg.mode)?;
        let spinor = OutputTable::spatial(&SPINOR_COLUMNS, spinor_rows(&image))?;
        let spinor = annotate(spinor, &meta)
            .with_meta("quantity", "L psi")
            .with_meta("psi", psi.label())
            .with_meta("psi.energy", psi.energy().to_string())
            .with_meta("h1.eigen_residual", format_number(residual));
        let path = cfg.out.as_ref().map(|p| sibling_path(p, "spinor"));
        write_table(cfg, path.as_deref(), &spinor)?;
    }
    write_table(cfg, cfg.out.as_deref(), &table)
}

pub fn verify(cfg: &JobConfig) -> CliResult<()> {
    let model = build_model(cfg)?;
    let (t, seed_meta) = build_transform(cfg, &model)?;
    let report = full_report(&SuperPair::new(t), model.grid, cfg.mode)?;
    let passed = report.all_below(cfg.threshold);
    let mut meta = base_metadata("verify", cfg);
    meta.extend(model.metadata.iter().cloned());
    meta.extend(seed_meta);
    meta.push(("threshold".into(), format_number(cfg.threshold)));
    meta.push(("passed".into(), passed.to_string()));
    let text = match cfg.format {
        Format::Csv => {
            let mut s: String = meta.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect();
            s += &report.to_key_value();
            s
        }
        Format::Json => {
            let entries: Vec<_> = report
                .entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "name": e.name,
                        "max_residual": e.residual,
                        "certification": match e.certification {
                            Certification::Numeric => "numeric",
                            Certification::Structural => "structural",
                        },
                    })
                })
                .collect();
            let meta: serde_json::Map<_, _> =
                meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
            let doc = serde_json::json!({
                "metadata": meta,
                "grid": report.grid.to_string(),
                "mode": report.mode.as_str(),
                "entries": entries,
            });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Threshold(format!(
            "max residual {:.3e} exceeds threshold {:.3e}",
            report.max_residual(),
            cfg.threshold
        )))
    }
}

pub const SPECTRUM_COLUMNS: [&str; 7] = ["n", "sign", "mu", "lambda", "energy", "roundtrip_residual", "valid"];

/// One row per `(n, branch)`; a level whose radicand is negative has no row.
pub fn spectrum_table(p: CoulombParamsF64, n_max: usize) -> CliResult<OutputTable> {
    let mut rows = Vec::new();
    for n in 0..=n_max {
        for b in Branch::both() {
            let level = match coulomb_energy_unchecked(p, n, b) {
                Ok(l) => l,
                Err(Error::InvalidParams(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let valid = coulomb_energy(p, n, b).is_ok();
            rows.push(vec![
                n as f64,
                b.sign::<f64>(),
                level.mu,
                level.lambda,
                level.energy,
                level.roundtrip_residual.unwrap_or(f64::NAN),
                if valid { 1.0 } else { 0.0 },
            ]);
        }
    }
    OutputTable::new(&SPECTRUM_COLUMNS, rows)
}

pub fn spectrum(cfg: &JobConfig) -> CliResult<()> {
    if cfg.model != ModelKind::Coulomb {
        return Err(CliError::config("spectrum needs the coulomb model"));
    }
    let p = coulomb_params(cfg)?;
    let meta = base_metadata("spectrum", cfg);
    let table = annotate(spectrum_table(p, cfg.n_max)?, &meta);
    write_table(cfg, cfg.out.as_deref(), &table)
}

pub fn sample(cfg: &JobConfig) -> CliResult<()> {
    let model = build_model(cfg)?;
    let mut meta = base_metadata("sample", cfg);
    meta.extend(model.metadata.iter().cloned());
    let table = match cfg.sample_what.as_str() {
        "potential" => OutputTable::spatial(&POTENTIAL_COLUMNS, potential_rows(model.h0.potential(), model.grid)?)?
            .with_meta("quantity", "v0"),
        which => {
            let (s1, s2) = crate::models::build_seeds(cfg, &model)?;
            let s = if which == "seed1" { s1 } else { s2 };
            let f = s.sample(model.grid, &model.h0)?;
            OutputTable::spatial(&SPINOR_COLUMNS, spinor_rows(&f))?
                .with_meta("quantity", which)
                .with_meta("seed", s.label())
                .with_meta("seed.energy", s.energy().to_string())
        }
    };
    write_table(cfg, cfg.out.as_deref(), &annotate(table, &meta))
}
