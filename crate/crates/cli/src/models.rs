//! Turns a [`JobConfig`] into Hamiltonians, seeds and transforms.

use dirac_darboux::*;

use crate::config::{BranchChoice, JobConfig, ModelKind, SeedForm};
use crate::error::{CliError, CliResult};
use crate::table::OutputTable;

/// A built model: `h₀`, its working grid and descriptive metadata.
pub struct Model {
    pub h0: HamiltonianF64,
    pub grid: GridF64,
    pub coulomb: Option<CoulombParamsF64>,
    pub metadata: Vec<(String, String)>,
}

pub fn coulomb_params(cfg: &JobConfig) -> CliResult<CoulombParamsF64> {
    Ok(CoulombParams::new(cfg.mass, cfg.alpha, cfg.beta, cfg.kappa)?)
}

fn read_potential_table(cfg: &JobConfig) -> CliResult<PotentialF64> {
    let path = cfg.table.as_ref().ok_or_else(|| CliError::config("custom-table needs model.table"))?;
    let table = OutputTable::read(path)?;
    if table.columns.len() != 4 {
        return Err(CliError::config(format!("{}: expected columns x,v11,v12,v22", path.display())));
    }
    let rows: Vec<[f64; 4]> = table.rows.iter().map(|r| [r[0], r[1], r[2], r[3]]).collect();
    Ok(Potential::from_table(&rows)?)
}

pub fn build_model(cfg: &JobConfig) -> CliResult<Model> {
    let mut metadata = vec![("model".to_string(), cfg.model.as_str().to_string())];
    let (potential, coulomb, domain) = match cfg.model {
        ModelKind::Free => {
            metadata.push(("model.m".into(), cfg.mass.to_string()));
            (free_particle_potential(cfg.mass)?, None, None)
        }
        ModelKind::Coulomb => {
            let p = coulomb_params(cfg)?;
            for (k, v) in [("model.m", p.mass), ("model.alpha", p.alpha), ("model.beta", p.beta), ("model.kappa", p.kappa)] {
                metadata.push((k.into(), v.to_string()));
            }
            (coulomb_potential(p), Some(p), None)
        }
        ModelKind::CustomTable => {
            let v = read_potential_table(cfg)?;
            let domain = match v.domain() {
                Domain::Interval { min, max } => Some((min, max)),
                _ => None,
            };
            metadata.push(("model.table".into(), cfg.table.as_ref().map(|p| p.display().to_string()).unwrap_or_default()));
            (v, None, domain)
        }
    };
    let grid = cfg.grid(domain)?;
    potential.domain().check_grid(&grid)?;
    metadata.push(("grid".into(), grid.to_string()));
    Ok(Model { h0: DiracHamiltonian::new(potential), grid, coulomb, metadata })
}

fn branch_order(choice: BranchChoice) -> Vec<Branch> {
    match choice {
        BranchChoice::Auto => vec![Branch::Minus, Branch::Plus],
        BranchChoice::Fixed(b) => vec![b],
    }
}

/// Closed-form level `n`; `auto` takes the first of `−`, `+` that yields a valid solution.
pub fn coulomb_level_seed(p: CoulombParamsF64, n: usize, choice: BranchChoice) -> CliResult<SeedF64> {
    let mut last = None;
    for b in branch_order(choice) {
        match coulomb_energy(p, n, b).and_then(coulomb_solution) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one branch tried").into())
}

fn simplified_pair(cfg: &JobConfig, p: CoulombParamsF64) -> CliResult<(SeedF64, SeedF64)> {
    if cfg.levels != [0, 1] {
        return Err(CliError::config("seeds.form = simplified requires seeds.levels = 0,1"));
    }
    let mut last = None;
    for b0 in branch_order(cfg.branches[0]) {
        for b1 in branch_order(cfg.branches[1]) {
            match coulomb_seed_pair_simplified(p, b0, b1) {
                Ok(pair) => return Ok((pair.u1, pair.u2)),
                Err(e) => last = Some(e),
            }
        }
    }
    Err(last.expect("at least one branch pair tried").into())
}

fn coulomb_seeds(cfg: &JobConfig, p: CoulombParamsF64) -> CliResult<(SeedF64, SeedF64)> {
    let closed = || -> CliResult<(SeedF64, SeedF64)> {
        Ok((
            coulomb_level_seed(p, cfg.levels[0], cfg.branches[0])?,
            coulomb_level_seed(p, cfg.levels[1], cfg.branches[1])?,
        ))
    };
    match cfg.form {
        SeedForm::Closed => closed(),
        SeedForm::Simplified => simplified_pair(cfg, p),
        SeedForm::Auto => match closed() {
            Ok(pair) => Ok(pair),
            Err(_) if cfg.levels == [0, 1] => simplified_pair(cfg, p),
            Err(e) => Err(e),
        },
    }
}

/// Seed pair for the model: closed forms where available, shooting when
/// `seeds.energies` is set or the model is tabulated.
pub fn build_seeds(cfg: &JobConfig, model: &Model) -> CliResult<(SeedF64, SeedF64)> {
    if let Some([e1, e2]) = cfg.energies {
        let [a, b] = cfg.psi0;
        let s1 = shooting_seed(&model.h0, e1, Spinor2::new(a[0], a[1]), model.grid)?;
        let s2 = shooting_seed(&model.h0, e2, Spinor2::new(b[0], b[1]), model.grid)?;
        return Ok((s1, s2));
    }
    match (cfg.model, model.coulomb) {
        (ModelKind::Free, _) => Ok(free_seed_pair(FreeSeedParams::new(cfg.mass, cfg.energy, cfg.c)?)?),
        (ModelKind::Coulomb, Some(p)) => coulomb_seeds(cfg, p),
        _ => Err(CliError::config("custom-table needs seeds.energies")),
    }
}

pub fn build_transform(cfg: &JobConfig, model: &Model) -> CliResult<(TransformF64, Vec<(String, String)>)> {
    let (s1, s2) = build_seeds(cfg, model)?;
    let mut meta = vec![
        ("seed1".to_string(), s1.label().to_string()),
        ("seed2".to_string(), s2.label().to_string()),
        ("epsilon1".to_string(), s1.energy().to_string()),
        ("epsilon2".to_string(), s2.energy().to_string()),
    ];
    let t = DarbouxTransform::from_seeds(s1, s2, model.h0.clone(), model.grid)?;
    meta.push(("mode".into(), cfg.mode.to_string()));
    Ok((t, meta))
}
