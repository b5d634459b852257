//! Golden comparisons of the pipeline against closed-form results.

use dirac_darboux::*;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Item {
    /// Free-particle partner potential, c = 0 and c = 0.3.
    #[value(name = "eq40")]
    FreePartner,
    /// Constants of the simplified flagship Coulomb seeds.
    #[value(name = "eq58-59")]
    CoulombConstants,
    /// Flagship Coulomb partner potential.
    #[value(name = "eq60")]
    FlagshipPartner,
    /// Zero-order coefficient of the flagship intertwiner.
    #[value(name = "eq61")]
    Intertwiner,
    /// Image of the n = 2 level under the flagship intertwiner.
    #[value(name = "eq62")]
    MappedLevel,
    /// Partner potential from the n = 1 and n = 2 levels.
    #[value(name = "eq64")]
    UpperPartner,
    All,
}

impl Item {
    pub const EACH: [Item; 6] = [Item::FreePartner, Item::CoulombConstants, Item::FlagshipPartner, Item::Intertwiner, Item::MappedLevel, Item::UpperPartner];

    pub fn name(self) -> &'static str {
        match self {
            Item::FreePartner => "eq40",
            Item::CoulombConstants => "eq58-59",
            Item::FlagshipPartner => "eq60",
            Item::Intertwiner => "eq61",
            Item::MappedLevel => "eq62",
            Item::UpperPartner => "eq64",
            Item::All => "all",
        }
    }
}

/// One measured deviation against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(label: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self { label: label.into(), deviation, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub item: Item,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let details: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{} max deviation {:.3e} (tol {:.0e})", c.label, c.deviation, c.tolerance))
            .collect();
        format!("{} {status} {}", self.item.name(), details.join("; "))
    }
}

const M: f64 = 1.0;

fn flagship() -> Result<CoulombParamsF64> {
    CoulombParams::new(M, 1.0, -1.0, 1.0)
}

fn flagship_transform(grid: GridF64) -> Result<TransformF64> {
    let p = flagship()?;
    let pair = coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus)?;
    DarbouxTransform::from_seeds(pair.u1, pair.u2, DiracHamiltonian::new(coulomb_potential(p)), grid)
}

fn half_line_grid() -> Result<GridF64> {
    GridSpec::new(0.1, 20.0, 2001)
}

fn max_dev(grid: GridF64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    grid.nodes().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

fn free_partner() -> Result<Vec<Check>> {
    let grid = GridSpec::new(-10.0, 10.0, 2001)?;
    let (m, e) = (1.0f64, 0.6f64);
    let k = (m * m - e * e).sqrt();
    let two_alpha = 0.5 * ((m - k) / (m + k)).ln();
    let mut checks = Vec::new();
    for c in [0.0, 0.3] {
        let (u1, u2) = free_seed_pair(FreeSeedParams::new(m, e, c)?)?;
        let t = DarbouxTransform::from_seeds(u1, u2, DiracHamiltonian::new(free_particle_potential(m)?), grid)?;
        let dev = max_dev(grid, |x| {
            let arg = 2.0 * k * x + two_alpha;
            let delta = m + e * arg.cosh() + e * e * c / k * arg.sinh();
            let (s3, s1) = (2.0 * e * e * c / delta, m - 2.0 * k * k / delta);
            Ok((t.v1().value(x)? - Mat2::new(s3, s1, s1, -s3)).max_abs())
        })?;
        checks.push(Check::new(format!("c={c}"), dev, 1e-10));
    }
    Ok(checks)
}

fn coulomb_constants() -> Result<Vec<Check>> {
    let k = coulomb_seed_pair_simplified(flagship()?, Branch::Plus, Branch::Minus)?.constants;
    let got = [k.lambda0, k.lambda1, k.c1, k.c2, k.c1c3, k.e0, k.e1];
    let want = [0.0, 4.0 * M / 5.0, 0.0, 4.0 / 15.0, 8.0 * M / 15.0, M, -3.0 * M / 5.0];
    let dev = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    Ok(vec![Check::new("constants", dev, 1e-12)])
}

fn flagship_partner() -> Result<Vec<Check>> {
    let grid = half_line_grid()?;
    let t = flagship_transform(grid)?;
    let dev = max_dev(grid, |x| {
        let s3 = 3.0 * M / 5.0 + 1.0 / x;
        let s1 = 2.0 / x - 4.0 * M / 5.0;
        Ok((t.v1().value(x)? - Mat2::new(1.0 / x + s3, s1, s1, 1.0 / x - s3)).max_abs())
    })?;
    Ok(vec![Check::new("v1", dev, 1e-10)])
}

fn intertwiner() -> Result<Vec<Check>> {
    let grid = half_line_grid()?;
    let t = flagship_transform(grid)?;
    let dev = max_dev(grid, |x| {
        let expect = Mat2::new(-1.0 / x, 2.0 * M / 5.0 - 2.0 / x, 0.0, 4.0 * M / 5.0 - 2.0 / x);
        Ok((t.sigma(x)? - expect).max_abs())
    })?;
    Ok(vec![Check::new("sigma", dev, 1e-10)])
}

fn mapped_level() -> Result<Vec<Check>> {
    let grid = half_line_grid()?;
    let t = flagship_transform(grid)?;
    let psi = coulomb_solution(coulomb_energy(flagship()?, 2, Branch::Minus)?)?;
    let image = t.apply_l(&psi.sample(grid, t.h0())?, DerivativeMode::Analytic)?;
    let dev = grid
        .nodes()
        .zip(image.values())
        .map(|(x, v)| {
            let pre = -6.0 / 125.0 * (-3.0 * M * x / 5.0).exp() * M * M * x * x;
            (*v - Spinor2::new(pre * (-10.0 + 3.0 * M * x), pre * (5.0 + 3.0 * M * x))).norm_inf()
        })
        .fold(0.0, f64::max);
    let residual = t.h1().eigen_residual(&image, -4.0 * M / 5.0)?;
    Ok(vec![Check::new("L psi", dev, 1e-8), Check::new("h1 eigen residual", residual, 1e-8)])
}

fn upper_partner() -> Result<Vec<Check>> {
    let grid = half_line_grid()?;
    let p = flagship()?;
    let s1 = coulomb_solution(coulomb_energy(p, 1, Branch::Minus)?)?;
    let s2 = coulomb_solution(coulomb_energy(p, 2, Branch::Minus)?)?;
    let t = DarbouxTransform::from_seeds(s1, s2, DiracHamiltonian::new(coulomb_potential(p)), grid)?;
    let dev = max_dev(grid, |x| {
        let d = 50.0 * x - 15.0 * M * x * x + 12.0 * M * M * x.powi(3);
        let a11 = 100.0 + 90.0 * M * x - 60.0 * M * M * x * x;
        let a12 = 100.0 - 115.0 * M * x - 27.0 * M * M * x * x + 12.0 * M.powi(3) * x.powi(3);
        let a22 = -120.0 * M * x + 84.0 * M * M * x * x;
        Ok((t.v1().value(x)? - Mat2::new(a11, a12, a12, a22).scale(1.0 / d)).max_abs())
    })?;
    Ok(vec![Check::new("v1", dev, 1e-8)])
}

pub fn run_item(item: Item) -> CliResult<Outcome> {
    let checks = match item {
        Item::FreePartner => free_partner(),
        Item::CoulombConstants => coulomb_constants(),
        Item::FlagshipPartner => flagship_partner(),
        Item::Intertwiner => intertwiner(),
        Item::MappedLevel => mapped_level(),
        Item::UpperPartner => upper_partner(),
        Item::All => unreachable!("expanded by the caller"),
    }?;
    Ok(Outcome { item, checks })
}

/// Runs the selection and returns the printed lines and whether all passed.
pub fn run(which: Item) -> CliResult<(Vec<String>, bool)> {
    let items: Vec<Item> = if which == Item::All { Item::EACH.to_vec() } else { vec![which] };
    let outcomes = items.into_iter().map(run_item).collect::<CliResult<Vec<_>>>()?;
    let mut lines: Vec<String> = outcomes.iter().map(Outcome::line).collect();
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    if which == Item::All {
        lines.push(format!("summary: {passed}/{} passed", outcomes.len()));
    }
    Ok((lines, passed == outcomes.len()))
}
