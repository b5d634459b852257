//! Numerical certification of the quadratic superalgebra carried by a
//! Darboux pair: intertwining, factorization and the block relations of
//! `H = diag(h₀, h₁)`, `Q = [[0, 0], [L, 0]]`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::darboux::DarbouxTransform;
use crate::error::{Error, Result};
use crate::hamiltonian::DiracHamiltonian;
use crate::matgrid::{
    relative_residual, Analytic, DerivativeMode, GridSpec, JetFn, Mat2, SampledField, Spinor2,
    SpinorField, UNBOUNDED_ORDER,
};
use crate::operator::{FirstOrderOperator, MatJet};
use crate::scalar::Scalar;
use crate::seeds::{shooting_seed, SeedSolution};

/// Seed of the random fields in the standard test set.
pub const TESTSET_SEED: u64 = 0x5eed_0d1a;

/// `h₀`, `h₁` and the intertwiners between them.
#[derive(Clone)]
pub struct SuperPair<T> {
    transform: DarbouxTransform<T>,
    h0: DiracHamiltonian<T>,
    h1: DiracHamiltonian<T>,
    l: FirstOrderOperator<T>,
    l_dagger: FirstOrderOperator<T>,
    epsilons: (T, T),
    mutated: bool,
}

impl<T: Scalar> SuperPair<T> {
    pub fn new(transform: DarbouxTransform<T>) -> Self {
        Self {
            h0: transform.h0().clone(),
            h1: transform.h1().clone(),
            l: transform.l_operator(),
            l_dagger: transform.l_dagger_operator(),
            epsilons: transform.epsilons(),
            transform,
            mutated: false,
        }
    }

    pub fn transform(&self) -> &DarbouxTransform<T> {
        &self.transform
    }

    pub fn h0(&self) -> &DiracHamiltonian<T> {
        &self.h0
    }

    pub fn h1(&self) -> &DiracHamiltonian<T> {
        &self.h1
    }

    pub fn epsilons(&self) -> (T, T) {
        self.epsilons
    }

    /// True once any of the `with_*_perturbed` builders has been applied.
    pub fn is_mutated(&self) -> bool {
        self.mutated
    }

    /// Replaces `h₁` by one whose potential has entry `(row, col)` shifted by `delta`.
    pub fn with_v1_perturbed(&self, row: usize, col: usize, delta: T) -> Self {
        let v = self.h1.potential().perturbed(row, col, delta);
        Self { h1: DiracHamiltonian::new(v), mutated: true, ..self.clone() }
    }

    /// Shifts entry `(row, col)` of σ inside `L` and `L†`.
    pub fn with_sigma_perturbed(&self, row: usize, col: usize, delta: T) -> Self {
        let base = self.transform.sigma_jet_fn();
        let mut e = Mat2::zero();
        match (row, col) {
            (0, 0) => e.a11 = delta,
            (0, _) => e.a12 = delta,
            (_, 0) => e.a21 = delta,
            _ => e.a22 = delta,
        }
        let sigma: MatJet<T> = Arc::new(move |x, n| {
            let mut out = base(x, n)?;
            out[0] += e;
            Ok(out)
        });
        let sigma_t = crate::operator::transposed_jet(&sigma);
        Self {
            l: FirstOrderOperator::new(Mat2::identity(), sigma),
            l_dagger: FirstOrderOperator::new(-Mat2::identity(), sigma_t),
            mutated: true,
            ..self.clone()
        }
    }

    /// Shifts `ε₁` (`which = 0`) or `ε₂` in the factorized side only.
    pub fn with_epsilon_perturbed(&self, which: usize, delta: T) -> Self {
        let (mut e1, mut e2) = self.epsilons;
        if which == 0 {
            e1 = e1 + delta;
        } else {
            e2 = e2 + delta;
        }
        Self { epsilons: (e1, e2), mutated: true, ..self.clone() }
    }

    fn apply_l(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        self.l.apply(psi, mode)
    }

    fn apply_l_dagger(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        self.l_dagger.apply(psi, mode)
    }

    /// `(h − ε₁)(h − ε₂)ψ` as two nested first-order applications.
    fn quadratic(&self, h: &DiracHamiltonian<T>, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        let (e1, e2) = self.epsilons;
        h.apply_shifted(&h.apply_shifted(psi, e2, mode)?, e1, mode)
    }
}

impl<T: Scalar> fmt::Debug for SuperPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuperPair")
            .field("epsilons", &self.epsilons)
            .field("mutated", &self.mutated)
            .finish_non_exhaustive()
    }
}

/// Test fields for the `h₀` and `h₁` sectors.
#[derive(Clone, Default)]
pub struct TestSet<T> {
    pub h0: Vec<SpinorField<T>>,
    pub h1: Vec<SpinorField<T>>,
}

impl<T: Scalar> TestSet<T> {
    /// Same fields with analytic jets removed.
    pub fn sampled_only(&self) -> Self {
        Self {
            h0: self.h0.iter().map(|f| f.sampled_only()).collect(),
            h1: self.h1.iter().map(|f| f.sampled_only()).collect(),
        }
    }

    /// Elements `(ψ_top, ψ_bottom)` of the four-component space, pairing the
    /// sectors cyclically.
    pub fn paired(&self) -> Vec<(SpinorField<T>, SpinorField<T>)> {
        let n = self.h0.len().max(self.h1.len());
        if self.h0.is_empty() || self.h1.is_empty() {
            return Vec::new();
        }
        (0..n)
            .map(|i| (self.h0[i % self.h0.len()].clone(), self.h1[i % self.h1.len()].clone()))
            .collect()
    }
}

/// Forward and adjoint halves of an identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResidual<T> {
    /// Residual on the `h₀` sector.
    pub h0_side: T,
    /// Residual on the `h₁` sector.
    pub h1_side: T,
}

impl<T: Scalar> PairResidual<T> {
    pub fn max(&self) -> T {
        self.h0_side.max(self.h1_side)
    }
}

fn max_over<T: Scalar>(
    fields: &[SpinorField<T>],
    mut residual: impl FnMut(&SpinorField<T>) -> Result<T>,
) -> Result<T> {
    if fields.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let mut worst = T::zero();
    for f in fields {
        worst = worst.max(residual(f)?);
    }
    Ok(worst)
}

/// `(Lh₀ − h₁L)ψ` on the `h₀` sector and `(L†h₁ − h₀L†)φ` on the `h₁` sector.
pub fn check_intertwining<T: Scalar>(
    p: &SuperPair<T>,
    testset: &TestSet<T>,
    mode: DerivativeMode,
) -> Result<PairResidual<T>> {
    let h0_side = max_over(&testset.h0, |psi| {
        let a = p.apply_l(&p.h0.apply_with(psi, mode)?, mode)?;
        let b = p.h1.apply_with(&p.apply_l(psi, mode)?, mode)?;
        relative_residual(&a.sub(&b)?, psi)
    })?;
    let h1_side = max_over(&testset.h1, |phi| {
        let a = p.apply_l_dagger(&p.h1.apply_with(phi, mode)?, mode)?;
        let b = p.h0.apply_with(&p.apply_l_dagger(phi, mode)?, mode)?;
        relative_residual(&a.sub(&b)?, phi)
    })?;
    Ok(PairResidual { h0_side, h1_side })
}

/// `L†L − (h₀−ε₁)(h₀−ε₂)` on the `h₀` sector and `LL† − (h₁−ε₁)(h₁−ε₂)`
/// on the `h₁` sector.
pub fn check_factorization<T: Scalar>(
    p: &SuperPair<T>,
    testset: &TestSet<T>,
    mode: DerivativeMode,
) -> Result<PairResidual<T>> {
    let h0_side = max_over(&testset.h0, |psi| {
        let a = p.apply_l_dagger(&p.apply_l(psi, mode)?, mode)?;
        let b = p.quadratic(&p.h0, psi, mode)?;
        relative_residual(&a.sub(&b)?, psi)
    })?;
    let h1_side = max_over(&testset.h1, |phi| {
        let a = p.apply_l(&p.apply_l_dagger(phi, mode)?, mode)?;
        let b = p.quadratic(&p.h1, phi, mode)?;
        relative_residual(&a.sub(&b)?, phi)
    })?;
    Ok(PairResidual { h0_side, h1_side })
}

/// Element of the four-component space; `None` is an exact zero block.
type Block<T> = (Option<SpinorField<T>>, Option<SpinorField<T>>);

fn block_sub<T: Scalar>(a: Block<T>, b: Block<T>) -> Result<Block<T>> {
    let sub = |x: Option<SpinorField<T>>, y: Option<SpinorField<T>>| -> Result<Option<SpinorField<T>>> {
        Ok(match (x, y) {
            (Some(x), Some(y)) => Some(x.sub(&y)?),
            (Some(x), None) => Some(x),
            (None, Some(y)) => Some(y.scaled(-T::one())),
            (None, None) => None,
        })
    };
    Ok((sub(a.0, b.0)?, sub(a.1, b.1)?))
}

fn block_add<T: Scalar>(a: Block<T>, b: Block<T>) -> Result<Block<T>> {
    let neg = |x: Option<SpinorField<T>>| x.map(|f| f.scaled(-T::one()));
    block_sub(a, (neg(b.0), neg(b.1)))
}

impl<T: Scalar> SuperPair<T> {
    fn block_h(&self, x: &Block<T>, mode: DerivativeMode) -> Result<Block<T>> {
        let top = x.0.as_ref().map(|f| self.h0.apply_with(f, mode)).transpose()?;
        let bottom = x.1.as_ref().map(|f| self.h1.apply_with(f, mode)).transpose()?;
        Ok((top, bottom))
    }

    fn block_h_shifted(&self, x: &Block<T>, e: T, mode: DerivativeMode) -> Result<Block<T>> {
        let top = x.0.as_ref().map(|f| self.h0.apply_shifted(f, e, mode)).transpose()?;
        let bottom = x.1.as_ref().map(|f| self.h1.apply_shifted(f, e, mode)).transpose()?;
        Ok((top, bottom))
    }

    /// `Q(a, b) = (0, La)`.
    fn block_q(&self, x: &Block<T>, mode: DerivativeMode) -> Result<Block<T>> {
        Ok((None, x.0.as_ref().map(|f| self.apply_l(f, mode)).transpose()?))
    }

    /// `Q†(a, b) = (L†b, 0)`.
    fn block_q_dagger(&self, x: &Block<T>, mode: DerivativeMode) -> Result<Block<T>> {
        Ok((x.1.as_ref().map(|f| self.apply_l_dagger(f, mode)).transpose()?, None))
    }
}

/// Residuals of the superalgebra relations on four-component test elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperalgebraResidual<T> {
    /// `[Q, H]`.
    pub q_h: T,
    /// `[Q†, H]`.
    pub q_dagger_h: T,
    /// `{Q, Q†} − (H − ε₁)(H − ε₂)`.
    pub anticommutator: T,
}

/// Each output block is normalized by the input block it is built from, so
/// the three numbers coincide with the intertwining and factorization checks.
pub fn check_superalgebra<T: Scalar>(
    p: &SuperPair<T>,
    testset4: &[(SpinorField<T>, SpinorField<T>)],
    mode: DerivativeMode,
) -> Result<SuperalgebraResidual<T>> {
    if testset4.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let (e1, e2) = p.epsilons;
    let norm = |r: &Option<SpinorField<T>>, src: &SpinorField<T>| -> Result<T> {
        r.as_ref().map_or(Ok(T::zero()), |r| relative_residual(r, src))
    };
    let mut out = SuperalgebraResidual { q_h: T::zero(), q_dagger_h: T::zero(), anticommutator: T::zero() };
    for (a, b) in testset4 {
        let x: Block<T> = (Some(a.clone()), Some(b.clone()));
        let hx = p.block_h(&x, mode)?;
        let qh = block_sub(p.block_q(&hx, mode)?, p.block_h(&p.block_q(&x, mode)?, mode)?)?;
        out.q_h = out.q_h.max(norm(&qh.0, b)?).max(norm(&qh.1, a)?);
        let qdh = block_sub(
            p.block_q_dagger(&hx, mode)?,
            p.block_h(&p.block_q_dagger(&x, mode)?, mode)?,
        )?;
        out.q_dagger_h = out.q_dagger_h.max(norm(&qdh.0, b)?).max(norm(&qdh.1, a)?);
        let anti = block_add(
            p.block_q(&p.block_q_dagger(&x, mode)?, mode)?,
            p.block_q_dagger(&p.block_q(&x, mode)?, mode)?,
        )?;
        let quad = p.block_h_shifted(&p.block_h_shifted(&x, e2, mode)?, e1, mode)?;
        let r = block_sub(anti, quad)?;
        out.anticommutator = out.anticommutator.max(norm(&r.0, a)?).max(norm(&r.1, b)?);
    }
    Ok(out)
}

/// `p(y) e^{−s y²}` per component, `y = x − center`, with exact jets.
#[derive(Debug, Clone)]
pub struct WavePacket<T> {
    pub center: T,
    pub s: T,
    pub upper: Vec<T>,
    pub lower: Vec<T>,
}

impl<T: Scalar> WavePacket<T> {
    fn component_jet(&self, coeffs: &[T], y: T, n: usize) -> Vec<T> {
        let g = (-self.s * y * y).exp();
        let mut q = coeffs.to_vec();
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            out.push(q.iter().rev().fold(T::zero(), |acc, &c| acc * y + c) * g);
            if k < n {
                // q ← q′ − 2s·y·q
                let mut next = vec![T::zero(); q.len() + 1];
                for (i, &c) in q.iter().enumerate() {
                    if i > 0 {
                        next[i - 1] = next[i - 1] + c * T::from_usize_lossy(i);
                    }
                    next[i + 1] = next[i + 1] - T::lit(2.0) * self.s * c;
                }
                q = next;
            }
        }
        out
    }

    pub fn jet(&self, x: T, n: usize) -> Vec<Spinor2<T>> {
        let y = x - self.center;
        let (a, b) = (self.component_jet(&self.upper, y, n), self.component_jet(&self.lower, y, n));
        a.into_iter().zip(b).map(|(u, l)| Spinor2::new(u, l)).collect()
    }

    pub fn sample(&self, grid: GridSpec<T>) -> Result<SpinorField<T>> {
        let this = self.clone();
        let jet: JetFn<T, Spinor2<T>> = Arc::new(move |x, n| Ok(this.jet(x, n)));
        SampledField::from_analytic(grid, Analytic::new(jet, UNBOUNDED_ORDER))
    }
}

/// Deterministic random packets centred in the middle of `grid` with widths
/// of a few percent of its length.
pub fn random_packets<T: Scalar>(grid: GridSpec<T>, count: usize, seed: u64) -> Vec<WavePacket<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (grid.x_min().as_f64(), grid.x_max().as_f64());
    let len = hi - lo;
    (0..count)
        .map(|_| {
            let center = lo + len * rng.gen_range(0.3..0.7);
            let width = len * rng.gen_range(0.005..0.015);
            let mut coeffs = || (0..3).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect::<Vec<_>>();
            let (upper, lower) = (coeffs(), coeffs());
            WavePacket {
                center: T::lit(center),
                s: T::lit(0.5 / (width * width)),
                upper,
                lower,
            }
        })
        .collect()
}

/// Energies for the shooting states: interior points of `[ε₂, ε₁]` away from both.
fn shooting_energies<T: Scalar>(e1: T, e2: T) -> [T; 3] {
    [0.25, 0.5, 0.8].map(|f| e2 + (e1 - e2) * T::lit(f))
}

/// Seeds, kernel spinors, three shooting states, their `L` images and five
/// random packets per sector.
pub fn standard_testset<T: Scalar>(t: &DarbouxTransform<T>, grid: GridSpec<T>) -> Result<TestSet<T>> {
    let (h0, h1) = (t.h0(), t.h1());
    let u = t.seed_matrix();
    let mut set = TestSet::default();
    let sample = |s: &SeedSolution<T>, h: &DiracHamiltonian<T>| s.sample(grid, h);
    set.h0.push(sample(u.seed1(), h0)?);
    set.h0.push(sample(u.seed2(), h0)?);
    let (k1, k2) = t.kernel_spinors_h1();
    set.h1.push(sample(&k1, h1)?);
    set.h1.push(sample(&k2, h1)?);
    let (e1, e2) = t.epsilons();
    for e in shooting_energies(e1, e2) {
        let s = shooting_seed(h0, e, Spinor2::new(T::one(), T::lit(0.5)), grid)?;
        set.h0.push(sample(&s, h0)?);
        set.h1.push(sample(&t.map_seed(&s), h1)?);
    }
    for p in random_packets(grid, 5, TESTSET_SEED) {
        set.h0.push(p.sample(grid)?);
    }
    for p in random_packets(grid, 5, TESTSET_SEED + 1) {
        set.h1.push(p.sample(grid)?);
    }
    Ok(set)
}

/// How a report entry was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    Numeric,
    /// Holds by the block layout; no number is computed.
    Structural,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry<T> {
    pub name: &'static str,
    pub residual: T,
    pub certification: Certification,
    pub grid: GridSpec<T>,
    pub mode: DerivativeMode,
}

/// Named residuals of all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub grid: GridSpec<T>,
    pub mode: DerivativeMode,
    pub entries: Vec<ReportEntry<T>>,
}

impl<T: Scalar> ResidualReport<T> {
    pub fn get(&self, name: &str) -> Option<&ReportEntry<T>> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn numeric(&self) -> impl Iterator<Item = &ReportEntry<T>> {
        self.entries.iter().filter(|e| e.certification == Certification::Numeric)
    }

    pub fn max_residual(&self) -> T {
        self.numeric().fold(T::zero(), |acc, e| acc.max(e.residual))
    }

    pub fn all_below(&self, threshold: T) -> bool {
        self.numeric().all(|e| e.residual <= threshold)
    }

    /// `coarse / fine` for every numeric entry present in both reports.
    pub fn ratios(coarse: &Self, fine: &Self) -> Vec<(&'static str, T)> {
        coarse
            .numeric()
            .filter_map(|c| fine.get(c.name).map(|f| (c.name, c.residual / f.residual)))
            .collect()
    }

    /// `key = value` lines, one block per check.
    pub fn to_key_value(&self) -> String {
        let mut out = format!("grid = {}\nmode = {}\n", self.grid, self.mode);
        for e in &self.entries {
            match e.certification {
                Certification::Numeric => {
                    out += &format!("{}.max_residual = {:.16e}\n", e.name, e.residual.as_f64());
                    out += &format!("{}.certification = numeric\n", e.name);
                }
                Certification::Structural => {
                    out += &format!("{}.max_residual = 0\n", e.name);
                    out += &format!("{}.certification = structural\n", e.name);
                }
            }
            out += &format!("{}.grid = {}\n{}.mode = {}\n", e.name, e.grid, e.name, e.mode);
        }
        out
    }
}

impl<T: Scalar> fmt::Display for ResidualReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_key_value())
    }
}

pub const ENTRY_NAMES: [&str; 9] = [
    "intertwining.forward",
    "intertwining.adjoint",
    "factorization.h0",
    "factorization.h1",
    "superalgebra.q_h",
    "superalgebra.q_dagger_h",
    "superalgebra.anticommutator",
    "superalgebra.q_squared",
    "superalgebra.q_dagger_squared",
];

/// Runs every check on a testset; analytic jets are dropped in the finite
/// difference modes.
pub fn report_for<T: Scalar>(
    p: &SuperPair<T>,
    testset: &TestSet<T>,
    grid: GridSpec<T>,
    mode: DerivativeMode,
) -> Result<ResidualReport<T>> {
    let owned;
    let set = if mode == DerivativeMode::Analytic {
        testset
    } else {
        owned = testset.sampled_only();
        &owned
    };
    let inter = check_intertwining(p, set, mode)?;
    let fact = check_factorization(p, set, mode)?;
    let alg = check_superalgebra(p, &set.paired(), mode)?;
    let values = [
        inter.h0_side,
        inter.h1_side,
        fact.h0_side,
        fact.h1_side,
        alg.q_h,
        alg.q_dagger_h,
        alg.anticommutator,
    ];
    let mut entries: Vec<ReportEntry<T>> = ENTRY_NAMES[..7]
        .iter()
        .zip(values)
        .map(|(&name, residual)| ReportEntry { name, residual, certification: Certification::Numeric, grid, mode })
        .collect();
    for &name in &ENTRY_NAMES[7..] {
        entries.push(ReportEntry { name, residual: T::zero(), certification: Certification::Structural, grid, mode });
    }
    if let Some(bad) = entries.iter().find(|e| !e.residual.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite residual in {}", bad.name)));
    }
    Ok(ResidualReport { grid, mode, entries })
}

/// All checks on the standard testset generated from the pair's transform.
pub fn full_report<T: Scalar>(p: &SuperPair<T>, grid: GridSpec<T>, mode: DerivativeMode) -> Result<ResidualReport<T>> {
    let set = standard_testset(&p.transform, grid)?;
    report_for(p, &set, grid, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{coulomb_potential, free_particle_potential, CoulombParams};
    use crate::seeds::{coulomb_seed_pair_simplified, free_seed_pair, Branch, FreeSeedParams};

    fn free_pair() -> SuperPair<f64> {
        let (u1, u2) = free_seed_pair(FreeSeedParams::new(1.0, 0.6, 0.3).unwrap()).unwrap();
        let h = DiracHamiltonian::new(free_particle_potential(1.0).unwrap());
        SuperPair::new(DarbouxTransform::from_seeds(u1, u2, h, free_grid()).unwrap())
    }

    fn free_grid() -> GridSpec<f64> {
        GridSpec::new(-5.0, 5.0, 1001).unwrap()
    }

    #[test]
    fn packet_jets_match_fd() {
        let p = &random_packets(free_grid(), 1, 7)[0];
        let h = 1e-5;
        for x in [-1.0, -0.1, 0.4, 2.0] {
            let j = p.jet(x, 2);
            let fd = (p.jet(x + h, 0)[0] - p.jet(x - h, 0)[0]) * (0.5 / h);
            assert!((j[1] - fd).norm_inf() < 1e-6 * j[1].norm_inf().max(1.0));
            let fd2 = (p.jet(x + h, 1)[1] - p.jet(x - h, 1)[1]) * (0.5 / h);
            assert!((j[2] - fd2).norm_inf() < 1e-5 * j[2].norm_inf().max(1.0));
        }
    }

    #[test]
    fn packets_are_deterministic() {
        let a = random_packets(free_grid(), 3, TESTSET_SEED);
        let b = random_packets(free_grid(), 3, TESTSET_SEED);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.center, q.center);
            assert_eq!(p.upper, q.upper);
        }
    }

    #[test]
    fn empty_testset_is_rejected() {
        let p = free_pair();
        let r = check_intertwining(&p, &TestSet::default(), DerivativeMode::Analytic);
        assert!(matches!(r, Err(Error::EmptyTestSet)));
        assert!(matches!(check_superalgebra(&p, &[], DerivativeMode::Analytic), Err(Error::EmptyTestSet)));
    }

    #[test]
    fn kernel_elements_vanish_on_both_sides() {
        let p = free_pair();
        let u1 = p.transform().seed_matrix().seed1().sample(free_grid(), p.h0()).unwrap();
        let mode = DerivativeMode::Analytic;
        let lu = p.apply_l(&u1, mode).unwrap();
        assert!(lu.max_norm() <= 1e-9 * u1.max_norm());
        let lhs = p.apply_l_dagger(&lu, mode).unwrap();
        let rhs = p.quadratic(p.h0(), &u1, mode).unwrap();
        assert!(lhs.max_norm() <= 1e-8 * u1.max_norm());
        assert!(rhs.max_norm() <= 1e-8 * u1.max_norm());
    }

    #[test]
    fn factorization_on_eigenstate_is_scalar() {
        let p = free_pair();
        let grid = free_grid();
        let s = shooting_seed(p.h0(), 0.3, Spinor2::new(1.0, 0.0), grid).unwrap();
        let psi = s.sample(grid, p.h0()).unwrap();
        let mode = DerivativeMode::Analytic;
        let lhs = p.apply_l_dagger(&p.apply_l(&psi, mode).unwrap(), mode).unwrap();
        let k = (0.3 - 0.6) * (0.3 + 0.6);
        assert!(relative_residual(&lhs.sub(&psi.scaled(k)).unwrap(), &psi).unwrap() <= 1e-6);
    }

    #[test]
    fn superalgebra_equals_component_checks() {
        let p = free_pair();
        let set = standard_testset(p.transform(), free_grid()).unwrap();
        for mode in [DerivativeMode::Analytic, DerivativeMode::Fd2] {
            let r = report_for(&p, &set, free_grid(), mode).unwrap();
            let v = |n: &str| r.get(n).unwrap().residual;
            assert_eq!(v("superalgebra.q_h"), v("intertwining.forward"));
            assert_eq!(v("superalgebra.q_dagger_h"), v("intertwining.adjoint"));
            assert_eq!(v("superalgebra.anticommutator"), v("factorization.h0").max(v("factorization.h1")));
        }
    }

    #[test]
    fn free_report_analytic() {
        let r = full_report(&free_pair(), free_grid(), DerivativeMode::Analytic).unwrap();
        assert_eq!(r.entries.len(), 9);
        assert!(r.all_below(1e-8), "{r}");
        assert_eq!(r.get("superalgebra.q_squared").unwrap().certification, Certification::Structural);
        let text = r.to_key_value();
        assert!(text.contains("superalgebra.q_squared.certification = structural"));
        assert!(text.contains("mode = analytic"));
    }

    #[test]
    fn coulomb_report_analytic() {
        let p = CoulombParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        let pair = coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus).unwrap();
        let grid = GridSpec::new(0.05, 15.0, 1001).unwrap();
        let t = DarbouxTransform::from_seeds(pair.u1, pair.u2, DiracHamiltonian::new(coulomb_potential(p)), grid)
            .unwrap();
        let r = full_report(&SuperPair::new(t), grid, DerivativeMode::Analytic).unwrap();
        assert!(r.all_below(1e-7), "{r}");
    }

    #[test]
    fn mutations_are_detected() {
        let p = free_pair();
        let grid = free_grid();
        let set = standard_testset(p.transform(), grid).unwrap();
        let mode = DerivativeMode::Analytic;
        let base = report_for(&p, &set, grid, mode).unwrap().max_residual();
        let corrupted = p.with_v1_perturbed(0, 1, 1e-3);
        let inter = check_intertwining(&corrupted, &set, mode).unwrap();
        assert!(inter.max() > 1e-4);
        for delta in [1e-5, 1e-3] {
            for m in [
                p.with_v1_perturbed(0, 0, delta),
                p.with_v1_perturbed(1, 0, delta),
                p.with_sigma_perturbed(0, 0, delta),
                p.with_sigma_perturbed(1, 0, delta),
                p.with_epsilon_perturbed(0, delta),
                p.with_epsilon_perturbed(1, delta),
            ] {
                assert!(m.is_mutated());
                let worst = report_for(&m, &set, grid, mode).unwrap().max_residual();
                assert!(worst > 10.0 * delta && worst > 100.0 * base, "δ={delta}: {worst:e}");
            }
        }
    }

    #[test]
    fn fd2_residuals_converge() {
        let p = free_pair();
        let coarse = full_report(&p, free_grid(), DerivativeMode::Fd2).unwrap();
        let fine = full_report(&p, free_grid().refined(), DerivativeMode::Fd2).unwrap();
        for (name, ratio) in ResidualReport::ratios(&coarse, &fine) {
            assert!((3.5..=4.5).contains(&ratio), "{name}: {ratio}");
        }
    }
}
