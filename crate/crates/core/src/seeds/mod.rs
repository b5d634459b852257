//! Seed eigenspinors of `h₀`: closed forms for both built-in models and a
//! shooting integrator for anything else.

mod coulomb;
mod free;
mod kummer;
mod poly;
mod shooting;

use std::fmt;
use std::sync::Arc;

pub use coulomb::{
    coulomb_energy, coulomb_energy_unchecked, coulomb_seed_pair_simplified, coulomb_solution, Branch,
    CoulombLevel, CoulombSeedPair, SimplifiedPairConstants,
};
pub use free::{free_seed_pair, FreeSeedParams};
pub use kummer::{kummer, kummer_polynomial, MAX_SERIES_TERMS};
pub use poly::Polynomial;
pub use shooting::{shooting_seed, shooting_solve, shooting_solve_with, OVERFLOW_LIMIT, RK4_SUBSTEPS};

use crate::error::{Error, Result};
use crate::hamiltonian::DiracHamiltonian;
use crate::matgrid::{Analytic, GridSpec, JetFn, Mat2, SampledField, Spinor2, SpinorField, UNBOUNDED_ORDER};
use crate::scalar::{binomial, Scalar};

/// Fallible spinor evaluator.
pub type SpinorEval<T> = Arc<dyn Fn(T) -> Result<Spinor2<T>> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Unknown,
}

/// Eigenspinor `h₀u = εu` with value and first-derivative evaluators.
#[derive(Clone)]
pub struct SeedSolution<T> {
    energy: T,
    value: SpinorEval<T>,
    derivative: SpinorEval<T>,
    boundedness: Boundedness,
    label: String,
}

impl<T: Scalar> SeedSolution<T> {
    pub fn new(
        energy: T,
        value: SpinorEval<T>,
        derivative: SpinorEval<T>,
        boundedness: Boundedness,
        label: impl Into<String>,
    ) -> Self {
        Self { energy, value, derivative, boundedness, label: label.into() }
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn boundedness(&self) -> Boundedness {
        self.boundedness
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: T) -> Result<Spinor2<T>> {
        (self.value)(x)
    }

    pub fn derivative(&self, x: T) -> Result<Spinor2<T>> {
        (self.derivative)(x)
    }

    /// `[ψ, ψ′, …, ψ⁽ⁿ⁾]`; orders above one follow from the Dirac equation
    /// `ψ′ = −J(ε − v)ψ` differentiated with the Leibniz rule.
    pub fn jet(&self, h: &DiracHamiltonian<T>, x: T, n: usize) -> Result<Vec<Spinor2<T>>> {
        seed_jet(&self.value, &self.derivative, self.energy, h, x, n)
    }

    /// Analytic description with derivatives of any order.
    pub fn analytic(&self, h: &DiracHamiltonian<T>) -> Analytic<T, Spinor2<T>> {
        let (value, derivative, energy, h) =
            (Arc::clone(&self.value), Arc::clone(&self.derivative), self.energy, h.clone());
        let jet: JetFn<T, Spinor2<T>> =
            Arc::new(move |x, n| seed_jet(&value, &derivative, energy, &h, x, n));
        Analytic::new(jet, UNBOUNDED_ORDER)
    }

    /// Samples the seed on `grid` with analytic jets attached.
    pub fn sample(&self, grid: GridSpec<T>, h: &DiracHamiltonian<T>) -> Result<SpinorField<T>> {
        h.domain().check_grid(&grid)?;
        SampledField::from_analytic(grid, self.analytic(h))
    }

    /// Field carrying only the hand-derived first derivative.
    pub fn sample_first_order(&self, grid: GridSpec<T>) -> Result<SpinorField<T>> {
        let (value, derivative) = (Arc::clone(&self.value), Arc::clone(&self.derivative));
        let jet: JetFn<T, Spinor2<T>> = Arc::new(move |x, n| {
            let mut out = vec![value(x)?];
            if n >= 1 {
                out.push(derivative(x)?);
            }
            Ok(out)
        });
        SampledField::from_analytic(grid, Analytic::new(jet, 1))
    }

    /// Eigen residual on `grid`, using the hand-derived derivative.
    pub fn residual(&self, h: &DiracHamiltonian<T>, grid: GridSpec<T>) -> Result<T> {
        h.domain().check_grid(&grid)?;
        h.eigen_residual(&self.sample_first_order(grid)?, self.energy)
    }

    /// Fails with `SeedNotEigen` when the residual exceeds `tol`.
    pub fn validate(&self, h: &DiracHamiltonian<T>, grid: GridSpec<T>, tol: T) -> Result<T> {
        let r = self.residual(h, grid)?;
        if !(r <= tol) {
            return Err(Error::SeedNotEigen { energy: self.energy.as_f64(), residual: r.as_f64() });
        }
        Ok(r)
    }

    /// Same spinor with a new label.
    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        Self { label: label.into(), ..self.clone() }
    }
}

impl<T: Scalar> fmt::Debug for SeedSolution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeedSolution")
            .field("label", &self.label)
            .field("energy", &self.energy)
            .field("boundedness", &self.boundedness)
            .finish_non_exhaustive()
    }
}

fn seed_jet<T: Scalar>(
    value: &SpinorEval<T>,
    derivative: &SpinorEval<T>,
    energy: T,
    h: &DiracHamiltonian<T>,
    x: T,
    n: usize,
) -> Result<Vec<Spinor2<T>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(value(x)?);
    if n == 0 {
        return Ok(out);
    }
    out.push(derivative(x)?);
    if n == 1 {
        return Ok(out);
    }
    let v = h.potential().jet(x, n - 1)?;
    let j = Mat2::<T>::j();
    for k in 1..n {
        // ψ^(k+1) = −J(ε ψ^(k) − Σ_{i≤k} C(k,i) v^(i) ψ^(k−i))
        let mut acc = out[k] * energy;
        for i in 0..=k {
            acc = acc - v[i] * out[k - i] * binomial::<T>(k, i);
        }
        out.push(-(j * acc));
    }
    Ok(out)
}
