//! Darboux transformations of the one-dimensional stationary Dirac equation
//! `h = iσ₂ d/dx + v(x)` with real symmetric 2×2 potentials.
//!
//! Two seed eigenspinors `h₀u₁ = ε₁u₁`, `h₀u₂ = ε₂u₂` define the intertwiner
//! `L = d/dx − uₓu⁻¹` and a partner `h₁` with `Lh₀ = h₁L`. The products
//! `L†L` and `LL†` are quadratic in `h₀` and `h₁`, which is checked
//! numerically by [`susy_verify`].
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the double-precision instantiation.
//!
//! ```
//! use dirac_darboux::*;
//!
//! let (u1, u2) = free_seed_pair(FreeSeedParams::new(1.0_f64, 0.6, 0.0)?)?;
//! let h0 = DiracHamiltonian::new(free_particle_potential(1.0)?);
//! let grid = GridSpec::new(-10.0, 10.0, 2001)?;
//! let t = DarbouxTransform::from_seeds(u1, u2, h0, grid)?;
//! let v1 = t.v1().value(0.0)?;
//! assert!(v1.a11.abs() < 1e-12);
//! # Ok::<(), dirac_darboux::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod darboux;
pub mod error;
pub mod hamiltonian;
pub mod matgrid;
pub mod operator;
pub mod scalar;
pub mod seeds;
mod spline;
pub mod susy_verify;

pub use darboux::{
    build_seed_matrix, kernel_spinors_h1, partner_potential, partner_potential_commutator,
    sigma_analytic, sigma_direct, DarbouxTransform, SeedMatrix,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    apply_h, coulomb_potential, eigen_residual, free_particle_potential, CoulombParams,
    DiracHamiltonian, Domain, Potential,
};
pub use matgrid::{DerivativeMode, GridSpec, Mat2, SampledField, Spinor2};
pub use scalar::Scalar;
pub use seeds::{
    coulomb_energy, coulomb_seed_pair_simplified, coulomb_solution, free_seed_pair, kummer,
    shooting_seed, shooting_solve, Boundedness, Branch, CoulombLevel, FreeSeedParams,
    SeedSolution,
};
pub use susy_verify::{full_report, ResidualReport, SuperPair};

pub type Mat2F64 = Mat2<f64>;
pub type Spinor2F64 = Spinor2<f64>;
pub type GridF64 = GridSpec<f64>;
pub type SpinorFieldF64 = matgrid::SpinorField<f64>;
pub type MatrixFieldF64 = matgrid::MatrixField<f64>;
pub type PotentialF64 = Potential<f64>;
pub type HamiltonianF64 = DiracHamiltonian<f64>;
pub type CoulombParamsF64 = CoulombParams<f64>;
pub type SeedF64 = SeedSolution<f64>;
pub type SeedMatrixF64 = SeedMatrix<f64>;
pub type TransformF64 = DarbouxTransform<f64>;
pub type SuperPairF64 = SuperPair<f64>;
pub type ReportF64 = ResidualReport<f64>;
