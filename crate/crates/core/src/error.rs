use thiserror::Error;

/// Every failure the library can report.
///
/// Positions and magnitudes are carried as `f64` regardless of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix (det = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("grid has {n_points} points, at least {min} required")]
    GridTooSmall { n_points: usize, min: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("x = {x} lies outside the potential's domain ({domain})")]
    DomainMismatch { x: f64, domain: String },
    #[error("field is identically zero")]
    ZeroField,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("energy branch invalid for n = {n}: round-trip residual {residual:e}")]
    BranchInvalid { n: usize, residual: f64 },
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("seed energies coincide (ε₁ = ε₂ = {energy})")]
    DegenerateSeeds { energy: f64 },
    #[error("seed matrix is singular at x = {x} (det u = {det:e})")]
    SingularSeedMatrix { x: f64, det: f64 },
    #[error("seed is not an eigenspinor at ε = {energy}: residual {residual:e}")]
    SeedNotEigen { energy: f64, residual: f64 },
    #[error("solution overflowed at x = {x}")]
    Overflow { x: f64 },
    #[error("empty test set")]
    EmptyTestSet,
    #[error("fields live on different grids")]
    GridMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
