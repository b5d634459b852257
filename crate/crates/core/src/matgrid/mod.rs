//! Real 2×2 algebra, uniform grids, sampled fields and finite differences.

mod fd;
mod field;
mod grid;
mod mat2;

pub use fd::{fd_derivative, fd_values};
pub use field::{
    relative_residual, Analytic, DerivativeMode, FdOrder, FieldValue, JetFn, MatrixField, PointFn,
    SampledField, SpinorField, UNBOUNDED_ORDER,
};
pub use grid::{GridSpec, MIN_GRID_POINTS};
pub use mat2::{anticommutator, commutator, Mat2, Spinor2};
