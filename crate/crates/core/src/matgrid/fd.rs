use super::field::{FdOrder, FieldValue, SampledField};
use super::grid::MIN_GRID_POINTS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite-difference derivative of a sampled field.
///
/// Central stencils inside, one-sided stencils of the same order at the ends.
/// The result has no analytic evaluator and a margin widened by the
/// boundary width of the stencil.
pub fn fd_derivative<T: Scalar, V: FieldValue<T>>(
    f: &SampledField<T, V>,
    order: FdOrder,
) -> Result<SampledField<T, V>> {
    let values = fd_values(f.values(), f.grid().step(), order)?;
    Ok(SampledField::from_values_with_margin(
        *f.grid(),
        values,
        f.margin() + order.boundary_width(),
    ))
}

/// Differentiates equally spaced samples with spacing `h`.
pub fn fd_values<T: Scalar, V: FieldValue<T>>(f: &[V], h: T, order: FdOrder) -> Result<Vec<V>> {
    let n = f.len();
    if n < MIN_GRID_POINTS {
        return Err(Error::GridTooSmall { n_points: n, min: MIN_GRID_POINTS });
    }
    let c = |v: f64| T::lit(v);
    let mut out = vec![V::zero(); n];
    match order {
        FdOrder::Second => {
            let inv = T::one() / (c(2.0) * h);
            for i in 1..n - 1 {
                out[i] = (f[i + 1] - f[i - 1]) * inv;
            }
            out[0] = (f[0] * c(-3.0) + f[1] * c(4.0) - f[2]) * inv;
            out[n - 1] = (f[n - 1] * c(3.0) - f[n - 2] * c(4.0) + f[n - 3]) * inv;
        }
        FdOrder::Fourth => {
            let inv = T::one() / (c(12.0) * h);
            for i in 2..n - 2 {
                out[i] = (f[i - 2] - f[i - 1] * c(8.0) + f[i + 1] * c(8.0) - f[i + 2]) * inv;
            }
            let edge0 = |a: &dyn Fn(usize) -> V| {
                a(0) * c(-25.0) + a(1) * c(48.0) - a(2) * c(36.0) + a(3) * c(16.0) - a(4) * c(3.0)
            };
            let edge1 = |a: &dyn Fn(usize) -> V| {
                a(0) * c(-3.0) - a(1) * c(10.0) + a(2) * c(18.0) - a(3) * c(6.0) + a(4)
            };
            let fwd = |k: usize| f[k];
            let bwd = |k: usize| f[n - 1 - k];
            out[0] = edge0(&fwd) * inv;
            out[1] = edge1(&fwd) * inv;
            out[n - 1] = -(edge0(&bwd) * inv);
            out[n - 2] = -(edge1(&bwd) * inv);
        }
    }
    Ok(out)
}
