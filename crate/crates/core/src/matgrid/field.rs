use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::grid::GridSpec;
use super::mat2::{Mat2, Spinor2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Point value a field can hold: `Mat2` or `Spinor2`.
pub trait FieldValue<T: Scalar>:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<T, Output = Self>
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn norm_inf(&self) -> T;
    fn is_finite(&self) -> bool;
}

impl<T: Scalar> FieldValue<T> for Mat2<T> {
    fn zero() -> Self {
        Mat2::zero()
    }
    fn norm_inf(&self) -> T {
        self.max_abs()
    }
    fn is_finite(&self) -> bool {
        Mat2::is_finite(self)
    }
}

impl<T: Scalar> FieldValue<T> for Spinor2<T> {
    fn zero() -> Self {
        Spinor2::zero()
    }
    fn norm_inf(&self) -> T {
        Spinor2::norm_inf(self)
    }
    fn is_finite(&self) -> bool {
        Spinor2::is_finite(self)
    }
}

/// `jet(x, n)` returns `[f(x), f'(x), …, f⁽ⁿ⁾(x)]`.
pub type JetFn<T, V> = Arc<dyn Fn(T, usize) -> Result<Vec<V>> + Send + Sync>;

/// Point-wise evaluator without derivatives.
pub type PointFn<T, V> = Arc<dyn Fn(T) -> V + Send + Sync>;

/// Marker for jets that can be differentiated to any order.
pub const UNBOUNDED_ORDER: usize = usize::MAX / 2;

/// Analytic description of a field: value and derivatives up to `max_order`.
#[derive(Clone)]
pub struct Analytic<T, V> {
    jet: JetFn<T, V>,
    max_order: usize,
}

impl<T: Scalar, V: FieldValue<T>> Analytic<T, V> {
    pub fn new(jet: JetFn<T, V>, max_order: usize) -> Self {
        Self { jet, max_order }
    }

    /// Value and first derivative given as separate closures.
    pub fn from_value_and_derivative(value: PointFn<T, V>, derivative: PointFn<T, V>) -> Self {
        let jet: JetFn<T, V> = Arc::new(move |x, n| {
            if n > 1 {
                return Err(Error::InvalidParams(format!(
                    "derivative of order {n} requested from a first-order evaluator"
                )));
            }
            let mut out = vec![value(x)];
            if n == 1 {
                out.push(derivative(x));
            }
            Ok(out)
        });
        Self { jet, max_order: 1 }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn jet(&self, x: T, n: usize) -> Result<Vec<V>> {
        if n > self.max_order {
            return Err(Error::InvalidParams(format!(
                "derivative of order {n} requested, evaluator provides {}",
                self.max_order
            )));
        }
        (self.jet)(x, n)
    }

    pub fn value(&self, x: T) -> Result<V> {
        Ok(self.jet(x, 0)?[0])
    }

    pub fn derivative(&self, x: T) -> Result<V> {
        Ok(self.jet(x, 1)?[1])
    }

    pub fn jet_fn(&self) -> JetFn<T, V> {
        Arc::clone(&self.jet)
    }
}

impl<T, V> fmt::Debug for Analytic<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analytic").field("max_order", &self.max_order).finish()
    }
}

/// How derivatives are obtained when operators act on fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeMode {
    /// Use analytic jets when the field carries them, fourth-order differences otherwise.
    Analytic,
    /// Always second-order finite differences.
    Fd2,
    /// Always fourth-order finite differences.
    Fd4,
}

impl DerivativeMode {
    /// Finite-difference order used by this mode when differencing is needed.
    pub fn fd_order(self) -> FdOrder {
        match self {
            DerivativeMode::Fd2 => FdOrder::Second,
            DerivativeMode::Analytic | DerivativeMode::Fd4 => FdOrder::Fourth,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DerivativeMode::Analytic => "analytic",
            DerivativeMode::Fd2 => "fd2",
            DerivativeMode::Fd4 => "fd4",
        }
    }
}

impl fmt::Display for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DerivativeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(DerivativeMode::Analytic),
            "fd2" => Ok(DerivativeMode::Fd2),
            "fd4" => Ok(DerivativeMode::Fd4),
            other => Err(Error::InvalidParams(format!("unknown derivative mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            o => Err(Error::InvalidParams(format!("finite-difference order {o} unsupported"))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }

    /// Nodes at each end that use one-sided stencils.
    pub fn boundary_width(self) -> usize {
        self.order() / 2
    }
}

/// Matrix- or spinor-valued function sampled on a uniform grid.
///
/// `margin` counts nodes at each end whose values came from one-sided
/// stencils (directly or through earlier operators); residual metrics skip them.
#[derive(Clone)]
pub struct SampledField<T, V> {
    grid: GridSpec<T>,
    values: Vec<V>,
    analytic: Option<Analytic<T, V>>,
    margin: usize,
}

pub type SpinorField<T> = SampledField<T, Spinor2<T>>;
pub type MatrixField<T> = SampledField<T, Mat2<T>>;

impl<T: Scalar, V: FieldValue<T>> SampledField<T, V> {
    /// Plain samples, no analytic information.
    pub fn from_values(grid: GridSpec<T>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values, analytic: None, margin: 0 })
    }

    pub(crate) fn from_values_with_margin(grid: GridSpec<T>, values: Vec<V>, margin: usize) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values, analytic: None, margin }
    }

    /// Samples a closure with no analytic derivative.
    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T) -> V) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values, analytic: None, margin: 0 }
    }

    /// Samples an analytic description at every node.
    pub fn from_analytic(grid: GridSpec<T>, analytic: Analytic<T, V>) -> Result<Self> {
        let values = grid
            .nodes()
            .map(|x| analytic.value(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, analytic: Some(analytic), margin: 0 })
    }

    /// Field with separate value and first-derivative evaluators.
    pub fn with_derivative(
        grid: GridSpec<T>,
        value: impl Fn(T) -> V + Send + Sync + 'static,
        derivative: impl Fn(T) -> V + Send + Sync + 'static,
    ) -> Self {
        let analytic = Analytic::from_value_and_derivative(Arc::new(value), Arc::new(derivative));
        Self::from_analytic(grid, analytic).expect("infallible evaluators")
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn value(&self, i: usize) -> V {
        self.values[i]
    }

    pub fn analytic(&self) -> Option<&Analytic<T, V>> {
        self.analytic.as_ref()
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Drops analytic information, keeping samples.
    pub fn sampled_only(&self) -> Self {
        Self { analytic: None, ..self.clone() }
    }

    /// Whether analytic derivatives of order `n` are available.
    pub fn has_derivatives(&self, n: usize) -> bool {
        self.analytic.as_ref().is_some_and(|a| a.max_order() >= n)
    }

    /// Index range used by residual metrics: skips the margin, and always the endpoints.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let m = self.margin.max(1);
        m..self.values.len().saturating_sub(m)
    }

    /// Max-norm over all nodes.
    pub fn max_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.norm_inf()))
    }

    /// Max-norm over the given index range.
    pub fn max_norm_over(&self, range: std::ops::Range<usize>) -> T {
        self.values[range].iter().fold(T::zero(), |acc, v| acc.max(v.norm_inf()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_nodes(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a·self + b·other`; analytic if both are.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| u * a + v * b)
            .collect();
        let analytic = match (&self.analytic, &other.analytic) {
            (Some(f), Some(g)) => {
                let (fj, gj) = (f.jet_fn(), g.jet_fn());
                let order = f.max_order().min(g.max_order());
                let jet: JetFn<T, V> = Arc::new(move |x, n| {
                    let (fv, gv) = (fj(x, n)?, gj(x, n)?);
                    Ok(fv.into_iter().zip(gv).map(|(u, v)| u * a + v * b).collect())
                });
                Some(Analytic::new(jet, order))
            }
            _ => None,
        };
        Ok(Self { grid: self.grid, values, analytic, margin: self.margin.max(other.margin) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(T::one(), other, -T::one())
    }

    pub fn scaled(&self, s: T) -> Self {
        let values = self.values.iter().map(|&v| v * s).collect();
        let analytic = self.analytic.as_ref().map(|f| {
            let fj = f.jet_fn();
            let jet: JetFn<T, V> =
                Arc::new(move |x, n| Ok(fj(x, n)?.into_iter().map(|v| v * s).collect()));
            Analytic::new(jet, f.max_order())
        });
        Self { grid: self.grid, values, analytic, margin: self.margin }
    }

    /// Largest node-wise deviation between the analytic evaluator and the samples.
    pub fn analytic_consistency(&self) -> Result<Option<T>> {
        let Some(a) = &self.analytic else { return Ok(None) };
        let mut worst = T::zero();
        for (x, v) in self.grid.nodes().zip(&self.values) {
            worst = worst.max((a.value(x)? - *v).norm_inf());
        }
        Ok(Some(worst))
    }
}

impl<T: Scalar, V: FieldValue<T>> fmt::Debug for SampledField<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledField")
            .field("grid", &self.grid)
            .field("analytic", &self.analytic)
            .field("margin", &self.margin)
            .finish_non_exhaustive()
    }
}

/// Relative residual `max‖r‖ / max‖ψ‖` over the interior shared by both fields.
pub fn relative_residual<T: Scalar, V: FieldValue<T>>(
    residual: &SampledField<T, V>,
    reference: &SampledField<T, V>,
) -> Result<T> {
    if !residual.grid.same_nodes(&reference.grid) {
        return Err(Error::GridMismatch);
    }
    let margin = residual.margin.max(reference.margin).max(1);
    let n = residual.values.len();
    if 2 * margin >= n {
        return Err(Error::GridTooSmall { n_points: n, min: 2 * margin + 1 });
    }
    let range = margin..n - margin;
    let denom = reference.max_norm_over(range.clone());
    if denom == T::zero() {
        return Err(Error::ZeroField);
    }
    Ok(residual.max_norm_over(range) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_samples_agree_with_evaluator() {
        let g = GridSpec::new(-1.0, 2.0, 31).unwrap();
        let f = SampledField::with_derivative(
            g,
            |x: f64| Spinor2::new(x.sin(), x * x),
            |x: f64| Spinor2::new(x.cos(), 2.0 * x),
        );
        assert!(f.analytic_consistency().unwrap().unwrap() <= 1e-13);
        assert!(f.has_derivatives(1));
        assert!(!f.has_derivatives(2));
        assert!(f.analytic().unwrap().jet(0.5, 2).is_err());
    }

    #[test]
    fn value_count_must_match() {
        let g = GridSpec::new(0.0, 1.0, 11).unwrap();
        assert!(SampledField::from_values(g, vec![Spinor2::<f64>::zero(); 10]).is_err());
    }

    #[test]
    fn residual_of_zero_reference_is_error() {
        let g = GridSpec::new(0.0, 1.0, 11).unwrap();
        let z = SampledField::from_fn(g, |_| Spinor2::<f64>::zero());
        assert_eq!(relative_residual(&z, &z), Err(Error::ZeroField));
    }

    #[test]
    fn combination_keeps_jets() {
        let g = GridSpec::new(0.0, 1.0, 11).unwrap();
        let f = SampledField::with_derivative(g, |x: f64| Spinor2::new(x, 0.0), |_| Spinor2::new(1.0, 0.0));
        let h = SampledField::with_derivative(g, |x: f64| Spinor2::new(0.0, x * x), |x| Spinor2::new(0.0, 2.0 * x));
        let c = f.linear_combination(2.0, &h, 3.0).unwrap();
        let d = c.analytic().unwrap().derivative(0.5).unwrap();
        assert_eq!(d, Spinor2::new(2.0, 3.0));
    }
}
