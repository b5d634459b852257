use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest grid accepted; the fourth-order one-sided stencils need five nodes per side.
pub const MIN_GRID_POINTS: usize = 9;

/// Uniform grid `x_min, x_min + h, …, x_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    x_min: T,
    x_max: T,
    n_points: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if n_points < MIN_GRID_POINTS {
            return Err(Error::GridTooSmall { n_points, min: MIN_GRID_POINTS });
        }
        if !(x_min.is_finite() && x_max.is_finite()) || !(x_min < x_max) {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.n_points - 1)
    }

    /// Node `i`; the last node is exactly `x_max`.
    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + self.step() * T::from_usize_lossy(i)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    /// Same interval with the step halved.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }

    pub fn same_nodes(&self, other: &Self) -> bool {
        self == other
    }
}

impl<T: Scalar> fmt::Display for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.x_min, self.x_max, self.n_points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(
            GridSpec::new(0.0, 1.0, 8),
            Err(Error::GridTooSmall { n_points: 8, .. })
        ));
        assert!(GridSpec::new(1.0, 1.0, 11).is_err());
        assert!(GridSpec::new(2.0, 1.0, 11).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 11).is_err());
    }

    #[test]
    fn nodes_and_refinement() {
        let g = GridSpec::new(0.0f64, 1.0, 11).unwrap();
        assert!((g.step() - 0.1).abs() < 1e-16);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(10), 1.0);
        let r = g.refined();
        assert_eq!(r.n_points(), 21);
        assert!((r.step() - 0.05).abs() < 1e-16);
        assert_eq!(r.node(2), g.node(1));
        assert_eq!(g.to_string(), "0:1:11");
    }
}
