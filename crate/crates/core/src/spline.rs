//! Natural cubic spline used by tabulated potentials.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct CubicSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    // second derivatives at the knots
    m: Vec<T>,
}

impl<T: Scalar> CubicSpline<T> {
    pub fn natural(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::InvalidParams(format!(
                "spline needs ≥ 3 knots and matching lengths (got {} x, {} y)",
                n,
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParams("spline knots must be strictly increasing".into()));
        }
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        // Thomas algorithm on the tridiagonal system for interior second derivatives
        let mut diag = vec![T::zero(); n];
        let mut rhs = vec![T::zero(); n];
        let mut upper = vec![T::zero(); n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let lower = h0;
            diag[i] = two * (h0 + h1);
            upper[i] = h1;
            rhs[i] = six * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            if i > 1 {
                let w = lower / diag[i - 1];
                diag[i] = diag[i] - w * upper[i - 1];
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
        }
        let mut m = vec![T::zero(); n];
        for i in (1..n - 1).rev() {
            let next = if i + 1 < n - 1 { m[i + 1] } else { T::zero() };
            m[i] = (rhs[i] - upper[i] * next) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    fn segment(&self, x: T) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|k| k.partial_cmp(&x).expect("finite knots")) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value and derivatives up to order `n` (zero beyond the third).
    pub fn jet(&self, x: T, n: usize) -> Vec<T> {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let (m0, m1, y0, y1) = (self.m[i], self.m[i + 1], self.ys[i], self.ys[i + 1]);
        let six = T::lit(6.0);
        let mut out = vec![T::zero(); n + 1];
        out[0] = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / six;
        if n >= 1 {
            let three = T::lit(3.0);
            out[1] = (y1 - y0) / h - (three * a * a - T::one()) / six * h * m0
                + (three * b * b - T::one()) / six * h * m1;
        }
        if n >= 2 {
            out[2] = a * m0 + b * m1;
        }
        if n >= 3 {
            out[3] = (m1 - m0) / h;
        }
        out
    }
}
