use std::ops::{Add, Mul};

use crate::scalar::Scalar;

/// Dense real polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![T::zero()] } else { coeffs };
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(T::zero());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * T::from_usize_lossy(i))
                .collect(),
        )
    }

    /// `p(s·x)`.
    pub fn rescaled(&self, s: T) -> Self {
        let mut f = T::one();
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let out = c * f;
                    f = f * s;
                    out
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a.max(c.abs()))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, o: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Polynomial<T>, i: usize| p.coeffs.get(i).copied().unwrap_or_else(T::zero);
        Polynomial::new((0..n).map(|i| get(self, i) + get(o, i)).collect())
    }
}

impl<T: Scalar> Mul<T> for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, s: T) -> Polynomial<T> {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Polynomial::new(vec![-2.0, 6.0]));
        assert_eq!(p.rescaled(2.0), Polynomial::new(vec![1.0, -4.0, 12.0]));
        let q = &p + &Polynomial::constant(1.0);
        assert_eq!(q.eval(0.0), 2.0);
    }
}
