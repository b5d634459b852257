use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

/// Real two-component spinor value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor2<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Scalar> Mat2<T> {
    pub const fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self { a11, a12, a21, a22 }
    }

    /// Symmetric matrix `[[d1, off], [off, d2]]`; the off-diagonal is stored twice from one value.
    pub fn symmetric(d1: T, off: T, d2: T) -> Self {
        Self::new(d1, off, off, d2)
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn diag(d1: T, d2: T) -> Self {
        Self::new(d1, T::zero(), T::zero(), d2)
    }

    pub fn scalar(s: T) -> Self {
        Self::diag(s, s)
    }

    /// `J = iσ₂ = [[0, 1], [−1, 0]]`, the real form of `iσ₂`.
    pub fn j() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    pub fn sigma1() -> Self {
        Self::new(T::zero(), T::one(), T::one(), T::zero())
    }

    pub fn sigma3() -> Self {
        Self::diag(T::one(), -T::one())
    }

    /// Matrix whose columns are `c1` and `c2`.
    pub fn from_columns(c1: Spinor2<T>, c2: Spinor2<T>) -> Self {
        Self::new(c1.c1, c2.c1, c1.c2, c2.c2)
    }

    pub fn col1(&self) -> Spinor2<T> {
        Spinor2::new(self.a11, self.a21)
    }

    pub fn col2(&self) -> Spinor2<T> {
        Spinor2::new(self.a12, self.a22)
    }

    pub fn column(&self, j: usize) -> Spinor2<T> {
        match j {
            0 => self.col1(),
            1 => self.col2(),
            _ => panic!("Mat2 column index {j} out of range"),
        }
    }

    pub fn det(&self) -> T {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> T {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (self.a11.abs() + self.a12.abs()).max(self.a21.abs() + self.a22.abs())
    }

    pub fn max_abs(&self) -> T {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    pub fn is_symmetric(&self) -> bool {
        self.a12 == self.a21
    }

    /// Inverse, refusing matrices whose determinant is negligible relative to `max(1, ‖m‖∞²)`.
    pub fn inv(&self) -> Result<Self> {
        let det = self.det();
        let scale = T::one().max(self.norm_inf() * self.norm_inf());
        if !(det.abs() > T::tol(1e-12) * scale) || !det.is_finite() {
            return Err(Error::SingularMatrix { det: det.as_f64() });
        }
        Ok(Self::new(self.a22 / det, -self.a12 / det, -self.a21 / det, self.a11 / det))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// `σ₂ m σ₂` for a real matrix, which equals `−J m J`.
    pub fn sigma2_conjugate(&self) -> Self {
        Self::new(self.a22, -self.a21, -self.a12, self.a11)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.a11), f(self.a12), f(self.a21), f(self.a22))
    }
}

/// `ab − ba`.
pub fn commutator<T: Scalar>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    a * b - b * a
}

/// `ab + ba`.
pub fn anticommutator<T: Scalar>(a: Mat2<T>, b: Mat2<T>) -> Mat2<T> {
    a * b + b * a
}

impl<T: Scalar> Spinor2<T> {
    pub const fn new(c1: T, c2: T) -> Self {
        Self { c1, c2 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn norm_inf(&self) -> T {
        self.c1.abs().max(self.c2.abs())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.c1 * other.c1 + self.c2 * other.c2
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.c1 * s, self.c2 * s)
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl<T: Scalar> AddAssign for Mat2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl<T: Scalar> Mul<Spinor2<T>> for Mat2<T> {
    type Output = Spinor2<T>;
    fn mul(self, s: Spinor2<T>) -> Spinor2<T> {
        Spinor2::new(self.a11 * s.c1 + self.a12 * s.c2, self.a21 * s.c1 + self.a22 * s.c2)
    }
}

impl<T: Scalar> Mul<T> for Mat2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> Add for Spinor2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c1 + o.c1, self.c2 + o.c2)
    }
}

impl<T: Scalar> AddAssign for Spinor2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Spinor2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c1 - o.c1, self.c2 - o.c2)
    }
}

impl<T: Scalar> Neg for Spinor2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c1, -self.c2)
    }
}

impl<T: Scalar> Mul<T> for Spinor2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}
