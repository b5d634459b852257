use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Term cap of the ₁F₁ power series.
pub const MAX_SERIES_TERMS: usize = 10_000;

fn non_positive_integer<T: Scalar>(v: T) -> Option<usize> {
    if v <= T::zero() && v == v.round() {
        (-v).to_usize()
    } else {
        None
    }
}

/// Coefficients in `z` of ₁F₁(−n; b; z), the degree-`n` truncated series.
pub fn kummer_polynomial<T: Scalar>(n: usize, b: T) -> Result<Polynomial<T>> {
    check_b(b)?;
    let a = -T::from_usize_lossy(n);
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut term = T::one();
    coeffs.push(term);
    for j in 0..n {
        let jf = T::from_usize_lossy(j);
        term = term * (a + jf) / ((b + jf) * (jf + T::one()));
        coeffs.push(term);
    }
    Ok(Polynomial::new(coeffs))
}

fn check_b<T: Scalar>(b: T) -> Result<()> {
    if non_positive_integer(b).is_some() {
        return Err(Error::InvalidParams(format!("₁F₁ undefined for b = {b}")));
    }
    Ok(())
}

/// Confluent hypergeometric function ₁F₁(a; b; z).
///
/// Exact polynomial when `a` is a non-positive integer, otherwise the power
/// series summed to relative tolerance 1e−14.
pub fn kummer<T: Scalar>(a: T, b: T, z: T) -> Result<T> {
    check_b(b)?;
    if let Some(n) = non_positive_integer(a) {
        return Ok(kummer_polynomial(n, b)?.eval(z));
    }
    let tol = T::tol(1e-14);
    let mut sum = T::one();
    let mut term = T::one();
    let mut small_streak = 0;
    for j in 0..MAX_SERIES_TERMS {
        let jf = T::from_usize_lossy(j);
        term = term * (a + jf) * z / ((b + jf) * (jf + T::one()));
        sum = sum + term;
        if !sum.is_finite() {
            return Err(Error::NonConvergence { terms: j + 1 });
        }
        if term.abs() <= tol * sum.abs() {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_SERIES_TERMS })
}
