//! First-order matrix differential operators `P ψ = A ψ′ + B(x) ψ`.
//!
//! Every operator in the crate (h, h − ε, L, L†) has this shape with a constant
//! leading matrix `A`; compositions are nested applications.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::matgrid::{
    fd_values, Analytic, DerivativeMode, JetFn, Mat2, SampledField, Spinor2, SpinorField,
};
use crate::scalar::{binomial, Scalar};

/// `jet(x, n)` returns the matrix function and its first `n` derivatives.
pub type MatJet<T> = Arc<dyn Fn(T, usize) -> Result<Vec<Mat2<T>>> + Send + Sync>;

#[derive(Clone)]
pub struct FirstOrderOperator<T> {
    lead: Mat2<T>,
    coeff: MatJet<T>,
}

impl<T: Scalar> FirstOrderOperator<T> {
    pub fn new(lead: Mat2<T>, coeff: MatJet<T>) -> Self {
        Self { lead, coeff }
    }

    pub fn lead(&self) -> Mat2<T> {
        self.lead
    }

    pub fn coefficient(&self, x: T) -> Result<Mat2<T>> {
        Ok((self.coeff)(x, 0)?[0])
    }

    /// The same operator with `shift·I` added to the coefficient.
    pub fn shifted(&self, shift: T) -> Self {
        let coeff = Arc::clone(&self.coeff);
        let jet: MatJet<T> = Arc::new(move |x, n| {
            let mut out = coeff(x, n)?;
            out[0] += Mat2::scalar(shift);
            Ok(out)
        });
        Self { lead: self.lead, coeff: jet }
    }

    /// Applies the operator at a single point given the spinor jet there.
    ///
    /// `psi` must hold at least `n + 2` entries; returns `n + 1` derivatives of the image.
    pub fn apply_jet(&self, x: T, psi: &[Spinor2<T>], n: usize) -> Result<Vec<Spinor2<T>>> {
        let b = (self.coeff)(x, n)?;
        Ok(image_jet(self.lead, &b, psi, n))
    }

    pub fn apply(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        let grid = *psi.grid();
        match (mode, psi.analytic()) {
            (DerivativeMode::Analytic, Some(a)) if a.max_order() >= 1 => {
                let inner = a.jet_fn();
                let lead = self.lead;
                let coeff = Arc::clone(&self.coeff);
                let jet: JetFn<T, Spinor2<T>> = Arc::new(move |x, n| {
                    let p = inner(x, n + 1)?;
                    let b = coeff(x, n)?;
                    Ok(image_jet(lead, &b, &p, n))
                });
                SampledField::from_analytic(grid, Analytic::new(jet, a.max_order() - 1))
            }
            _ => {
                let order = mode.fd_order();
                let d = fd_values(psi.values(), grid.step(), order)?;
                let values = grid
                    .nodes()
                    .zip(d.iter().zip(psi.values()))
                    .map(|(x, (&dp, &p))| Ok(self.lead * dp + self.coefficient(x)? * p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SampledField::from_values_with_margin(
                    grid,
                    values,
                    psi.margin() + order.boundary_width(),
                ))
            }
        }
    }
}

impl<T> fmt::Debug for FirstOrderOperator<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FirstOrderOperator").field("lead", &self.lead).finish_non_exhaustive()
    }
}

/// Leibniz rule: `(Aψ′ + Bψ)⁽ᵐ⁾ = Aψ⁽ᵐ⁺¹⁾ + Σᵢ C(m,i) B⁽ⁱ⁾ ψ⁽ᵐ⁻ⁱ⁾` for `m = 0..=n`.
fn image_jet<T: Scalar>(lead: Mat2<T>, b: &[Mat2<T>], p: &[Spinor2<T>], n: usize) -> Vec<Spinor2<T>> {
    (0..=n)
        .map(|m| {
            let mut acc = lead * p[m + 1];
            for i in 0..=m {
                acc += b[i] * p[m - i] * binomial::<T>(m, i);
            }
            acc
        })
        .collect()
}

/// Jet of a constant matrix.
pub fn constant_jet<T: Scalar>(m: Mat2<T>) -> MatJet<T> {
    Arc::new(move |_x, n| {
        let mut out = vec![Mat2::zero(); n + 1];
        out[0] = m;
        Ok(out)
    })
}

/// Element-wise transpose of a matrix jet.
pub fn transposed_jet<T: Scalar>(jet: &MatJet<T>) -> MatJet<T> {
    let jet = Arc::clone(jet);
    Arc::new(move |x, n| Ok(jet(x, n)?.into_iter().map(|m| m.transpose()).collect()))
}
