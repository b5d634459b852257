use std::sync::Arc;

use super::{Boundedness, SeedSolution};
use crate::error::{Error, Result};
use crate::matgrid::Spinor2;
use crate::scalar::Scalar;

/// Parameters of the free-particle seed pair at energies `±E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSeedParams<T> {
    pub mass: T,
    pub energy: T,
    pub c: T,
}

impl<T: Scalar> FreeSeedParams<T> {
    /// Requires `0 < E < m` and `|c| < k/E`.
    pub fn new(mass: T, energy: T, c: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if !(energy > T::zero() && energy < mass) {
            return Err(Error::InvalidParams(format!(
                "free seeds need 0 < E < m, got E={energy}, m={mass}"
            )));
        }
        let p = Self { mass, energy, c };
        if !(c.abs() < p.k() / energy) {
            return Err(Error::InvalidParams(format!(
                "|c| = {} must be below k/E = {} for a nodeless det u",
                c.abs(),
                p.k() / energy
            )));
        }
        Ok(p)
    }

    /// `k = √(m² − E²)`.
    pub fn k(&self) -> T {
        (self.mass * self.mass - self.energy * self.energy).sqrt()
    }

    /// `2α` with `e^{2α} = √((m − k)/(m + k))`.
    pub fn shift(&self) -> T {
        let k = self.k();
        ((self.mass - k) / (self.mass + k)).ln() / T::lit(2.0)
    }

    /// `Δ = m + E ch(2kx+2α) + (E²c/k) sh(2kx+2α)`.
    pub fn delta(&self, x: T) -> T {
        let (k, e) = (self.k(), self.energy);
        let arg = T::lit(2.0) * k * x + self.shift();
        self.mass + e * arg.cosh() + e * e * self.c / k * arg.sinh()
    }

    /// `det u` in closed form: `Δ / E`.
    pub fn det_closed_form(&self, x: T) -> T {
        self.delta(x) / self.energy
    }
}

/// Seeds `u₁` (energy `E`) and `u₂` (energy `−E`) of `v₀ = mσ₁`.
pub fn free_seed_pair<T: Scalar>(p: FreeSeedParams<T>) -> Result<(SeedSolution<T>, SeedSolution<T>)> {
    let p = FreeSeedParams::new(p.mass, p.energy, p.c)?;
    let (k, t) = (p.k(), p.shift());
    let a = p.c * p.energy / k;
    // u₁ = (ch y + a sh y, ch(y+t) + a sh(y+t)), y = kx
    let u1 = move |x: T| {
        let y = k * x;
        Ok(Spinor2::new(y.cosh() + a * y.sinh(), (y + t).cosh() + a * (y + t).sinh()))
    };
    let du1 = move |x: T| {
        let y = k * x;
        Ok(Spinor2::new(
            k * (y.sinh() + a * y.cosh()),
            k * ((y + t).sinh() + a * (y + t).cosh()),
        ))
    };
    let u2 = move |x: T| {
        let y = k * x;
        Ok(Spinor2::new(-y.cosh(), (y + t).cosh()))
    };
    let du2 = move |x: T| {
        let y = k * x;
        Ok(Spinor2::new(-k * y.sinh(), k * (y + t).sinh()))
    };
    let s1 = SeedSolution::new(
        p.energy,
        Arc::new(u1),
        Arc::new(du1),
        Boundedness::Unbounded,
        format!("free u1 (E={}, c={})", p.energy, p.c),
    );
    let s2 = SeedSolution::new(
        -p.energy,
        Arc::new(u2),
        Arc::new(du2),
        Boundedness::Unbounded,
        format!("free u2 (E={})", -p.energy),
    );
    Ok((s1, s2))
}
