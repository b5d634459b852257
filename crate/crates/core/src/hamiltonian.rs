//! Stationary Dirac Hamiltonians `h = J d/dx + v(x)` with real symmetric `v`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matgrid::{relative_residual, DerivativeMode, GridSpec, Mat2, SpinorField};
use crate::operator::{FirstOrderOperator, MatJet};
use crate::scalar::Scalar;
use crate::spline::CubicSpline;

/// Where a potential may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<T> {
    FullLine,
    /// `x > 0`.
    HalfLine,
    /// Closed interval, used by tabulated potentials.
    Interval { min: T, max: T },
}

impl<T: Scalar> Domain<T> {
    pub fn contains(&self, x: T) -> bool {
        match *self {
            Domain::FullLine => x.is_finite(),
            Domain::HalfLine => x > T::zero() && x.is_finite(),
            Domain::Interval { min, max } => x >= min && x <= max,
        }
    }

    /// Fails if any node of `grid` lies outside the domain.
    pub fn check_grid(&self, grid: &GridSpec<T>) -> Result<()> {
        for x in [grid.x_min(), grid.x_max()] {
            if !self.contains(x) {
                return Err(self.mismatch(x));
            }
        }
        Ok(())
    }

    fn mismatch(&self, x: T) -> Error {
        Error::DomainMismatch { x: x.as_f64(), domain: self.to_string() }
    }
}

impl<T: Scalar> fmt::Display for Domain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::FullLine => f.write_str("full line"),
            Domain::HalfLine => f.write_str("half line x > 0"),
            Domain::Interval { min, max } => write!(f, "[{min}, {max}]"),
        }
    }
}

/// Real symmetric matrix potential, evaluable with derivatives anywhere in its domain.
#[derive(Clone)]
pub struct Potential<T> {
    jet: MatJet<T>,
    domain: Domain<T>,
    descriptor: String,
}

impl<T: Scalar> Potential<T> {
    /// `jet(x, n)` must return `[v, v′, …, v⁽ⁿ⁾]` with symmetric entries.
    pub fn new(jet: MatJet<T>, domain: Domain<T>, descriptor: impl Into<String>) -> Self {
        Self { jet, domain, descriptor: descriptor.into() }
    }

    pub fn domain(&self) -> Domain<T> {
        self.domain
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn value(&self, x: T) -> Result<Mat2<T>> {
        Ok(self.jet(x, 0)?[0])
    }

    pub fn jet(&self, x: T, n: usize) -> Result<Vec<Mat2<T>>> {
        if !self.domain.contains(x) {
            return Err(self.domain.mismatch(x));
        }
        (self.jet)(x, n)
    }

    /// Jet closure with the domain check built in.
    pub fn jet_fn(&self) -> MatJet<T> {
        let this = self.clone();
        Arc::new(move |x, n| this.jet(x, n))
    }

    /// Adds `delta` to one entry pair (kept symmetric) of the value, not of its derivatives.
    pub fn perturbed(&self, row: usize, col: usize, delta: T) -> Self {
        let inner = Arc::clone(&self.jet);
        let jet: MatJet<T> = Arc::new(move |x, n| {
            let mut out = inner(x, n)?;
            let v = &mut out[0];
            match (row.min(col), row.max(col)) {
                (0, 0) => v.a11 = v.a11 + delta,
                (1, 1) => v.a22 = v.a22 + delta,
                _ => {
                    v.a12 = v.a12 + delta;
                    v.a21 = v.a21 + delta;
                }
            }
            Ok(out)
        });
        Self {
            jet,
            domain: self.domain,
            descriptor: format!("{} (perturbed)", self.descriptor),
        }
    }

    /// Interpolates a table of `(x, v11, v12, v22)` rows with natural cubic splines.
    pub fn from_table(rows: &[[T; 4]]) -> Result<Self> {
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        let xs = col(0);
        let s11 = CubicSpline::natural(xs.clone(), col(1))?;
        let s12 = CubicSpline::natural(xs.clone(), col(2))?;
        let s22 = CubicSpline::natural(xs, col(3))?;
        let domain = Domain::Interval { min: s11.x_min(), max: s11.x_max() };
        let jet: MatJet<T> = Arc::new(move |x, n| {
            let (a, b, c) = (s11.jet(x, n), s12.jet(x, n), s22.jet(x, n));
            Ok((0..=n).map(|k| Mat2::symmetric(a[k], b[k], c[k])).collect())
        });
        Ok(Self::new(jet, domain, format!("custom table ({} rows)", rows.len())))
    }
}

impl<T: Scalar> fmt::Debug for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("descriptor", &self.descriptor)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Free particle in the `v = mσ₁` realization.
pub fn free_particle_potential<T: Scalar>(m: T) -> Result<Potential<T>> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::InvalidParams(format!("mass must be positive, got {m}")));
    }
    let jet: MatJet<T> = Arc::new(move |_x, n| {
        let mut out = vec![Mat2::zero(); n + 1];
        out[0] = Mat2::sigma1() * m;
        Ok(out)
    });
    Ok(Potential::new(jet, Domain::FullLine, format!("free particle m={m}")))
}

/// Radial Dirac problem with vector `α/x` and scalar `β/x` couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombParams<T> {
    pub mass: T,
    pub alpha: T,
    pub beta: T,
    pub kappa: T,
}

impl<T: Scalar> CoulombParams<T> {
    pub fn new(mass: T, alpha: T, beta: T, kappa: T) -> Result<Self> {
        let p = Self { mass, alpha, beta, kappa };
        if !(mass > T::zero()) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if !(p.mu_squared() > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "k² + β² − α² = {} must be positive",
                p.mu_squared()
            )));
        }
        Ok(p)
    }

    pub fn mu_squared(&self) -> T {
        self.kappa * self.kappa + self.beta * self.beta - self.alpha * self.alpha
    }

    /// `μ = √(k² + β² − α²)`.
    pub fn mu(&self) -> T {
        self.mu_squared().sqrt()
    }

    /// Pure Coulomb descriptor check: `β = 0`.
    pub fn is_standard_coulomb(&self) -> bool {
        self.beta == T::zero()
    }

    /// `α = 1/137, β = 0`: the standard Coulomb interaction.
    pub fn standard_coulomb(mass: T, kappa: T) -> Result<Self> {
        Self::new(mass, T::one() / T::lit(137.0), T::zero(), kappa)
    }
}

/// `v₁₁ = M + (α+β)/x`, `v₂₂ = −M + (α−β)/x`, `v₁₂ = v₂₁ = k/x` on `x > 0`.
pub fn coulomb_potential<T: Scalar>(p: CoulombParams<T>) -> Potential<T> {
    let constant = Mat2::diag(p.mass, -p.mass);
    let inverse = Mat2::symmetric(p.alpha + p.beta, p.kappa, p.alpha - p.beta);
    let jet: MatJet<T> = Arc::new(move |x, n| {
        // d^j/dx^j (1/x) = (−1)^j j! / x^{j+1}
        let mut out = Vec::with_capacity(n + 1);
        let mut factor = T::one() / x;
        for j in 0..=n {
            if j > 0 {
                factor = -factor * T::from_usize_lossy(j) / x;
            }
            let m = inverse * factor;
            out.push(if j == 0 { constant + m } else { m });
        }
        Ok(out)
    });
    let kind = if p.is_standard_coulomb() { "standard Coulomb" } else { "generalized Coulomb" };
    Potential::new(
        jet,
        Domain::HalfLine,
        format!(
            "{kind} M={} alpha={} beta={} k={}",
            p.mass, p.alpha, p.beta, p.kappa
        ),
    )
}

/// `h = J d/dx + v(x)`.
#[derive(Clone)]
pub struct DiracHamiltonian<T> {
    potential: Potential<T>,
}

impl<T: Scalar> fmt::Debug for DiracHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiracHamiltonian").field("potential", &self.potential).finish()
    }
}

impl<T: Scalar> DiracHamiltonian<T> {
    pub fn new(potential: Potential<T>) -> Self {
        Self { potential }
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn domain(&self) -> Domain<T> {
        self.potential.domain()
    }

    /// The operator `h − shift`.
    pub fn operator_shifted(&self, shift: T) -> FirstOrderOperator<T> {
        FirstOrderOperator::new(Mat2::j(), self.potential.jet_fn()).shifted(-shift)
    }

    pub fn operator(&self) -> FirstOrderOperator<T> {
        self.operator_shifted(T::zero())
    }

    /// `Jψ′ + vψ`, analytic derivatives when `ψ` carries them.
    pub fn apply(&self, psi: &SpinorField<T>) -> Result<SpinorField<T>> {
        self.apply_with(psi, DerivativeMode::Analytic)
    }

    pub fn apply_with(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        self.domain().check_grid(psi.grid())?;
        self.operator().apply(psi, mode)
    }

    /// `(h − E)ψ`.
    pub fn apply_shifted(
        &self,
        psi: &SpinorField<T>,
        energy: T,
        mode: DerivativeMode,
    ) -> Result<SpinorField<T>> {
        self.domain().check_grid(psi.grid())?;
        self.operator_shifted(energy).apply(psi, mode)
    }

    /// `max‖hψ − Eψ‖ / max‖ψ‖` over interior nodes.
    pub fn eigen_residual(&self, psi: &SpinorField<T>, energy: T) -> Result<T> {
        self.eigen_residual_with(psi, energy, DerivativeMode::Analytic)
    }

    pub fn eigen_residual_with(
        &self,
        psi: &SpinorField<T>,
        energy: T,
        mode: DerivativeMode,
    ) -> Result<T> {
        if psi.max_norm() == T::zero() {
            return Err(Error::ZeroField);
        }
        let r = self.apply_shifted(psi, energy, mode)?;
        relative_residual(&r, psi)
    }
}

/// Free-function form of [`DiracHamiltonian::apply`].
pub fn apply_h<T: Scalar>(h: &DiracHamiltonian<T>, psi: &SpinorField<T>) -> Result<SpinorField<T>> {
    h.apply(psi)
}

/// Free-function form of [`DiracHamiltonian::eigen_residual`].
pub fn eigen_residual<T: Scalar>(h: &DiracHamiltonian<T>, psi: &SpinorField<T>, energy: T) -> Result<T> {
    h.eigen_residual(psi, energy)
}
