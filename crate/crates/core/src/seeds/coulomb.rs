use std::fmt;
use std::sync::Arc;

use super::kummer::kummer_polynomial;
use super::poly::Polynomial;
use super::{Boundedness, SeedSolution};
use crate::error::{Error, Result};
use crate::hamiltonian::{coulomb_potential, CoulombParams, Potential};
use crate::matgrid::{Mat2, Spinor2};
use crate::scalar::Scalar;

/// Sign choice in the closed-form energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }

    pub fn both() -> [Branch; 2] {
        [Branch::Plus, Branch::Minus]
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(Error::InvalidParams(format!("unknown branch '{other}'"))),
        }
    }
}

/// One level of the generalized Coulomb problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombLevel<T> {
    pub params: CoulombParams<T>,
    pub n: usize,
    pub branch: Branch,
    pub mu: T,
    pub lambda: T,
    pub energy: T,
    /// `|n + (αE/λ + βM/λ + μ)|`, absent when `λ = 0`.
    pub roundtrip_residual: Option<T>,
}

impl<T: Scalar> CoulombLevel<T> {
    pub fn is_degenerate(&self) -> bool {
        self.lambda == T::zero()
    }
}

/// Tolerance of the level-number round-trip.
const ROUNDTRIP_TOL: f64 = 1e-9;

/// Energy `E_n` on the chosen branch, with `λ_n` and the round-trip check.
pub fn coulomb_energy<T: Scalar>(p: CoulombParams<T>, n: usize, branch: Branch) -> Result<CoulombLevel<T>> {
    let level = coulomb_energy_unchecked(p, n, branch)?;
    if let Some(r) = level.roundtrip_residual {
        if !(r <= T::tol(ROUNDTRIP_TOL)) {
            return Err(Error::BranchInvalid { n, residual: r.as_f64() });
        }
    }
    Ok(level)
}

/// Like [`coulomb_energy`] but reports a failed round-trip instead of erroring.
pub fn coulomb_energy_unchecked<T: Scalar>(
    p: CoulombParams<T>,
    n: usize,
    branch: Branch,
) -> Result<CoulombLevel<T>> {
    let p = CoulombParams::new(p.mass, p.alpha, p.beta, p.kappa)?;
    let (m, a, b) = (p.mass, p.alpha, p.beta);
    let mu = p.mu();
    let nm = T::from_usize_lossy(n) + mu;
    let disc = a * a + nm * nm - b * b;
    if disc < T::zero() {
        return Err(Error::InvalidParams(format!(
            "α² + (n+μ)² − β² = {disc} is negative for n = {n}"
        )));
    }
    let energy = m * (-a * b + branch.sign::<T>() * nm * disc.sqrt()) / (a * a + nm * nm);
    let lambda_sq = (m - energy) * (m + energy);
    let lambda = if lambda_sq <= T::lit(8.0) * T::epsilon() * m * m {
        T::zero()
    } else {
        lambda_sq.sqrt()
    };
    let roundtrip_residual = (lambda > T::zero()).then(|| {
        let recovered = -(a * energy / lambda + b * m / lambda + mu);
        (recovered - T::from_usize_lossy(n)).abs()
    });
    Ok(CoulombLevel { params: p, n, branch, mu, lambda, energy, roundtrip_residual })
}

/// `x^μ e^{−λx} (P(x), Q(x))` with polynomial `P`, `Q`.
#[derive(Debug, Clone)]
struct RadialForm<T> {
    mu: T,
    lambda: T,
    upper: Polynomial<T>,
    lower: Polynomial<T>,
}

impl<T: Scalar> RadialForm<T> {
    fn value(&self, x: T) -> Spinor2<T> {
        let pre = x.powf(self.mu) * (-self.lambda * x).exp();
        Spinor2::new(self.upper.eval(x), self.lower.eval(x)) * pre
    }

    fn derivative(&self, x: T) -> Spinor2<T> {
        let pre = x.powf(self.mu) * (-self.lambda * x).exp();
        let log_d = self.mu / x - self.lambda;
        let (du, dl) = (self.upper.derivative(), self.lower.derivative());
        Spinor2::new(
            log_d * self.upper.eval(x) + du.eval(x),
            log_d * self.lower.eval(x) + dl.eval(x),
        ) * pre
    }

    fn is_zero(&self) -> bool {
        self.upper.max_abs_coeff() == T::zero() && self.lower.max_abs_coeff() == T::zero()
    }

    /// Closed-form eigen residual at a handful of points, relative to the term sizes.
    fn check_eigen(&self, v: &Potential<T>, energy: T, points: &[T]) -> Result<T> {
        let j = Mat2::<T>::j();
        let mut worst = T::zero();
        for &x in points {
            let psi = self.value(x);
            let jd = j * self.derivative(x);
            let vp = v.value(x)? * psi;
            let r = jd + vp - psi * energy;
            let scale = jd.norm_inf() + vp.norm_inf() + (psi * energy).norm_inf();
            if scale > T::zero() {
                worst = worst.max(r.norm_inf() / scale);
            }
        }
        Ok(worst)
    }

    fn into_seed(self, energy: T, boundedness: Boundedness, label: String) -> SeedSolution<T> {
        let f = Arc::new(self);
        let g = Arc::clone(&f);
        SeedSolution::new(
            energy,
            Arc::new(move |x| Ok(f.value(x))),
            Arc::new(move |x| Ok(g.derivative(x))),
            boundedness,
            label,
        )
    }
}

const CLOSED_FORM_TOL: f64 = 1e-9;

fn probe_points<T: Scalar>(lambda: T) -> Vec<T> {
    let scale = if lambda > T::zero() { T::one() / lambda } else { T::one() };
    [0.1, 0.5, 1.0, 2.5, 6.0].iter().map(|&s| T::lit(s) * scale).collect()
}

/// General bound-state closed form built from truncated Kummer polynomials.
pub fn coulomb_solution<T: Scalar>(level: CoulombLevel<T>) -> Result<SeedSolution<T>> {
    let p = level.params;
    if level.is_degenerate() {
        return Err(Error::InvalidLevel(format!(
            "λ_{} = 0: the general closed form divides by λ; use coulomb_seed_pair_simplified",
            level.n
        )));
    }
    let (m, e, lam, mu) = (p.mass, level.energy, level.lambda, level.mu);
    let n = level.n;
    let b = T::lit(2.0) * mu + T::one();
    let coeff = -p.kappa + p.alpha * m / lam + p.beta * e / lam;
    let z = T::lit(2.0) * lam;
    let nf = T::from_usize_lossy(n);
    let f0 = kummer_polynomial(n, b)?.rescaled(z);
    let f1 = if n >= 1 {
        kummer_polynomial(n - 1, b)?.rescaled(z)
    } else {
        Polynomial::constant(T::zero())
    };
    let upper = &(&f1 * (-nf)) + &(&f0 * (-coeff));
    let lower_scale = -lam / (m + e);
    let lower = &(&(&f1 * (-nf)) + &(&f0 * coeff)) * lower_scale;
    let form = RadialForm { mu, lambda: lam, upper, lower };
    if form.is_zero() {
        return Err(Error::InvalidLevel(format!(
            "closed form vanishes identically for n = {n}, branch {}",
            level.branch
        )));
    }
    let r = form.check_eigen(&coulomb_potential(p), e, &probe_points(lam))?;
    if !(r <= T::tol(CLOSED_FORM_TOL)) {
        return Err(Error::InvalidLevel(format!(
            "closed form is not an eigenspinor for n = {n}, branch {} (residual {r:e})",
            level.branch
        )));
    }
    Ok(form.into_seed(e, Boundedness::Bounded, format!("coulomb n={n} ({})", level.branch)))
}

/// Constants of the simplified `(n = 0, n = 1)` seed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedPairConstants<T> {
    pub lambda0: T,
    pub lambda1: T,
    pub c1: T,
    pub c2: T,
    /// The product `c₁c₃`, kept finite when `c₁ = 0`.
    pub c1c3: T,
    pub e0: T,
    pub e1: T,
}

#[derive(Clone)]
pub struct CoulombSeedPair<T> {
    pub constants: SimplifiedPairConstants<T>,
    pub u1: SeedSolution<T>,
    pub u2: SeedSolution<T>,
}

/// Seeds `u₁ = x^μ e^{−λ₀x}(1, c₁)`, `u₂ = x^μ e^{−λ₁x}(1 − c₂x, c₁ − c₁c₃ x)`
/// from the `n = 0` and `n = 1` levels on the given branches.
pub fn coulomb_seed_pair_simplified<T: Scalar>(
    p: CoulombParams<T>,
    branch0: Branch,
    branch1: Branch,
) -> Result<CoulombSeedPair<T>> {
    let l0 = coulomb_energy(p, 0, branch0)?;
    let l1 = coulomb_energy(p, 1, branch1)?;
    let (m, a, b, k, mu) = (p.mass, p.alpha, p.beta, p.kappa, l0.mu);
    // c₁ = (μ−k)/(α−β) = −(α+β)/(μ+k); take the larger denominator
    let c1 = if (a - b).abs() >= (mu + k).abs() {
        if a == b {
            return Err(Error::InvalidParams("α = β and μ = −k: c₁ undetermined".into()));
        }
        (mu - k) / (a - b)
    } else {
        -(a + b) / (mu + k)
    };
    let denom = T::one() + T::lit(2.0) * mu;
    let (lam1, e1) = (l1.lambda, l1.energy);
    let c2 = lam1 / denom + (e1 + m) * c1 / denom;
    let c1c3 = c1 * lam1 / denom + (m - e1) / denom;
    let constants = SimplifiedPairConstants {
        lambda0: l0.lambda,
        lambda1: lam1,
        c1,
        c2,
        c1c3,
        e0: l0.energy,
        e1,
    };
    let f0 = RadialForm {
        mu,
        lambda: l0.lambda,
        upper: Polynomial::constant(T::one()),
        lower: Polynomial::constant(c1),
    };
    let f1 = RadialForm {
        mu,
        lambda: lam1,
        upper: Polynomial::new(vec![T::one(), -c2]),
        lower: Polynomial::new(vec![c1, -c1c3]),
    };
    let v = coulomb_potential(p);
    for (form, level) in [(&f0, &l0), (&f1, &l1)] {
        let r = form.check_eigen(&v, level.energy, &probe_points(level.lambda))?;
        if !(r <= T::tol(CLOSED_FORM_TOL)) {
            return Err(Error::InvalidParams(format!(
                "simplified n={} seed (branch {}) is not an eigenspinor: residual {r:e}",
                level.n, level.branch
            )));
        }
    }
    let bound = |l: &CoulombLevel<T>| {
        if l.lambda > T::zero() {
            Boundedness::Bounded
        } else {
            Boundedness::Unbounded
        }
    };
    let u1 = f0.into_seed(l0.energy, bound(&l0), format!("coulomb simplified n=0 ({branch0})"));
    let u2 = f1.into_seed(l1.energy, bound(&l1), format!("coulomb simplified n=1 ({branch1})"));
    Ok(CoulombSeedPair { constants, u1, u2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::DiracHamiltonian;
    use crate::matgrid::GridSpec;

    fn flagship(m: f64) -> CoulombParams<f64> {
        CoulombParams::new(m, 1.0, -1.0, 1.0).unwrap()
    }

    fn reference_grid() -> GridSpec<f64> {
        GridSpec::new(0.05, 15.0, 2001).unwrap()
    }

    #[test]
    fn flagship_energies() {
        let l0 = coulomb_energy(flagship(1.0), 0, Branch::Plus).unwrap();
        assert_eq!(l0.energy, 1.0);
        assert_eq!(l0.lambda, 0.0);
        assert!(l0.roundtrip_residual.is_none());
        let l1 = coulomb_energy(flagship(1.0), 1, Branch::Minus).unwrap();
        assert!((l1.energy + 0.6).abs() < 1e-15);
        assert!((l1.lambda - 0.8).abs() < 1e-15);
        let l2 = coulomb_energy(flagship(2.0), 2, Branch::Minus).unwrap();
        assert!((l2.energy + 1.6).abs() < 1e-15);
    }

    #[test]
    fn wrong_branch_is_flagged() {
        let bad = coulomb_energy(CoulombParams::new(1.0, 0.5, 0.2, 1.0).unwrap(), 1, Branch::Plus);
        assert!(matches!(bad, Err(Error::BranchInvalid { n: 1, .. })));
    }

    #[test]
    fn standard_coulomb_matches_independent_formula() {
        // β = 0: E_n = M (n+μ)/√(α² + (n+μ)²) up to the branch sign
        let a = 1.0f64 / 137.0;
        let p = CoulombParams::standard_coulomb(1.0, -1.0).unwrap();
        let mu = (1.0 - a * a).sqrt();
        assert!((p.mu() - mu).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for n in 0..5 {
            let l = coulomb_energy(p, n, Branch::Minus).unwrap();
            let expect = -(n as f64 + mu) / (a * a + (n as f64 + mu).powi(2)).sqrt();
            assert!((l.energy - expect).abs() < 1e-14);
            // |E_n| is monotone increasing towards M on this branch
            assert!(l.energy < prev);
            prev = l.energy;
        }
    }

    #[test]
    fn simplified_pair_constants() {
        for m in [1.0, 2.5] {
            let pair = coulomb_seed_pair_simplified(flagship(m), Branch::Plus, Branch::Minus).unwrap();
            let c = pair.constants;
            assert_eq!(c.c1, 0.0);
            assert_eq!(c.lambda0, 0.0);
            assert!((c.lambda1 - 0.8 * m).abs() < 1e-14);
            assert!((c.c2 - 4.0 * m / 15.0).abs() < 1e-14);
            assert!((c.c1c3 - 8.0 * m / 15.0).abs() < 1e-14);
            // second component of u₂ with c₁ = 0
            let x = 1.3;
            let expect = -(8.0 * m / 15.0) * x * x * (-0.8 * m * x).exp();
            assert!((pair.u2.value(x).unwrap().c2 - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn simplified_pair_is_eigen_on_reference_grid() {
        let p = flagship(1.0);
        let h = DiracHamiltonian::new(coulomb_potential(p));
        let pair = coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus).unwrap();
        assert!(pair.u1.residual(&h, reference_grid()).unwrap() <= 1e-9);
        assert!(pair.u2.residual(&h, reference_grid()).unwrap() <= 1e-9);
        assert_eq!(pair.u1.energy(), 1.0);
        assert!((pair.u2.energy() + 0.6).abs() < 1e-15);
    }

    #[test]
    fn simplified_pair_general_parameters() {
        let p = CoulombParams::new(1.0, 0.5, 0.2, -1.0).unwrap();
        let h = DiracHamiltonian::new(coulomb_potential(p));
        let pair = coulomb_seed_pair_simplified(p, Branch::Minus, Branch::Minus).unwrap();
        assert!(pair.u1.residual(&h, reference_grid()).unwrap() <= 1e-9);
        assert!(pair.u2.residual(&h, reference_grid()).unwrap() <= 1e-9);
        assert!(coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus).is_err());
    }

    #[test]
    fn general_solution_levels() {
        let p = flagship(1.0);
        let h = DiracHamiltonian::new(coulomb_potential(p));
        let l1 = coulomb_energy(p, 1, Branch::Minus).unwrap();
        let s1 = coulomb_solution(l1).unwrap();
        assert!(s1.residual(&h, reference_grid()).unwrap() <= 1e-9);
        let l2 = coulomb_energy(p, 2, Branch::Minus).unwrap();
        let s2 = coulomb_solution(l2).unwrap();
        assert!((s2.energy() + 0.8).abs() < 1e-15);
        assert!(s2.residual(&h, reference_grid()).unwrap() <= 1e-9);
        // n = 1 closed form is −2 × the simplified u₂
        let pair = coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus).unwrap();
        let x = 2.2;
        let (a, b) = (s1.value(x).unwrap(), pair.u2.value(x).unwrap());
        assert!((a.c1 + 2.0 * b.c1).abs() < 1e-14 && (a.c2 + 2.0 * b.c2).abs() < 1e-14);
    }

    #[test]
    fn degenerate_and_invalid_levels() {
        let p = flagship(1.0);
        let l0 = coulomb_energy(p, 0, Branch::Plus).unwrap();
        assert!(matches!(coulomb_solution(l0), Err(Error::InvalidLevel(_))));
        // '−' at n = 0 passes the round trip (E = 0) but the closed form is zero
        let z = coulomb_energy(p, 0, Branch::Minus).unwrap();
        assert!(matches!(coulomb_solution(z), Err(Error::InvalidLevel(_))));
    }

    #[test]
    fn n0_branch_needs_closed_form_check() {
        let p = CoulombParams::new(1.0, 0.5, 0.2, 1.0).unwrap();
        let l = coulomb_energy(p, 0, Branch::Minus).unwrap();
        assert!(matches!(coulomb_solution(l), Err(Error::InvalidLevel(_))));
        let q = CoulombParams::new(1.0, 0.5, 0.2, -1.0).unwrap();
        let h = DiracHamiltonian::new(coulomb_potential(q));
        let s = coulomb_solution(coulomb_energy(q, 0, Branch::Minus).unwrap()).unwrap();
        assert!(s.residual(&h, reference_grid()).unwrap() <= 1e-9);
    }
}
