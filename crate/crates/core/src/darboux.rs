//! First-order matrix Darboux transformation `h₀ → h₁` built from two seed
//! eigenspinors, with intertwiner `L = d/dx + σ`, `σ = −uₓu⁻¹`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hamiltonian::{DiracHamiltonian, Potential};
use crate::matgrid::{commutator, DerivativeMode, GridSpec, Mat2, Spinor2, SpinorField};
use crate::operator::{transposed_jet, FirstOrderOperator, MatJet};
use crate::scalar::{binomial, Scalar};
use crate::seeds::{Boundedness, SeedSolution};

/// Relative eigen residual a seed must meet on the working grid.
pub const SEED_RESIDUAL_TOL: f64 = 1e-9;
/// `|det u|` must exceed this times the product of the column norms.
pub const DET_TOL: f64 = 1e-10;

/// `u = (u₁, u₂)` with `h₀u = uλ`, `λ = diag(ε₁, ε₂)`.
#[derive(Clone)]
pub struct SeedMatrix<T> {
    seeds: [SeedSolution<T>; 2],
    h0: DiracHamiltonian<T>,
    grid: GridSpec<T>,
}

/// Validates both seeds and `det u` at every node of `grid`.
pub fn build_seed_matrix<T: Scalar>(
    s1: SeedSolution<T>,
    s2: SeedSolution<T>,
    h0: DiracHamiltonian<T>,
    grid: GridSpec<T>,
) -> Result<SeedMatrix<T>> {
    if s1.energy() == s2.energy() {
        return Err(Error::DegenerateSeeds { energy: s1.energy().as_f64() });
    }
    h0.domain().check_grid(&grid)?;
    let tol = T::tol(SEED_RESIDUAL_TOL);
    s1.validate(&h0, grid, tol)?;
    s2.validate(&h0, grid, tol)?;
    let u = SeedMatrix { seeds: [s1, s2], h0, grid };
    for x in grid.nodes() {
        u.u(x)?;
    }
    Ok(u)
}

impl<T: Scalar> SeedMatrix<T> {
    pub fn seed1(&self) -> &SeedSolution<T> {
        &self.seeds[0]
    }

    pub fn seed2(&self) -> &SeedSolution<T> {
        &self.seeds[1]
    }

    /// `(ε₁, ε₂)` in column order.
    pub fn epsilons(&self) -> (T, T) {
        (self.seeds[0].energy(), self.seeds[1].energy())
    }

    pub fn lambda(&self) -> Mat2<T> {
        let (e1, e2) = self.epsilons();
        Mat2::diag(e1, e2)
    }

    pub fn h0(&self) -> &DiracHamiltonian<T> {
        &self.h0
    }

    /// Grid on which the construction was validated.
    pub fn grid(&self) -> GridSpec<T> {
        self.grid
    }

    /// `u(x)`, failing with `SingularSeedMatrix` where `det u` is negligible.
    pub fn u(&self, x: T) -> Result<Mat2<T>> {
        let u = Mat2::from_columns(self.seeds[0].value(x)?, self.seeds[1].value(x)?);
        check_det(u, x)?;
        Ok(u)
    }

    pub fn u_x(&self, x: T) -> Result<Mat2<T>> {
        Ok(Mat2::from_columns(self.seeds[0].derivative(x)?, self.seeds[1].derivative(x)?))
    }

    pub fn det(&self, x: T) -> Result<T> {
        Ok(self.u(x)?.det())
    }
}

impl<T: Scalar> fmt::Debug for SeedMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeedMatrix")
            .field("seed1", &self.seeds[0])
            .field("seed2", &self.seeds[1])
            .field("grid", &self.grid)
            .finish()
    }
}

fn check_det<T: Scalar>(u: Mat2<T>, x: T) -> Result<()> {
    let norm = |s: Spinor2<T>| s.dot(&s).sqrt();
    let det = u.det();
    let bound = T::tol(DET_TOL) * norm(u.col1()) * norm(u.col2());
    if !(det.abs() > bound) || !det.is_finite() {
        return Err(Error::SingularSeedMatrix { x: x.as_f64(), det: det.as_f64() });
    }
    Ok(())
}

/// `σ = J u λ u⁻¹ − J v₀`, which needs no derivative of the seeds.
pub fn sigma_analytic<T: Scalar>(u: &SeedMatrix<T>, x: T) -> Result<Mat2<T>> {
    let m = u.u(x)?;
    let w = m * u.lambda() * m.inv()?;
    Ok(Mat2::j() * (w - u.h0.potential().value(x)?))
}

/// `σ = −uₓu⁻¹` from the seed derivatives.
pub fn sigma_direct<T: Scalar>(u: &SeedMatrix<T>, x: T) -> Result<Mat2<T>> {
    log_derivative_sigma(u.u(x)?, u.u_x(x)?)
}

/// `−uₓu⁻¹` for an arbitrary matrix function.
pub fn log_derivative_sigma<T: Scalar>(u: Mat2<T>, u_x: Mat2<T>) -> Result<Mat2<T>> {
    Ok(-(u_x * u.inv()?))
}

/// `σ, σ′, …, σ⁽ⁿ⁾` from `W = uλu⁻¹`, using `W′ = [W, σ]` and `σ = J(W − v₀)`.
fn sigma_jet<T: Scalar>(u: &SeedMatrix<T>, x: T, n: usize) -> Result<Vec<Mat2<T>>> {
    let m = u.u(x)?;
    let v = u.h0.potential().jet(x, n)?;
    let j = Mat2::<T>::j();
    let mut w = Vec::with_capacity(n + 1);
    let mut s = Vec::with_capacity(n + 1);
    w.push(m * u.lambda() * m.inv()?);
    s.push(j * (w[0] - v[0]));
    for k in 0..n {
        let mut next = Mat2::zero();
        for i in 0..=k {
            next += commutator(w[i], s[k - i]).scale(binomial::<T>(k, i));
        }
        w.push(next);
        s.push(j * (next - v[k + 1]));
    }
    Ok(s)
}

/// `v₁ = σ₂v₀σ₂ + (ε₁−ε₂)/det u · [[d₁, d₂], [d₂, −d₁]]`,
/// `d₁ = u₁₁u₂₂ + u₁₂u₂₁`, `d₂ = u₂₁u₂₂ − u₁₁u₁₂`.
fn partner_value<T: Scalar>(u: &SeedMatrix<T>, x: T) -> Result<Mat2<T>> {
    let m = u.u(x)?;
    let v0 = u.h0.potential().value(x)?;
    let (e1, e2) = u.epsilons();
    let d1 = m.a11 * m.a22 + m.a12 * m.a21;
    let d2 = m.a21 * m.a22 - m.a11 * m.a12;
    Ok(v0.sigma2_conjugate() + Mat2::new(d1, d2, d2, -d1).scale((e1 - e2) / m.det()))
}

/// `v₁ = v₀ + [σ, J]`.
pub fn partner_potential_commutator<T: Scalar>(u: &SeedMatrix<T>, x: T) -> Result<Mat2<T>> {
    Ok(u.h0.potential().value(x)? + commutator(sigma_analytic(u, x)?, Mat2::j()))
}

/// The partner potential as a [`Potential`]; jets of order one and above
/// follow from the σ jets.
pub fn partner_potential<T: Scalar>(u: &SeedMatrix<T>) -> Potential<T> {
    let seeds = Arc::new(u.clone());
    let (e1, e2) = u.epsilons();
    let jet: MatJet<T> = Arc::new(move |x, n| {
        let mut out = vec![partner_value(&seeds, x)?];
        if n > 0 {
            let s = sigma_jet(&seeds, x, n)?;
            let v = seeds.h0.potential().jet(x, n)?;
            let j = Mat2::j();
            out.extend((1..=n).map(|k| v[k] + commutator(s[k], j)));
        }
        Ok(out)
    });
    Potential::new(
        jet,
        u.h0.domain(),
        format!("partner of {} (ε₁={e1}, ε₂={e2})", u.h0.potential().descriptor()),
    )
}

/// Columns of `(uᵀ)⁻¹`, eigenspinors of `h₁` at `ε₁` and `ε₂` annihilated by `L†`.
pub fn kernel_spinors_h1<T: Scalar>(u: &SeedMatrix<T>) -> (SeedSolution<T>, SeedSolution<T>) {
    let seeds = Arc::new(u.clone());
    let column = |k: usize| {
        let (a, b) = (Arc::clone(&seeds), Arc::clone(&seeds));
        let value = Arc::new(move |x: T| Ok(a.u(x)?.transpose().inv()?.column(k)));
        let derivative = Arc::new(move |x: T| {
            let inv_t = b.u(x)?.transpose().inv()?;
            Ok((-(inv_t * b.u_x(x)?.transpose() * inv_t)).column(k))
        });
        SeedSolution::new(
            seeds.seeds[k].energy(),
            value,
            derivative,
            Boundedness::Unknown,
            format!("kernel of L† ({})", seeds.seeds[k].label()),
        )
    };
    (column(0), column(1))
}

/// Darboux transformation with its partner Hamiltonian.
#[derive(Clone)]
pub struct DarbouxTransform<T> {
    seeds: Arc<SeedMatrix<T>>,
    sigma: MatJet<T>,
    h1: DiracHamiltonian<T>,
}

impl<T: Scalar> DarbouxTransform<T> {
    pub fn new(seeds: SeedMatrix<T>) -> Self {
        let v1 = partner_potential(&seeds);
        let seeds = Arc::new(seeds);
        let s = Arc::clone(&seeds);
        let sigma: MatJet<T> = Arc::new(move |x, n| sigma_jet(&s, x, n));
        Self { seeds, sigma, h1: DiracHamiltonian::new(v1) }
    }

    /// Builds and validates the seed matrix, then the transform.
    pub fn from_seeds(
        s1: SeedSolution<T>,
        s2: SeedSolution<T>,
        h0: DiracHamiltonian<T>,
        grid: GridSpec<T>,
    ) -> Result<Self> {
        Ok(Self::new(build_seed_matrix(s1, s2, h0, grid)?))
    }

    pub fn seed_matrix(&self) -> &SeedMatrix<T> {
        &self.seeds
    }

    pub fn h0(&self) -> &DiracHamiltonian<T> {
        &self.seeds.h0
    }

    pub fn h1(&self) -> &DiracHamiltonian<T> {
        &self.h1
    }

    pub fn v1(&self) -> &Potential<T> {
        self.h1.potential()
    }

    pub fn epsilons(&self) -> (T, T) {
        self.seeds.epsilons()
    }

    pub fn sigma(&self, x: T) -> Result<Mat2<T>> {
        Ok((self.sigma)(x, 0)?[0])
    }

    pub fn sigma_jet(&self, x: T, n: usize) -> Result<Vec<Mat2<T>>> {
        (self.sigma)(x, n)
    }

    pub fn sigma_jet_fn(&self) -> MatJet<T> {
        Arc::clone(&self.sigma)
    }

    /// `L = d/dx + σ`.
    pub fn l_operator(&self) -> FirstOrderOperator<T> {
        FirstOrderOperator::new(Mat2::identity(), self.sigma_jet_fn())
    }

    /// `L† = −d/dx + σᵀ`.
    pub fn l_dagger_operator(&self) -> FirstOrderOperator<T> {
        FirstOrderOperator::new(-Mat2::identity(), transposed_jet(&self.sigma))
    }

    pub fn apply_l(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        self.l_operator().apply(psi, mode)
    }

    pub fn apply_l_dagger(&self, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
        self.l_dagger_operator().apply(psi, mode)
    }

    pub fn kernel_spinors_h1(&self) -> (SeedSolution<T>, SeedSolution<T>) {
        kernel_spinors_h1(&self.seeds)
    }

    /// `Lψ` for an `h₀` eigenspinor `ψ`, an `h₁` eigenspinor at the same energy.
    pub fn map_seed(&self, seed: &SeedSolution<T>) -> SeedSolution<T> {
        self.image(seed, self.l_operator(), self.h0().clone(), "L")
    }

    /// `L†ψ` for an `h₁` eigenspinor `ψ`, an `h₀` eigenspinor at the same energy.
    pub fn map_seed_adjoint(&self, seed: &SeedSolution<T>) -> SeedSolution<T> {
        self.image(seed, self.l_dagger_operator(), self.h1.clone(), "L†")
    }

    fn image(
        &self,
        seed: &SeedSolution<T>,
        op: FirstOrderOperator<T>,
        source: DiracHamiltonian<T>,
        name: &str,
    ) -> SeedSolution<T> {
        let (s1, h1, op1) = (seed.clone(), source.clone(), op.clone());
        let value = Arc::new(move |x: T| Ok(op1.apply_jet(x, &s1.jet(&h1, x, 1)?, 0)?[0]));
        let s2 = seed.clone();
        let derivative = Arc::new(move |x: T| Ok(op.apply_jet(x, &s2.jet(&source, x, 2)?, 1)?[1]));
        SeedSolution::new(
            seed.energy(),
            value,
            derivative,
            seed.boundedness(),
            format!("{name}({})", seed.label()),
        )
    }

    /// Next transformation with `h₁` as the source Hamiltonian.
    pub fn chain(&self, s1: SeedSolution<T>, s2: SeedSolution<T>, grid: GridSpec<T>) -> Result<Self> {
        Self::from_seeds(s1, s2, self.h1.clone(), grid)
    }
}

impl<T: Scalar> fmt::Debug for DarbouxTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DarbouxTransform")
            .field("seeds", &*self.seeds)
            .field("v1", self.v1())
            .finish()
    }
}

pub fn apply_l<T: Scalar>(t: &DarbouxTransform<T>, psi: &SpinorField<T>, mode: DerivativeMode) -> Result<SpinorField<T>> {
    t.apply_l(psi, mode)
}

pub fn apply_l_dagger<T: Scalar>(
    t: &DarbouxTransform<T>,
    psi: &SpinorField<T>,
    mode: DerivativeMode,
) -> Result<SpinorField<T>> {
    t.apply_l_dagger(psi, mode)
}

pub fn chain<T: Scalar>(
    t: &DarbouxTransform<T>,
    s1: SeedSolution<T>,
    s2: SeedSolution<T>,
    grid: GridSpec<T>,
) -> Result<DarbouxTransform<T>> {
    t.chain(s1, s2, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{coulomb_potential, free_particle_potential, CoulombParams, Domain};
    use crate::matgrid::SampledField;
    use crate::operator::constant_jet;
    use crate::seeds::{
        coulomb_energy, coulomb_seed_pair_simplified, coulomb_solution, free_seed_pair, shooting_seed,
        Branch, FreeSeedParams,
    };

    const A: DerivativeMode = DerivativeMode::Analytic;

    fn free_h() -> DiracHamiltonian<f64> {
        DiracHamiltonian::new(free_particle_potential(1.0).unwrap())
    }

    fn free_transform(c: f64, grid: GridSpec<f64>) -> DarbouxTransform<f64> {
        let (u1, u2) = free_seed_pair(FreeSeedParams::new(1.0, 0.6, c).unwrap()).unwrap();
        DarbouxTransform::from_seeds(u1, u2, free_h(), grid).unwrap()
    }

    fn free_grid() -> GridSpec<f64> {
        GridSpec::new(-5.0, 5.0, 2001).unwrap()
    }

    fn coulomb_grid() -> GridSpec<f64> {
        GridSpec::new(0.05, 15.0, 2001).unwrap()
    }

    fn flagship() -> (CoulombParams<f64>, DarbouxTransform<f64>) {
        let p = CoulombParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        let pair = coulomb_seed_pair_simplified(p, Branch::Plus, Branch::Minus).unwrap();
        let h = DiracHamiltonian::new(coulomb_potential(p));
        (p, DarbouxTransform::from_seeds(pair.u1, pair.u2, h, coulomb_grid()).unwrap())
    }

    fn max_dev(a: Mat2<f64>, b: Mat2<f64>) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn sigma_routes_agree() {
        for c in [0.0, 0.3] {
            let t = free_transform(c, free_grid());
            let u = t.seed_matrix();
            assert!(max_dev(sigma_analytic(u, 0.0).unwrap(), sigma_direct(u, 0.0).unwrap()) < 1e-12);
            for x in free_grid().nodes() {
                let (a, d) = (sigma_analytic(u, x).unwrap(), sigma_direct(u, x).unwrap());
                assert!(max_dev(a, d) <= 1e-10 * a.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn partner_routes_agree_and_symmetric() {
        let t = free_transform(0.3, free_grid());
        for x in free_grid().nodes() {
            let v = t.v1().value(x).unwrap();
            assert_eq!(v.a12, v.a21);
            let w = partner_potential_commutator(t.seed_matrix(), x).unwrap();
            assert!(max_dev(v, w) <= 1e-10);
        }
    }

    #[test]
    fn free_c0_partner_is_scalar_soliton() {
        let t = free_transform(0.0, free_grid());
        for x in [-3.0, -0.2, 0.0, 1.1, 4.0] {
            let v = t.v1().value(x).unwrap();
            assert!(v.a11.abs() < 1e-12 && v.a22.abs() < 1e-12);
            assert!(v.a12 < 1.0);
        }
    }

    #[test]
    fn sigma_jets_match_finite_differences() {
        let t = free_transform(0.3, free_grid());
        let h = 1e-4;
        for x in [-1.3, 0.2, 2.7] {
            let jet = t.sigma_jet(x, 2).unwrap();
            let fd1 = (t.sigma(x + h).unwrap() - t.sigma(x - h).unwrap()).scale(0.5 / h);
            let fd2 = (t.sigma(x + h).unwrap() - t.sigma(x).unwrap().scale(2.0) + t.sigma(x - h).unwrap())
                .scale(1.0 / (h * h));
            assert!(max_dev(jet[1], fd1) < 1e-7);
            assert!(max_dev(jet[2], fd2) < 1e-4);
        }
    }

    #[test]
    fn degenerate_and_unvalidated_seeds() {
        let (u1, _) = free_seed_pair(FreeSeedParams::new(1.0, 0.6, 0.0).unwrap()).unwrap();
        let r = build_seed_matrix(u1.clone(), u1.clone(), free_h(), free_grid());
        assert!(matches!(r, Err(Error::DegenerateSeeds { .. })));
        let (w1, _) = free_seed_pair(FreeSeedParams::new(1.0, 0.3, 0.0).unwrap()).unwrap();
        let wrong = SeedSolution::new(
            0.5,
            Arc::new(move |x| w1.value(x)),
            Arc::new(|_| Ok(Spinor2::zero())),
            Boundedness::Unknown,
            "mislabelled",
        );
        let r = build_seed_matrix(u1, wrong, free_h(), free_grid());
        assert!(matches!(r, Err(Error::SeedNotEigen { .. })));
    }

    #[test]
    fn singular_seed_matrix_reports_position() {
        // free u₁ with c placed so that Δ(0) = 0
        let (m, e) = (1.0f64, 0.6);
        let k = (m * m - e * e).sqrt();
        let t = ((m - k) / (m + k)).ln() / 2.0;
        let c = -(m + e * t.cosh()) * k / (e * e * t.sinh());
        let a = c * e / k;
        let u1 = SeedSolution::new(
            e,
            Arc::new(move |x: f64| {
                let y = k * x;
                Ok(Spinor2::new(y.cosh() + a * y.sinh(), (y + t).cosh() + a * (y + t).sinh()))
            }),
            Arc::new(move |x: f64| {
                let y = k * x;
                Ok(Spinor2::new(k * (y.sinh() + a * y.cosh()), k * ((y + t).sinh() + a * (y + t).cosh())))
            }),
            Boundedness::Unbounded,
            "hand-built",
        );
        let (_, u2) = free_seed_pair(FreeSeedParams::new(m, e, 0.0).unwrap()).unwrap();
        let grid = GridSpec::new(-1.0, 1.0, 201).unwrap();
        match build_seed_matrix(u1, u2, free_h(), grid) {
            Err(Error::SingularSeedMatrix { x, .. }) => assert!(x.abs() < 1e-9),
            other => panic!("expected a singular seed matrix, got {other:?}"),
        }
    }

    /// `v = [[ε₁, w], [w, ε₂]]` has eigenspinors `(e^{wx}, 0)` and `(0, e^{−wx})`.
    fn diagonal_model(w: f64, e1: f64, e2: f64) -> (DiracHamiltonian<f64>, SeedSolution<f64>, SeedSolution<f64>) {
        let v = Potential::new(constant_jet(Mat2::new(e1, w, w, e2)), Domain::FullLine, "constant");
        let f = SeedSolution::new(
            e1,
            Arc::new(move |x: f64| Ok(Spinor2::new((w * x).exp(), 0.0))),
            Arc::new(move |x: f64| Ok(Spinor2::new(w * (w * x).exp(), 0.0))),
            Boundedness::Unbounded,
            "f",
        );
        let g = SeedSolution::new(
            e2,
            Arc::new(move |x: f64| Ok(Spinor2::new(0.0, (-w * x).exp()))),
            Arc::new(move |x: f64| Ok(Spinor2::new(0.0, -w * (-w * x).exp()))),
            Boundedness::Unbounded,
            "g",
        );
        (DiracHamiltonian::new(v), f, g)
    }

    #[test]
    fn diagonal_seed_matrix() {
        let (h, f, g) = diagonal_model(0.5, 0.7, -0.2);
        let grid = GridSpec::new(-3.0, 3.0, 301).unwrap();
        let t = DarbouxTransform::from_seeds(f, g, h, grid).unwrap();
        let (k1, k2) = t.kernel_spinors_h1();
        for x in [-2.0, 0.0, 1.5] {
            assert!((k1.value(x).unwrap() - Spinor2::new((-0.5 * x).exp(), 0.0)).norm_inf() < 1e-15);
            assert!((k2.value(x).unwrap() - Spinor2::new(0.0, (0.5 * x).exp())).norm_inf() < 1e-15);
            assert!(max_dev(t.sigma(x).unwrap(), Mat2::diag(-0.5, 0.5)) < 1e-14);
        }
        let f = |x: f64| 1.0 + x * x;
        let df = |x: f64| 2.0 * x;
        let x = 0.7;
        let s = log_derivative_sigma(Mat2::diag(f(x), f(x)), Mat2::diag(df(x), df(x))).unwrap();
        assert!(max_dev(s, Mat2::scalar(-df(x) / f(x))) < 1e-15);
    }

    #[test]
    fn l_annihilates_seeds_and_l_dagger_kernel() {
        let (_, ct) = flagship();
        for t in [free_transform(0.3, free_grid()), ct] {
            let grid = t.seed_matrix().grid();
            for s in [t.seed_matrix().seed1(), t.seed_matrix().seed2()] {
                let psi = s.sample(grid, t.h0()).unwrap();
                let image = t.apply_l(&psi, A).unwrap();
                assert!(image.max_norm() <= 1e-9 * psi.max_norm());
            }
            let (k1, k2) = t.kernel_spinors_h1();
            for k in [k1, k2] {
                assert!(k.residual(t.h1(), grid).unwrap() <= 1e-8);
                let psi = k.sample(grid, t.h1()).unwrap();
                let image = t.apply_l_dagger(&psi, A).unwrap();
                assert!(image.max_norm() <= 1e-9 * psi.max_norm());
            }
        }
    }

    #[test]
    fn coulomb_flagship_sigma_and_partner() {
        let (_, t) = flagship();
        for x in coulomb_grid().nodes() {
            let expect = Mat2::new(-1.0 / x, 0.4 - 2.0 / x, 0.0, 0.8 - 2.0 / x);
            assert!(max_dev(t.sigma(x).unwrap(), expect) <= 1e-10);
        }
        let v = t.v1().value(1.0).unwrap();
        assert!(max_dev(v, Mat2::new(2.6, 1.2, 1.2, -0.6)) < 1e-13);
    }

    #[test]
    fn transported_n2_state() {
        let (p, t) = flagship();
        let s = coulomb_solution(coulomb_energy(p, 2, Branch::Minus).unwrap()).unwrap();
        let grid = coulomb_grid();
        let image = t.apply_l(&s.sample(grid, t.h0()).unwrap(), A).unwrap();
        for (i, x) in grid.nodes().enumerate() {
            let pre = -6.0 / 125.0 * (-0.6 * x).exp() * x * x;
            let expect = Spinor2::new(pre * (-10.0 + 3.0 * x), pre * (5.0 + 3.0 * x));
            assert!((image.value(i) - expect).norm_inf() <= 1e-8);
        }
        assert!(t.h1().eigen_residual(&image, -0.8).unwrap() <= 1e-8);
        let mapped = t.map_seed(&s);
        assert!(mapped.residual(t.h1(), grid).unwrap() <= 1e-8);
        let back = t.map_seed_adjoint(&mapped);
        assert!(back.residual(t.h0(), grid).unwrap() <= 1e-8);
    }

    #[test]
    fn eigen_transport_fd_second_order() {
        let h = free_h();
        let t = free_transform(0.3, GridSpec::new(-4.0, 4.0, 801).unwrap());
        let residual = |e: f64, n: usize| {
            let grid = GridSpec::new(-4.0, 4.0, n).unwrap();
            let s = shooting_seed(&h, e, Spinor2::new(1.0, 0.2), grid).unwrap();
            let psi = SampledField::from_values(grid, grid.nodes().map(|x| s.value(x).unwrap()).collect())
                .unwrap();
            let image = t.apply_l(&psi, DerivativeMode::Fd2).unwrap();
            t.h1().eigen_residual_with(&image, e, DerivativeMode::Fd2).unwrap()
        };
        for e in [-0.9, -0.4, 0.1, 0.35, 0.8] {
            let (coarse, fine) = (residual(e, 2001), residual(e, 4001));
            assert!(fine <= 1e-6, "E={e}: {fine:e}");
            let ratio = coarse / fine;
            assert!((3.5..=4.5).contains(&ratio), "E={e}: ratio {ratio}");
        }
    }

    #[test]
    fn adjoint_pairing() {
        let t = free_transform(0.3, free_grid());
        let grid = GridSpec::new(-5.0, 5.0, 4001).unwrap();
        let bump = |x0: f64, p: Spinor2<f64>| {
            SampledField::from_fn(grid, move |x| p * (-4.0 * (x - x0) * (x - x0)).exp())
        };
        let phi = bump(-0.4, Spinor2::new(1.0, -0.5));
        let psi = bump(0.3, Spinor2::new(0.2, 0.9));
        let inner = |a: &SpinorField<f64>, b: &SpinorField<f64>| {
            let h = grid.step();
            let vals: Vec<f64> = a.values().iter().zip(b.values()).map(|(p, q)| p.dot(q)).collect();
            h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]))
        };
        let lhs = inner(&t.apply_l(&phi, DerivativeMode::Fd4).unwrap(), &psi);
        let rhs = inner(&phi, &t.apply_l_dagger(&psi, DerivativeMode::Fd4).unwrap());
        assert!((lhs - rhs).abs() <= 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn involution_returns_original_potential() {
        let (_, ct) = flagship();
        for t in [free_transform(0.3, free_grid()), ct] {
            let grid = t.seed_matrix().grid();
            let (k1, k2) = t.kernel_spinors_h1();
            let back = t.chain(k1, k2, grid).unwrap();
            for x in grid.nodes() {
                let (v2, v0) = (back.v1().value(x).unwrap(), t.h0().potential().value(x).unwrap());
                assert!(max_dev(v2, v0) <= 1e-8, "x={x}");
            }
        }
    }

    #[test]
    fn seed_order_is_a_symmetry() {
        let (u1, u2) = free_seed_pair(FreeSeedParams::new(1.0, 0.6, 0.3).unwrap()).unwrap();
        let a = DarbouxTransform::from_seeds(u1.clone(), u2.clone(), free_h(), free_grid()).unwrap();
        let b = DarbouxTransform::from_seeds(u2, u1, free_h(), free_grid()).unwrap();
        assert_eq!(a.epsilons(), (0.6, -0.6));
        assert_eq!(b.epsilons(), (-0.6, 0.6));
        for x in [-4.0, -0.5, 0.0, 2.0] {
            assert!(max_dev(a.v1().value(x).unwrap(), b.v1().value(x).unwrap()) < 1e-12);
            assert!(max_dev(a.sigma(x).unwrap(), b.sigma(x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn chained_free_transforms() {
        let grid = free_grid();
        let t = free_transform(0.0, grid);
        let (w1, w2) = free_seed_pair(FreeSeedParams::new(1.0, 0.3, 0.1).unwrap()).unwrap();
        let second = t.chain(t.map_seed(&w1), t.map_seed(&w2), grid).unwrap();
        for x in grid.nodes() {
            assert!(second.seed_matrix().det(x).unwrap().abs() > 0.0);
            assert!(second.v1().value(x).unwrap().is_symmetric());
        }
        let s = second.seed_matrix().seed1().sample(grid, second.h0()).unwrap();
        assert!(second.apply_l(&s, A).unwrap().max_norm() <= 1e-9 * s.max_norm());
        let (probe, _) = free_seed_pair(FreeSeedParams::new(1.0, 0.45, 0.0).unwrap()).unwrap();
        let image = second.map_seed(&t.map_seed(&probe));
        assert!(image.residual(second.h1(), grid).unwrap() <= 1e-8);
    }
}
