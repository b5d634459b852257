use std::sync::Arc;

use super::{Boundedness, SeedSolution};
use crate::error::{Error, Result};
use crate::hamiltonian::DiracHamiltonian;
use crate::matgrid::{GridSpec, Mat2, SampledField, Spinor2, SpinorField};
use crate::scalar::Scalar;

/// Norm at which an integration is declared to have blown up.
pub const OVERFLOW_LIMIT: f64 = 1e150;

/// `ψ′ = −J(E − v(x))ψ`.
fn rhs<T: Scalar>(h: &DiracHamiltonian<T>, e: T, x: T, psi: Spinor2<T>) -> Result<Spinor2<T>> {
    let v = h.potential().value(x)?;
    Ok(-(Mat2::j() * (psi * e - v * psi)))
}

/// RK4 steps taken inside each grid cell by [`shooting_solve`].
pub const RK4_SUBSTEPS: usize = 2;

/// Fixed-step RK4 from `x_min` with `ψ(x_min) = psi0`, sampled at the grid nodes.
pub fn shooting_solve<T: Scalar>(
    h: &DiracHamiltonian<T>,
    energy: T,
    psi0: Spinor2<T>,
    grid: GridSpec<T>,
) -> Result<SpinorField<T>> {
    shooting_solve_with(h, energy, psi0, grid, RK4_SUBSTEPS)
}

/// [`shooting_solve`] with an explicit number of equal RK4 steps per cell.
pub fn shooting_solve_with<T: Scalar>(
    h: &DiracHamiltonian<T>,
    energy: T,
    psi0: Spinor2<T>,
    grid: GridSpec<T>,
    substeps: usize,
) -> Result<SpinorField<T>> {
    if substeps == 0 {
        return Err(Error::InvalidParams("at least one RK4 step per cell".into()));
    }
    h.domain().check_grid(&grid)?;
    let limit = T::lit(OVERFLOW_LIMIT).min(T::max_value().sqrt());
    let half = T::lit(0.5);
    let mut values = Vec::with_capacity(grid.n_points());
    let mut psi = psi0;
    values.push(psi);
    for i in 0..grid.n_points() - 1 {
        let (x0, x1) = (grid.node(i), grid.node(i + 1));
        let step = (x1 - x0) / T::from_usize_lossy(substeps);
        for s in 0..substeps {
            let x = x0 + step * T::from_usize_lossy(s);
            let x_next = if s + 1 == substeps { x1 } else { x + step };
            let xm = x + step * half;
            let k1 = rhs(h, energy, x, psi)?;
            let k2 = rhs(h, energy, xm, psi + k1 * (step * half))?;
            let k3 = rhs(h, energy, xm, psi + k2 * (step * half))?;
            let k4 = rhs(h, energy, x_next, psi + k3 * step)?;
            psi += (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (step / T::lit(6.0));
            if !psi.is_finite() || psi.norm_inf() > limit {
                return Err(Error::Overflow { x: x_next.as_f64() });
            }
        }
        values.push(psi);
    }
    SampledField::from_values(grid, values)
}

/// Shooting solution wrapped as a seed: cubic Hermite interpolation between
/// nodes, derivative taken from the equation itself.
pub fn shooting_seed<T: Scalar>(
    h: &DiracHamiltonian<T>,
    energy: T,
    psi0: Spinor2<T>,
    grid: GridSpec<T>,
) -> Result<SeedSolution<T>> {
    let field = shooting_solve(h, energy, psi0, grid)?;
    let values: Vec<Spinor2<T>> = field.values().to_vec();
    let slopes = grid
        .nodes()
        .zip(&values)
        .map(|(x, &p)| rhs(h, energy, x, p))
        .collect::<Result<Vec<_>>>()?;
    let table = Arc::new(HermiteTable { grid, values, slopes });
    let value = {
        let t = Arc::clone(&table);
        Arc::new(move |x: T| t.eval(x))
    };
    let derivative = {
        let h = h.clone();
        let t = Arc::clone(&table);
        Arc::new(move |x: T| rhs(&h, energy, x, t.eval(x)?))
    };
    Ok(SeedSolution::new(
        energy,
        value,
        derivative,
        Boundedness::Unknown,
        format!("shooting E={energy}"),
    ))
}

struct HermiteTable<T> {
    grid: GridSpec<T>,
    values: Vec<Spinor2<T>>,
    slopes: Vec<Spinor2<T>>,
}

impl<T: Scalar> HermiteTable<T> {
    fn eval(&self, x: T) -> Result<Spinor2<T>> {
        let (lo, hi) = (self.grid.x_min(), self.grid.x_max());
        if !(x >= lo && x <= hi) {
            return Err(Error::DomainMismatch {
                x: x.as_f64(),
                domain: format!("[{lo}, {hi}] (shooting grid)"),
            });
        }
        let step = self.grid.step();
        let last = self.grid.n_points() - 2;
        let i = ((x - lo) / step).floor().to_usize().unwrap_or(0).min(last);
        let (x0, x1) = (self.grid.node(i), self.grid.node(i + 1));
        let w = x1 - x0;
        let t = (x - x0) / w;
        let (t2, t3) = (t * t, t * t * t);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        Ok(self.values[i] * h00
            + self.slopes[i] * (h10 * w)
            + self.values[i + 1] * h01
            + self.slopes[i + 1] * (h11 * w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{coulomb_potential, free_particle_potential, CoulombParams, Potential};
    use crate::matgrid::Mat2;
    use crate::seeds::{coulomb_energy, coulomb_solution, free_seed_pair, Branch, FreeSeedParams};

    fn max_rel_dev(field: &SpinorField<f64>, exact: impl Fn(f64) -> Spinor2<f64>) -> f64 {
        let nodes: Vec<f64> = field.grid().nodes().collect();
        let scale = nodes.iter().map(|&x| exact(x).norm_inf()).fold(0.0, f64::max);
        nodes
            .iter()
            .zip(field.values())
            .map(|(&x, v)| (*v - exact(x)).norm_inf())
            .fold(0.0, f64::max)
            / scale
    }

    fn free_fixture() -> (DiracHamiltonian<f64>, crate::seeds::SeedSolution<f64>) {
        let h = DiracHamiltonian::new(free_particle_potential(1.0).unwrap());
        let (_, u2) = free_seed_pair(FreeSeedParams::new(1.0, 0.6, 0.0).unwrap()).unwrap();
        (h, u2)
    }

    #[test]
    fn reproduces_free_closed_form() {
        let (h, u2) = free_fixture();
        let grid = GridSpec::new(-5.0, 5.0, 4001).unwrap();
        let f = shooting_solve(&h, u2.energy(), u2.value(-5.0).unwrap(), grid).unwrap();
        assert!(f.analytic().is_none());
        assert!(max_rel_dev(&f, |x| u2.value(x).unwrap()) <= 1e-8);
    }

    #[test]
    fn reproduces_coulomb_level() {
        let p = CoulombParams::new(1.0, 1.0, -1.0, 1.0).unwrap();
        let h = DiracHamiltonian::new(coulomb_potential(p));
        let s = coulomb_solution(coulomb_energy(p, 1, Branch::Minus).unwrap()).unwrap();
        let grid = GridSpec::new(0.05, 15.0, 2001).unwrap();
        let f = shooting_solve(&h, s.energy(), s.value(0.05).unwrap(), grid).unwrap();
        assert!(max_rel_dev(&f, |x| s.value(x).unwrap()) <= 1e-6);
    }

    #[test]
    fn constant_coefficient_growth() {
        // J σ₁ = σ₃ → ψ = (a eˣ, b e⁻ˣ)
        let v = Potential::new(
            crate::operator::constant_jet(Mat2::sigma1()),
            crate::hamiltonian::Domain::FullLine,
            "σ₁",
        );
        let h = DiracHamiltonian::new(v);
        let grid = GridSpec::new(0.0, 4.0, 801).unwrap();
        let f = shooting_solve(&h, 0.0, Spinor2::new(1.0, 1.0), grid).unwrap();
        let end = *f.values().last().unwrap();
        assert!((end.c1 / 4f64.exp() - 1.0).abs() < 1e-8);
        assert!((end.c2 / (-4f64).exp() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_error_ratio() {
        let (h, u2) = free_fixture();
        let err = |n| {
            let grid = GridSpec::new(-5.0, 5.0, n).unwrap();
            let f = shooting_solve(&h, u2.energy(), u2.value(-5.0).unwrap(), grid).unwrap();
            max_rel_dev(&f, |x| u2.value(x).unwrap())
        };
        let ratio = err(101) / err(201);
        assert!((14.0..=18.0).contains(&ratio), "ratio {ratio}");
        let grid = GridSpec::new(-5.0, 5.0, 201).unwrap();
        let one = shooting_solve_with(&h, u2.energy(), u2.value(-5.0).unwrap(), grid, 1).unwrap();
        let coarse = GridSpec::new(-5.0, 5.0, 101).unwrap();
        let two = shooting_solve_with(&h, u2.energy(), u2.value(-5.0).unwrap(), coarse, 2).unwrap();
        for k in 0..101 {
            let d = (one.value(2 * k) - two.value(k)).norm_inf();
            assert!(d < 1e-12 * two.value(k).norm_inf().max(1.0), "{k} {d:e}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let h = DiracHamiltonian::new(free_particle_potential(1.0).unwrap());
        let grid = GridSpec::new(0.0, 400.0, 4001).unwrap();
        let r = shooting_solve(&h, 0.0, Spinor2::new(1.0, 0.0), grid);
        assert!(matches!(r, Err(Error::Overflow { .. })));
    }

    #[test]
    fn seed_interpolates_and_stays_in_grid() {
        let (h, u2) = free_fixture();
        let grid = GridSpec::new(-5.0, 5.0, 2001).unwrap();
        let s = shooting_seed(&h, u2.energy(), u2.value(-5.0).unwrap(), grid).unwrap();
        for x in [-4.9987, -0.3, 1.23456, 4.999] {
            let (a, b) = (s.value(x).unwrap(), u2.value(x).unwrap());
            assert!((a - b).norm_inf() <= 1e-8 * b.norm_inf().max(1.0));
            let (da, db) = (s.derivative(x).unwrap(), u2.derivative(x).unwrap());
            assert!((da - db).norm_inf() <= 1e-7 * db.norm_inf().max(1.0));
        }
        assert!(s.value(5.5).is_err());
        assert_eq!(s.boundedness(), Boundedness::Unknown);
    }
}
