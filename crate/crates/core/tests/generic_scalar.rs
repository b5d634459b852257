use dirac_darboux::*;

fn free_partner_deviation<T: Scalar>() -> T {
    let lit = T::lit;
    let (m, e, c) = (lit(1.0), lit(0.6), lit(0.3));
    let p = FreeSeedParams::new(m, e, c).unwrap();
    let (u1, u2) = free_seed_pair(p).unwrap();
    let h = DiracHamiltonian::new(free_particle_potential(m).unwrap());
    let grid = GridSpec::new(lit(-4.0), lit(4.0), 201).unwrap();
    let t = DarbouxTransform::from_seeds(u1, u2, h, grid).unwrap();
    let k = p.k();
    grid.nodes()
        .map(|x| {
            let delta = p.delta(x);
            let two = lit(2.0);
            let expect = Mat2::sigma3().scale(two * e * e * c / delta) + Mat2::sigma1().scale(m - two * k * k / delta);
            (t.v1().value(x).unwrap() - expect).max_abs()
        })
        .fold(T::zero(), |a, b| a.max(b))
}

#[test]
fn single_and_double_precision() {
    assert!(free_partner_deviation::<f64>() < 1e-12);
    assert!(free_partner_deviation::<f32>() < 1e-4);
}

#[test]
fn tolerances_scale_with_precision() {
    assert_eq!(f64::tol(1e-10), 1e-10);
    assert!(f32::tol(1e-10) > 1e-6);
    assert!(f32::tol(1e-2) == 1e-2);
}
