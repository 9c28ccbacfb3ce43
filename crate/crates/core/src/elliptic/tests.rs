use super::dense;
use super::*;
use crate::fields::Grid;
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

fn pbox(n: usize) -> Grid {
    Grid::periodic(n, n, (0.0, TAU, 0.0, TAU)).unwrap()
}

fn dbox(n: usize) -> Grid {
    Grid::dirichlet(n, n, (0.0, 1.0, 0.0, 1.0)).unwrap()
}

fn pseudo_random(seed: u64, len: usize) -> Vec<f64> {
    let mut state = seed.max(1);
    (0..len)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let v = (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64;
            v / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}

fn random_vector(grid: Grid, seed: u64) -> VectorField {
    let mut v = VectorField {
        grid,
        x: pseudo_random(seed, grid.len()),
        y: pseudo_random(seed.wrapping_add(101), grid.len()),
    };
    zero_boundary_vec(&mut v);
    v
}

#[test]
fn apply_zero_is_zero() {
    let op = EllipticOperator::new(1.0, 1.0, 10.0, pbox(8)).unwrap();
    let z = VectorField::zeros(op.grid);
    assert!(op.apply(&z).unwrap().linf() == 0.0);
}

#[test]
fn apply_on_divergence_free_mode_reduces_to_helmholtz() {
    // Taylor-Green mode: Lap u = -2u and div u = 0, so L(u) = (sigma+2nu) u.
    let (sigma, nu, gamma) = (3.0, 0.7, 1e5);
    let op = EllipticOperator::new(sigma, nu, gamma, pbox(32)).unwrap();
    let u = VectorField::from_fn(op.grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()));
    let lu = op.apply(&u).unwrap();
    let mut expect = u.clone();
    expect.scale(sigma + 2.0 * nu);
    expect.axpy(-1.0, &lu);
    // gamma amplifies fft roundoff of the (analytically zero) divergence
    assert!(expect.linf() < 1e-13 * gamma, "{}", expect.linf());
}

#[test]
fn apply_on_gradient_mode_matches_fourier_symbol() {
    // u = grad sin(x+y): every term acts as (sigma + (nu+gamma)|k|^2), |k|^2 = 2.
    let (sigma, nu, gamma) = (2.0, 0.5, 4.0);
    let op = EllipticOperator::new(sigma, nu, gamma, pbox(32)).unwrap();
    let u = VectorField::from_fn(op.grid, |x, y| ((x + y).cos(), (x + y).cos()));
    let lu = op.apply(&u).unwrap();
    let factor = sigma + (nu + gamma) * 2.0;
    let mut expect = u.clone();
    expect.scale(factor);
    expect.axpy(-1.0, &lu);
    assert!(expect.linf() < 1e-9 * factor, "{}", expect.linf());
}

#[test]
fn solve_zero_rhs_gives_zero() {
    for grid in [pbox(16), dbox(17)] {
        let op = EllipticOperator::new(1.0, 1.0, 1e5, grid).unwrap();
        let u = op.solve(&VectorField::zeros(grid), 1e-12).unwrap();
        assert_eq!(u.linf(), 0.0);
    }
}

#[test]
fn periodic_solve_roundtrip_recovers_field() {
    let op = EllipticOperator::new(1.5, 0.8, 10.0, pbox(16)).unwrap();
    let u = random_vector(op.grid, 42);
    let rhs = op.apply(&u).unwrap();
    let back = op.solve(&rhs, 1e-12).unwrap();
    let mut diff = back.clone();
    diff.axpy(-1.0, &u);
    assert!(diff.linf() < 1e-10 * u.linf().max(1.0));
}

#[test]
fn spectral_solve_is_an_exact_inverse() {
    let op = EllipticOperator::new(4.0, 1.0, 1e4, pbox(32)).unwrap();
    let rhs = random_vector(op.grid, 7);
    let u = op.solve(&rhs, 1e-12).unwrap();
    let mut r = op.apply(&u).unwrap();
    r.axpy(-1.0, &rhs);
    assert!(r.linf() <= 1e-10 * rhs.linf());

    // at the production penalty stiffness the roundoff of the composed
    // grad-div application grows with gamma but stays near representation
    let op = EllipticOperator::new(4.0, 1.0, 1e5, pbox(32)).unwrap();
    let u = op.solve(&rhs, 1e-12).unwrap();
    let mut r = op.apply(&u).unwrap();
    r.axpy(-1.0, &rhs);
    assert!(r.linf() <= 1e-9 * rhs.linf());
}

#[test]
fn periodic_fd_solve_matches_its_stencil_operator() {
    let grid = Grid::periodic_fd(24, 24, (0.0, TAU, 0.0, TAU)).unwrap();
    let op = EllipticOperator::new(2.0, 1.0, 1e4, grid).unwrap();
    let rhs = random_vector(grid, 11);
    let u = op.solve(&rhs, 1e-12).unwrap();
    let mut r = op.apply(&u).unwrap();
    r.axpy(-1.0, &rhs);
    assert!(r.linf() <= 1e-10 * rhs.linf(), "{}", r.linf());
}

#[test]
fn dirichlet_solve_matches_dense_reference_at_moderate_conditioning() {
    let op = EllipticOperator::new(20.0, 1.0, 50.0, dbox(8)).unwrap();
    let exact = VectorField::from_fn(op.grid, |x, y| {
        let s = (PI * x).sin() * (PI * y).sin();
        (s, s)
    });
    let rhs = op.apply(&exact).unwrap();
    let tol = 1e-12;
    let fast = op.solve(&rhs, tol).unwrap();
    let direct = dense::solve_dense(&op, &rhs).unwrap();
    let mut diff = fast.clone();
    diff.axpy(-1.0, &direct);
    let scale = direct.norms().l2.max(1e-30);
    assert!(
        diff.norms().l2 / scale <= 10.0 * tol,
        "gap {}",
        diff.norms().l2 / scale
    );
}

#[test]
fn dirichlet_solve_survives_stiff_penalty_coefficient() {
    let op = EllipticOperator::new(32.0, 1.0, 1e5, dbox(17)).unwrap();
    let rhs = VectorField::from_fn(op.grid, |x, y| {
        let b = (PI * x).sin() * (PI * y).sin();
        (b * (1.0 + x), -b * (2.0 - y))
    });
    let (u, stats) = op.solve_with_stats(&rhs, 1e-10).unwrap();
    assert!(stats.rel_residual < 1e-8, "residual {}", stats.rel_residual);
    let direct = dense::solve_dense(&op, &rhs).unwrap();
    let mut diff = u.clone();
    diff.axpy(-1.0, &direct);
    assert!(diff.norms().l2 / direct.norms().l2 < 1e-6);
}

#[test]
fn symmetry_is_exact_on_the_spectral_backend() {
    let op = EllipticOperator::new(1.0, 1.0, 1e4, pbox(16)).unwrap();
    let a = random_vector(op.grid, 3);
    let b = random_vector(op.grid, 5);
    let lhs = op.apply(&a).unwrap().inner(&b);
    let rhs = a.inner(&op.apply(&b).unwrap());
    assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
}

#[test]
fn symmetry_holds_for_boundary_compatible_fields_on_dirichlet_grids() {
    // The one-sided boundary closures make the interior matrix nonsymmetric
    // entry-wise, but the defect annihilates smooth fields that vanish on
    // the boundary, which is the admissible space of the schemes.
    for n in [17, 33, 65] {
        let grid = dbox(n);
        let op = EllipticOperator::new(1.0, 1.0, 10.0, grid).unwrap();
        let bump = |x: f64, y: f64| (PI * x).sin() * (PI * y).sin();
        let a = VectorField::from_fn(grid, |x, y| {
            (bump(x, y) * (1.0 + 0.3 * x), bump(x, y) * (0.5 - y))
        });
        let b = VectorField::from_fn(grid, |x, y| {
            (bump(x, y) * (y + 0.1), bump(x, y) * (x * x - 0.4))
        });
        let lhs = op.apply(&a).unwrap().inner(&b);
        let rhs = a.inner(&op.apply(&b).unwrap());
        let defect = ((lhs - rhs) / lhs.abs().max(1.0)).abs();
        assert!(defect <= 1e-11, "n={n}: defect {defect:.3e}");
    }
}

#[test]
fn quadratic_form_is_positive_definite() {
    for grid in [pbox(12), dbox(13)] {
        let op = EllipticOperator::new(0.5, 1.0, 1e3, grid).unwrap();
        for seed in [1u64, 9, 17] {
            let u = random_vector(grid, seed);
            let q = op.apply(&u).unwrap().inner(&u);
            assert!(q > 0.0, "{:?} seed {seed}: {q}", grid.bc);
        }
    }
}

#[test]
fn solution_divergence_is_monotone_in_gamma() {
    for grid in [pbox(16), dbox(17)] {
        let rhs = VectorField::from_fn(grid, |x, y| {
            let sx = (PI * x).sin();
            let sy = (PI * y).sin();
            (sx * sy * (x + 0.2), sx * sy * (1.0 - y))
        });
        let mut prev = f64::INFINITY;
        for gamma in [1e2, 1e4, 1e6] {
            let op = EllipticOperator::new(1.0, 1.0, gamma, grid).unwrap();
            let u = op.solve(&rhs, 1e-11).unwrap();
            let div = crate::fields::divergence(&u).norms().l2;
            assert!(div <= prev * (1.0 + 1e-9), "gamma {gamma}: {div} vs {prev}");
            prev = div;
        }
    }
}

#[test]
fn grid_mismatch_is_reported() {
    let op = EllipticOperator::new(1.0, 1.0, 1.0, pbox(8)).unwrap();
    let other = VectorField::zeros(pbox(16));
    assert!(matches!(
        op.apply(&other),
        Err(crate::error::SolverError::GridMismatch { .. })
    ));
}

#[test]
fn invalid_coefficients_are_rejected() {
    assert!(EllipticOperator::new(-1.0, 1.0, 1.0, pbox(8)).is_err());
    assert!(EllipticOperator::new(1.0, 0.0, 1.0, pbox(8)).is_err());
    assert!(EllipticOperator::new(1.0, 1.0, -2.0, pbox(8)).is_err());
}

#[test]
fn helmholtz_only_dirichlet_solve_is_direct() {
    // gamma = 0 exercises the pure fast-transform path.
    let op = EllipticOperator::new(5.0, 2.0, 0.0, dbox(17)).unwrap();
    let exact = VectorField::from_fn(op.grid, |x, y| {
        let s = (PI * x).sin() * (2.0 * PI * y).sin();
        (s, -0.5 * s)
    });
    let rhs = op.apply(&exact).unwrap();
    let (u, stats) = op.solve_with_stats(&rhs, 1e-12).unwrap();
    assert_eq!(stats.iterations, 0);
    let direct = dense::solve_dense(&op, &rhs).unwrap();
    let mut diff = u.clone();
    diff.axpy(-1.0, &direct);
    assert!(diff.norms().l2 / direct.norms().l2 < 1e-11);
}
