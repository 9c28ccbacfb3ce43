//! The scalar-auxiliary-variable machinery shared by the penalty and
//! sequential-regularization steppers: the reformulated convective form
//! N(u) = (u.grad)u + (div u)u, the trilinear integrals feeding the scalar
//! update, and the closed-form solves for the auxiliary variable itself.
//!
//! The same discrete N(u) field enters both the momentum right-hand side and
//! the scalar update, which is what makes the discrete energy identity close
//! exactly regardless of stencil integration-by-parts errors.

use crate::error::{Result, SolverError};
use crate::fields::{dealias_vector, divergence, gradient, Disc, ScalarField, VectorField};

/// Threshold below which the scalar update is treated as singular.
const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Generalized convective sample (a.grad)b + (div a)b.
///
/// On the spectral backend the pointwise products are dealiased with the
/// 2/3 rule; the finite-difference backend keeps raw products.
pub fn advective_form(a: &VectorField, b: &VectorField) -> VectorField {
    assert_eq!(a.grid, b.grid, "advective form requires a shared grid");
    let grid = a.grid;
    let gbx = gradient(&ScalarField {
        grid,
        data: b.x.clone(),
    });
    let gby = gradient(&ScalarField {
        grid,
        data: b.y.clone(),
    });
    let div_a = divergence(a);
    let mut out = VectorField::zeros(grid);
    for idx in 0..grid.len() {
        out.x[idx] = a.x[idx] * gbx.x[idx] + a.y[idx] * gbx.y[idx] + div_a.data[idx] * b.x[idx];
        out.y[idx] = a.x[idx] * gby.x[idx] + a.y[idx] * gby.y[idx] + div_a.data[idx] * b.y[idx];
    }
    if grid.disc == Disc::Spectral {
        dealias_vector(&mut out);
    }
    out
}

/// N(u) = (u.grad)u + (div u)u, the reformulated nonlinearity.
pub fn nonlinear_form(u: &VectorField) -> VectorField {
    advective_form(u, u)
}

/// Trilinear form B(u1, u2, u3): the momentum-equation integrand of
/// (u1.grad)u2 + (div u1)u2 paired against u3 in the discrete L2 product.
pub fn trilinear_b(u1: &VectorField, u2: &VectorField, u3: &VectorField) -> f64 {
    advective_form(u1, u2).inner(u3)
}

/// Scalar update of the first-order scheme. With u = u1 + q_new * u2,
///
///   (q_new - q_prev)/dt = <n_field, u1> + q_new <n_field, u2>
///
/// solved in closed form.
pub fn solve_q_first_order(
    q_prev: f64,
    n_field: &VectorField,
    u1: &VectorField,
    u2: &VectorField,
    dt: f64,
) -> Result<f64> {
    let denominator = 1.0 - dt * n_field.inner(u2);
    if denominator.abs() < DEGENERATE_DENOMINATOR {
        return Err(SolverError::DegenerateAuxiliary { denominator });
    }
    Ok((q_prev + dt * n_field.inner(u1)) / denominator)
}

/// Scalar update of the midpoint scheme. The midpoint velocity is
/// w = w1 + (q_prev + q_new)/2 * w2, and
///
///   (q_new - q_prev)/dt = <n_field, w1 + (q_prev + q_new)/2 * w2>,
///
/// again a linear scalar equation.
pub fn solve_q_second_order(
    q_prev: f64,
    n_field: &VectorField,
    w1: &VectorField,
    w2: &VectorField,
    dt: f64,
) -> Result<f64> {
    let b2 = n_field.inner(w2);
    let denominator = 1.0 - 0.5 * dt * b2;
    if denominator.abs() < DEGENERATE_DENOMINATOR {
        return Err(SolverError::DegenerateAuxiliary { denominator });
    }
    Ok((q_prev + dt * n_field.inner(w1) + 0.5 * dt * q_prev * b2) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    fn pbox(n: usize) -> Grid {
        Grid::periodic(n, n, (0.0, TAU, 0.0, TAU)).unwrap()
    }

    /// band-limited pseudo-random field: modes up to +-3, deterministic
    fn smooth_random(grid: Grid, seed: u64) -> VectorField {
        let mut state = seed.max(1);
        let mut coef = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut cx = Vec::new();
        for kx in 0..4i32 {
            for ky in 0..4i32 {
                cx.push((kx, ky, coef(), coef(), coef(), coef()));
            }
        }
        VectorField::from_fn(grid, |x, y| {
            let mut fx = 0.0;
            let mut fy = 0.0;
            for &(kx, ky, a, b, c, d) in &cx {
                let phase = kx as f64 * x + ky as f64 * y;
                fx += a * phase.cos() + b * phase.sin();
                fy += c * phase.cos() + d * phase.sin();
            }
            (fx, fy)
        })
    }

    #[test]
    fn nonlinear_form_of_zero_and_constant_vanishes() {
        for grid in [
            pbox(16),
            Grid::periodic_fd(16, 16, (0.0, TAU, 0.0, TAU)).unwrap(),
            Grid::dirichlet(9, 9, (0.0, 1.0, 0.0, 1.0)).unwrap(),
        ] {
            let z = VectorField::zeros(grid);
            assert_eq!(nonlinear_form(&z).linf(), 0.0);
            let c = VectorField::from_fn(grid, |_, _| (1.25, -2.0));
            assert!(nonlinear_form(&c).linf() < 1e-12, "{:?}", grid.disc);
        }
    }

    #[test]
    fn nonlinear_form_matches_hand_calculus() {
        // u = (sin x, 0): (u.grad)u = (sin x cos x, 0), (div u)u = (sin x cos x, 0)
        let grid = pbox(24);
        let u = VectorField::from_fn(grid, |x, _| (x.sin(), 0.0));
        let n = nonlinear_form(&u);
        let exact = VectorField::from_fn(grid, |x, _| (2.0 * x.sin() * x.cos(), 0.0));
        let mut diff = n.clone();
        diff.axpy(-1.0, &exact);
        assert!(diff.linf() < 1e-12, "{}", diff.linf());
    }

    #[test]
    fn nonlinear_form_of_shear_modes_vanishes() {
        let grid = pbox(16);
        for f in [
            |x: f64, y: f64| {
                let _ = x;
                (y.sin(), 0.0)
            },
            |x: f64, y: f64| {
                let _ = y;
                (0.0, x.sin())
            },
        ] {
            let u = VectorField::from_fn(grid, f);
            assert!(nonlinear_form(&u).linf() < 1e-12);
        }
    }

    #[test]
    fn trilinear_with_zero_argument_vanishes() {
        let grid = pbox(8);
        let z = VectorField::zeros(grid);
        let u = smooth_random(grid, 5);
        assert_eq!(trilinear_b(&z, &u, &u), 0.0);
        assert_eq!(trilinear_b(&u, &z, &u), 0.0);
        assert_eq!(trilinear_b(&u, &u, &z), 0.0);
    }

    #[test]
    fn trilinear_energy_cancellation_for_divergence_free_field() {
        // B(u, u, u) = 0 for divergence-free periodic u
        let grid = pbox(32);
        let u = VectorField::from_fn(grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()));
        assert!(trilinear_b(&u, &u, &u).abs() <= 1e-10);
    }

    #[test]
    fn trilinear_matches_independent_adjoint_evaluation() {
        // B(u1,u2,u3) = -<(u1.grad)u3, u2> for periodic fields; the oracle is
        // quadrature over raw pointwise products, independent of the dealiased
        // production path.
        let grid = pbox(48);
        let u1 = smooth_random(grid, 11);
        let u2 = smooth_random(grid, 23);
        let u3 = smooth_random(grid, 37);
        let got = trilinear_b(&u1, &u2, &u3);

        let g3x = gradient(&ScalarField {
            grid,
            data: u3.x.clone(),
        });
        let g3y = gradient(&ScalarField {
            grid,
            data: u3.y.clone(),
        });
        let mut oracle = 0.0;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.idx(i, j);
                let adv_x = u1.x[idx] * g3x.x[idx] + u1.y[idx] * g3x.y[idx];
                let adv_y = u1.x[idx] * g3y.x[idx] + u1.y[idx] * g3y.y[idx];
                oracle -= (adv_x * u2.x[idx] + adv_y * u2.y[idx]) * grid.weight(i, j);
            }
        }
        let scale = u1.norms().l2 * u2.norms().l2 * u3.norms().l2;
        assert!(
            (got - oracle).abs() <= 1e-8 * scale.max(1.0),
            "got {got}, oracle {oracle}"
        );
    }

    #[test]
    fn q_updates_are_identity_without_nonlinearity() {
        let grid = pbox(8);
        let z = VectorField::zeros(grid);
        let u = smooth_random(grid, 3);
        assert_eq!(solve_q_first_order(0.73, &z, &u, &u, 0.1).unwrap(), 0.73);
        assert_eq!(solve_q_second_order(1.18, &z, &u, &u, 0.1).unwrap(), 1.18);
    }

    #[test]
    fn first_order_q_matches_brute_force_assembly() {
        let grid = pbox(16);
        let u_prev = VectorField::from_fn(grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()));
        let n = nonlinear_form(&u_prev);
        let u1 = smooth_random(grid, 41);
        let u2 = smooth_random(grid, 43);
        let dt = 0.05;
        let q_prev = 0.97;
        let got = solve_q_first_order(q_prev, &n, &u1, &u2, dt).unwrap();

        // brute force: evaluate both integrals with the fields quadrature
        let mut int1 = 0.0;
        let mut int2 = 0.0;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.idx(i, j);
                let w = grid.weight(i, j);
                int1 += w * (n.x[idx] * u1.x[idx] + n.y[idx] * u1.y[idx]);
                int2 += w * (n.x[idx] * u2.x[idx] + n.y[idx] * u2.y[idx]);
            }
        }
        let expect = (q_prev + dt * int1) / (1.0 - dt * int2);
        assert!((got - expect).abs() <= 1e-14 * (1.0 + expect.abs()));
        // the closed form solves its scalar equation exactly
        let residual = got - q_prev - dt * (int1 + got * int2);
        assert!(residual.abs() <= 1e-14 * (1.0 + got.abs()));
    }

    #[test]
    fn second_order_q_matches_picard_fixed_point() {
        let grid = pbox(16);
        let base = VectorField::from_fn(grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()));
        let n = nonlinear_form(&base);
        let w1 = smooth_random(grid, 51);
        let w2 = smooth_random(grid, 53);
        let dt = 0.02;
        let q_prev = 1.04;
        let got = solve_q_second_order(q_prev, &n, &w1, &w2, dt).unwrap();

        let b1 = n.inner(&w1);
        let b2 = n.inner(&w2);
        let mut q = q_prev;
        for _ in 0..50 {
            q = q_prev + dt * (b1 + 0.5 * (q_prev + q) * b2);
        }
        assert!((got - q).abs() <= 1e-14 * (1.0 + q.abs()), "{got} vs {q}");
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        let grid = pbox(8);
        let n = VectorField::from_fn(grid, |_, _| (1.0, 0.0));
        // <n, u2> = area => pick dt = 1/area so the denominator vanishes
        let u2 = VectorField::from_fn(grid, |_, _| (1.0, 0.0));
        let area = TAU * TAU;
        let err = solve_q_first_order(1.0, &n, &u2, &u2, 1.0 / area);
        assert!(matches!(
            err,
            Err(SolverError::DegenerateAuxiliary { .. })
        ));
    }
}
