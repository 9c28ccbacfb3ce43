//! Classical first-order linearized projection baseline.
//!
//! Predictor: (1/dt - nu*Lap + u^n.grad) u* = u^n/dt + f, u*|bd = 0, solved
//! with GMRES preconditioned by the exact constant-coefficient Helmholtz
//! inverse. Corrector: Lap p = div(u*)/dt with an artificial homogeneous
//! Neumann condition (cosine-transform solve, nullspace pinned to zero
//! mean), then u = u* - dt*grad p. On periodic grids the corrector uses the
//! composed divergence-gradient symbol, which makes the update the exact
//! per-mode Leray projection.

use crate::elliptic::{zero_boundary_vec, EllipticOperator};
use crate::error::{Result, SolverError};
use crate::fields::periodic_laplace_symbol;
use crate::fields::{divergence, gradient, Bc, Grid, ScalarField, VectorField};
use crate::krylov::gmres;
use crate::psav::{ForcingFn, SchemeConfig};
use crate::transforms::{apply_2d, Dct1, Fft2};
use std::sync::Arc;

/// Trajectory state of the projection scheme. On Dirichlet grids the
/// corrected velocity carries the scheme's characteristic tangential slip
/// -dt * grad p on the boundary.
#[derive(Debug, Clone)]
pub struct ProjectionState {
    pub u: VectorField,
    pub p: ScalarField,
    pub t: f64,
    pub step_index: u64,
}

impl ProjectionState {
    pub fn new(u: VectorField, t: f64) -> Self {
        let grid = u.grid;
        ProjectionState {
            u,
            p: ScalarField::zeros(grid),
            t,
            step_index: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectionDiagnostics {
    /// max |div u| after the correction.
    pub div_linf: f64,
    /// 1/2 ||u||^2 of the corrected velocity.
    pub energy: f64,
    /// true relative residual of the linearized advection-diffusion solve.
    pub advection_residual: f64,
    /// removed mean of the Poisson right-hand side, relative to its rms.
    pub poisson_mean_fraction: f64,
}

pub struct ProjectionStepper {
    pub grid: Grid,
    pub cfg: SchemeConfig,
    helm: EllipticOperator,
    neumann: Option<NeumannPoisson>,
    forcing: Option<Arc<ForcingFn>>,
}

impl ProjectionStepper {
    /// `cfg.eps` and `cfg.order` are not used by the projection scheme.
    pub fn new(grid: Grid, cfg: SchemeConfig, forcing: Option<Arc<ForcingFn>>) -> Result<Self> {
        if !(cfg.dt > 0.0 && cfg.nu > 0.0 && cfg.solver_tol > 0.0) {
            return Err(SolverError::Config(
                "projection scheme needs positive dt, nu, tolerance".into(),
            ));
        }
        let helm = EllipticOperator::new(1.0 / cfg.dt, cfg.nu, 0.0, grid)?;
        let neumann = match grid.bc {
            Bc::Periodic => None,
            Bc::DirichletHomogeneous => Some(NeumannPoisson::new(&grid)),
        };
        Ok(ProjectionStepper {
            grid,
            cfg,
            helm,
            neumann,
            forcing,
        })
    }

    pub fn step(&self, state: &ProjectionState) -> Result<(ProjectionState, ProjectionDiagnostics)> {
        self.grid.check_same(&state.u.grid)?;
        let dt = self.cfg.dt;
        let t_new = state.t + dt;

        let mut rhs = state.u.clone();
        rhs.scale(1.0 / dt);
        if let Some(f) = self.forcing.as_ref() {
            let mut field = VectorField::from_fn(self.grid, |x, y| f(t_new, x, y));
            zero_boundary_vec(&mut field);
            rhs.axpy(1.0, &field);
        }
        let (u_star, advection_residual) = self.solve_advection_diffusion(&state.u, &rhs)?;

        let (u_new, p_new, poisson_mean_fraction) = self.pressure_projection(&u_star)?;

        let div = divergence(&u_new);
        let diag = ProjectionDiagnostics {
            div_linf: div.norms().linf,
            energy: 0.5 * u_new.inner(&u_new),
            advection_residual,
            poisson_mean_fraction,
        };
        Ok((
            ProjectionState {
                u: u_new,
                p: p_new,
                t: t_new,
                step_index: state.step_index + 1,
            },
            diag,
        ))
    }

    /// Solve (1/dt - nu*Lap + a.grad) v = rhs with v|bd = 0.
    fn solve_advection_diffusion(
        &self,
        advecting: &VectorField,
        rhs: &VectorField,
    ) -> Result<(VectorField, f64)> {
        let grid = self.grid;
        let n = grid.len();
        let tol = self.cfg.solver_tol;

        let mut b = rhs.clone();
        if grid.bc == Bc::DirichletHomogeneous {
            zero_boundary_vec(&mut b);
        }
        let bnorm = (b.inner(&b)).sqrt();
        if bnorm == 0.0 {
            return Ok((VectorField::zeros(grid), 0.0));
        }

        let apply_full = |v: &VectorField| -> Result<VectorField> {
            let mut out = self.helm.apply(v)?;
            let gx = gradient(&ScalarField {
                grid,
                data: v.x.clone(),
            });
            let gy = gradient(&ScalarField {
                grid,
                data: v.y.clone(),
            });
            for idx in 0..n {
                out.x[idx] += advecting.x[idx] * gx.x[idx] + advecting.y[idx] * gx.y[idx];
                out.y[idx] += advecting.x[idx] * gy.x[idx] + advecting.y[idx] * gy.y[idx];
            }
            if grid.bc == Bc::DirichletHomogeneous {
                zero_boundary_vec(&mut out);
            }
            Ok(out)
        };

        // preconditioned operator: K A v, K the exact Helmholtz inverse
        let mut apply_pre = |flat: &[f64], out: &mut [f64]| {
            let v = unflatten(grid, flat);
            let av = apply_full(&v).expect("operator application");
            let kav = self.helm.solve(&av, tol).expect("helmholtz preconditioner");
            flatten(&kav, out);
        };
        let kb = self.helm.solve(&b, tol)?;
        let mut rhs_flat = vec![0.0; 2 * n];
        flatten(&kb, &mut rhs_flat);
        let mut x = rhs_flat.clone();
        let out = gmres(&mut apply_pre, &rhs_flat, &mut x, tol.max(1e-14), 400, 40);
        let u_star = {
            let mut v = unflatten(grid, &x);
            if grid.bc == Bc::DirichletHomogeneous {
                zero_boundary_vec(&mut v);
            }
            v
        };
        // true residual of the unpreconditioned system
        let mut r = apply_full(&u_star)?;
        r.axpy(-1.0, &b);
        let achieved = (r.inner(&r)).sqrt() / bnorm;
        if achieved > 100.0 * tol.max(1e-13) {
            return Err(SolverError::SolveFailure {
                achieved,
                target: tol,
                iterations: out.iterations,
            });
        }
        Ok((u_star, achieved))
    }

    /// Pressure correction: solve the Neumann/periodic Poisson problem for
    /// p with rhs div(u*)/dt, remove the nullspace, and subtract dt*grad p.
    pub fn pressure_projection(
        &self,
        u_star: &VectorField,
    ) -> Result<(VectorField, ScalarField, f64)> {
        let grid = self.grid;
        let dt = self.cfg.dt;
        let mut rhs = divergence(u_star);
        rhs.scale(1.0 / dt);

        let (p, fraction) = match grid.bc {
            Bc::Periodic => (poisson_periodic(&rhs), 0.0),
            Bc::DirichletHomogeneous => {
                let core = self.neumann.as_ref().expect("neumann core");
                let (p, fraction) = core.solve(&grid, &rhs);
                if fraction > 0.5 {
                    return Err(SolverError::PoissonIncompatible { fraction });
                }
                (p, fraction)
            }
        };
        let mut u_new = u_star.clone();
        u_new.axpy(-dt, &gradient(&p));
        Ok((u_new, p, fraction))
    }
}

fn flatten(v: &VectorField, out: &mut [f64]) {
    let n = v.x.len();
    out[..n].copy_from_slice(&v.x);
    out[n..].copy_from_slice(&v.y);
}

fn unflatten(grid: Grid, flat: &[f64]) -> VectorField {
    let n = grid.len();
    VectorField {
        grid,
        x: flat[..n].to_vec(),
        y: flat[n..].to_vec(),
    }
}

/// Solve Lap p = rhs on a periodic grid with the composed
/// divergence-gradient symbol, zero-mean normalization.
fn poisson_periodic(rhs: &ScalarField) -> ScalarField {
    let grid = rhs.grid;
    let fft = Fft2::new(grid.nx, grid.ny);
    let mut spec = fft.forward(&rhs.data);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let idx = grid.idx(i, j);
            let d2 = periodic_laplace_symbol(&grid, i, j);
            if d2 == 0.0 {
                spec[idx] = Default::default();
            } else {
                spec[idx] /= -d2;
            }
        }
    }
    ScalarField {
        grid,
        data: fft.inverse_re(spec),
    }
}

/// Cosine-transform solve of the reflected-ghost Neumann Laplacian.
struct NeumannPoisson {
    dct_x: Dct1,
    dct_y: Dct1,
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
}

impl NeumannPoisson {
    fn new(grid: &Grid) -> Self {
        let lam = |n: usize, h: f64| -> Vec<f64> {
            (0..n)
                .map(|k| {
                    let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
                    (2.0 * theta.cos() - 2.0) / (h * h)
                })
                .collect()
        };
        NeumannPoisson {
            dct_x: Dct1::new(grid.nx),
            dct_y: Dct1::new(grid.ny),
            lam_x: lam(grid.nx, grid.hx),
            lam_y: lam(grid.ny, grid.hy),
        }
    }

    fn solve(&self, grid: &Grid, rhs: &ScalarField) -> (ScalarField, f64) {
        let (nx, ny) = (grid.nx, grid.ny);
        let tx = |src: &[f64], dst: &mut [f64]| self.dct_x.apply(src, dst);
        let ty = |src: &[f64], dst: &mut [f64]| self.dct_y.apply(src, dst);
        let mut hat = apply_2d(&tx, &ty, nx, ny, &rhs.data);
        // hat[0] is the half-weighted node sum = trapezoid integral / (hx hy)
        let area = (grid.x1 - grid.x0) * (grid.y1 - grid.y0);
        let mean = hat[0] * grid.hx * grid.hy / area;
        let rms = (rhs.inner(rhs) / area).sqrt();
        let fraction = mean.abs() / (rms + f64::MIN_POSITIVE);
        hat[0] = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                if i == 0 && j == 0 {
                    continue;
                }
                hat[j * nx + i] /= self.lam_x[i] + self.lam_y[j];
            }
        }
        let back = apply_2d(&tx, &ty, nx, ny, &hat);
        let scale = self.dct_x.norm() * self.dct_y.norm();
        let mut p = ScalarField {
            grid: *grid,
            data: back.iter().map(|v| v * scale).collect(),
        };
        // pin the nullspace exactly in the quadrature sense as well
        p.remove_mean();
        (p, fraction)
    }
}
