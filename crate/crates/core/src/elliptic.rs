//! The constant-coefficient elliptic kernel shared by every scheme step:
//!
//! L(u) = sigma*u - nu*Lap(u) - gamma*GradDiv(u)
//!
//! Periodic grids invert the 2x2 per-mode symbol in closed form. On
//! Dirichlet grids the grad-div coupling is reduced to a scalar Schur
//! system in phi = div(u): with K = (sigma - nu*Lap)^-1 (a fast
//! sine-transform solve), phi solves (I - gamma*D K G) phi = D K b, after
//! which u = K(b + gamma*G phi). The raw Schur spectrum still spans
//! [O(1), O(gamma/nu)] because the wide centered stencils annihilate
//! checkerboard scalar modes, so the iteration is preconditioned by the
//! exact interior symbol in the cosine basis (centered gradients map DCT-I
//! modes onto the DST-I modes K diagonalizes). The preconditioned GMRES
//! count is then independent of both gamma and the grid, where a
//! Jacobi-preconditioned Krylov method on L itself would need ~sqrt(gamma)
//! times more iterations.

pub mod dense;

use crate::error::{Result, SolverError};
use crate::fields::{
    divergence, grad_div, gradient, laplacian, spectral_solve_elliptic, Bc, Grid, ScalarField,
    VectorField,
};
use crate::krylov::gmres;
use crate::transforms::{apply_2d, Dct1, Dst1};

/// Convergence data of one elliptic solve. `rel_residual` is the true
/// residual of L(u) - rhs over the solve's unknowns, relative to ||rhs||.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

/// The operator sigma - nu*Lap - gamma*GradDiv on a fixed grid, with
/// factored fast-transform data built once and reused for every solve.
pub struct EllipticOperator {
    pub sigma: f64,
    pub nu: f64,
    pub gamma: f64,
    pub grid: Grid,
    fd: Option<DirichletCore>,
}

impl EllipticOperator {
    pub fn new(sigma: f64, nu: f64, gamma: f64, grid: Grid) -> Result<Self> {
        if !(sigma >= 0.0) || !(nu > 0.0) || !(gamma >= 0.0) {
            return Err(SolverError::Config(format!(
                "elliptic coefficients must satisfy sigma>=0, nu>0, gamma>=0, \
                 got sigma={sigma}, nu={nu}, gamma={gamma}"
            )));
        }
        let fd = match grid.bc {
            Bc::Periodic => None,
            Bc::DirichletHomogeneous => Some(DirichletCore::new(&grid, sigma, nu, gamma)),
        };
        Ok(EllipticOperator {
            sigma,
            nu,
            gamma,
            grid,
            fd,
        })
    }

    /// Exact discrete action, built from the shared field operators.
    pub fn apply(&self, u: &VectorField) -> Result<VectorField> {
        self.grid.check_same(&u.grid)?;
        let mut out = laplacian(u);
        out.scale(-self.nu);
        out.axpy(-self.gamma, &grad_div(u));
        out.axpy(self.sigma, u);
        Ok(out)
    }

    pub fn solve(&self, rhs: &VectorField, tol: f64) -> Result<VectorField> {
        Ok(self.solve_with_stats(rhs, tol)?.0)
    }

    pub fn solve_with_stats(&self, rhs: &VectorField, tol: f64) -> Result<(VectorField, SolveStats)> {
        self.grid.check_same(&rhs.grid)?;
        if !(tol > 0.0) {
            return Err(SolverError::Config("solver tolerance must be positive".into()));
        }
        match self.grid.bc {
            Bc::Periodic => {
                let u = spectral_solve_elliptic(self.sigma, self.nu, self.gamma, rhs);
                Ok((
                    u,
                    SolveStats {
                        iterations: 0,
                        rel_residual: 0.0,
                    },
                ))
            }
            Bc::DirichletHomogeneous => self.solve_dirichlet(rhs, tol),
        }
    }

    fn solve_dirichlet(&self, rhs: &VectorField, tol: f64) -> Result<(VectorField, SolveStats)> {
        let core = self.fd.as_ref().expect("dirichlet core");
        let grid = self.grid;
        let mut b = rhs.clone();
        zero_boundary_vec(&mut b);
        let bnorm = euclid2(&b.x, &b.y);
        if bnorm == 0.0 {
            return Ok((
                VectorField::zeros(grid),
                SolveStats {
                    iterations: 0,
                    rel_residual: 0.0,
                },
            ));
        }

        // Pure Helmholtz: the fast solve is already exact.
        if self.gamma == 0.0 {
            let u = core.helm_vec(&grid, self.sigma, self.nu, &b);
            let stats = self.residual_stats(&u, &b, 0)?;
            return Ok((u, stats));
        }

        let kb = core.helm_vec(&grid, self.sigma, self.nu, &b);
        let mut dkb = divergence(&kb).data;
        if euclid(&dkb) == 0.0 {
            // rhs is discretely divergence-free under K; grad-div term inert
            let stats = self.residual_stats(&kb, &b, 0)?;
            return Ok((kb, stats));
        }
        core.schur_precondition(&grid, &mut dkb);
        // The constant mode of the Schur unknown is annihilated by the
        // gradient in the velocity update, so it never influences u;
        // project it out of the iteration.
        remove_mean(&mut dkb);

        let gamma = self.gamma;
        // Left preconditioning by the interior cosine-basis symbol of the
        // Schur operator: centered gradients map DCT-I scalar modes onto the
        // DST-I modes of the Helmholtz inverse, so away from the boundary
        // rows T is diagonal with symbol 1 + gamma |s|^2/(sigma - nu*lam).
        // This absorbs both the gamma-scale cluster and the near-checkerboard
        // modes that the wide stencils annihilate.
        let mut apply_schur = |phi: &[f64], out: &mut [f64]| {
            let scalar = ScalarField {
                grid,
                data: phi.to_vec(),
            };
            let mut g = gradient(&scalar);
            zero_boundary_vec(&mut g);
            let w = core.helm_vec(&grid, self.sigma, self.nu, &g);
            let d = divergence(&w);
            for i in 0..out.len() {
                out[i] = phi[i] - gamma * d.data[i];
            }
            core.schur_precondition(&grid, out);
            remove_mean(out);
        };

        // Tolerance for the preconditioned Schur iteration: the map from its
        // residual to the residual of L is gamma-amplified, so aim well
        // below the requested tolerance and verify the true residual.
        let delta0 = (tol * 0.1).clamp(1e-14, 1e-4);
        let max_iters = (10 * grid.len()).min(4000);

        let mut phi = vec![0.0; grid.len()];
        let mut best: Option<(VectorField, SolveStats)> = None;
        let mut total_iters = 0;
        let mut prev_residual = f64::INFINITY;
        let mut stagnated = false;
        for attempt in 0..12 {
            let delta = if attempt == 0 { delta0 } else { 1e-14 };
            let out = gmres(&mut apply_schur, &dkb, &mut phi, delta, max_iters, 100);
            total_iters += out.iterations;

            let scalar = ScalarField {
                grid,
                data: phi.clone(),
            };
            let mut g = gradient(&scalar);
            zero_boundary_vec(&mut g);
            let mut rhs_aug = b.clone();
            rhs_aug.axpy(gamma, &g);
            let u = core.helm_vec(&grid, self.sigma, self.nu, &rhs_aug);
            let stats = self.residual_stats(&u, &b, total_iters)?;
            let better = match &best {
                Some((_, s)) => stats.rel_residual < s.rel_residual,
                None => true,
            };
            if better {
                best = Some((u, stats));
            }
            if best.as_ref().unwrap().1.rel_residual <= tol {
                return Ok(best.unwrap());
            }
            // converged to the f64 floor: a tighter warm-started continuation
            // no longer moves the true residual
            if attempt > 0 && prev_residual / stats.rel_residual < 2.0 {
                stagnated = true;
                break;
            }
            prev_residual = stats.rel_residual;
        }

        // Below the representational floor of the gamma-scaled operator no
        // iterate can certify a smaller residual; return the best iterate
        // with its true residual rather than failing.
        let (u, stats) = best.unwrap();
        if stagnated && stats.rel_residual < 1e-4 {
            return Ok((u, stats));
        }
        Err(SolverError::SolveFailure {
            achieved: stats.rel_residual,
            target: tol,
            iterations: stats.iterations,
        })
    }

    fn residual_stats(&self, u: &VectorField, b: &VectorField, iterations: usize) -> Result<SolveStats> {
        let mut lu = self.apply(u)?;
        zero_boundary_vec(&mut lu);
        lu.axpy(-1.0, b);
        let bnorm = euclid2(&b.x, &b.y);
        let rel = if bnorm == 0.0 {
            0.0
        } else {
            euclid2(&lu.x, &lu.y) / bnorm
        };
        Ok(SolveStats {
            iterations,
            rel_residual: rel,
        })
    }
}

/// Zero both components on Dirichlet boundary nodes (no-op on periodic grids).
pub fn zero_boundary_vec(u: &mut VectorField) {
    let grid = u.grid;
    if grid.bc == Bc::Periodic {
        return;
    }
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.is_boundary(i, j) {
                let idx = grid.idx(i, j);
                u.x[idx] = 0.0;
                u.y[idx] = 0.0;
            }
        }
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v {
        *x -= mean;
    }
}

fn euclid2(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().map(|x| x * x).sum::<f64>() + b.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Fast-transform data for the interior Helmholtz inverse on a Dirichlet
/// grid, plus the cosine-basis Schur preconditioner symbol.
struct DirichletCore {
    dst_x: Dst1,
    dst_y: Dst1,
    lam_x: Vec<f64>,
    lam_y: Vec<f64>,
    dct_x: Dct1,
    dct_y: Dct1,
    schur_symbol: Vec<f64>,
}

impl DirichletCore {
    fn new(grid: &Grid, sigma: f64, nu: f64, gamma: f64) -> Self {
        let mx = grid.nx - 2;
        let my = grid.ny - 2;
        let lam = |m: usize, h: f64| -> Vec<f64> {
            (1..=m)
                .map(|k| {
                    let theta = std::f64::consts::PI * k as f64 / (m + 1) as f64;
                    (2.0 * theta.cos() - 2.0) / (h * h)
                })
                .collect()
        };
        let mut schur_symbol = vec![1.0; grid.nx * grid.ny];
        for ky in 0..grid.ny {
            let ty = std::f64::consts::PI * ky as f64 / (grid.ny - 1) as f64;
            let sy = ty.sin() / grid.hy;
            let ly = (2.0 * ty.cos() - 2.0) / (grid.hy * grid.hy);
            for kx in 0..grid.nx {
                let tx = std::f64::consts::PI * kx as f64 / (grid.nx - 1) as f64;
                let sx = tx.sin() / grid.hx;
                let lx = (2.0 * tx.cos() - 2.0) / (grid.hx * grid.hx);
                schur_symbol[ky * grid.nx + kx] =
                    1.0 + gamma * (sx * sx + sy * sy) / (sigma - nu * (lx + ly));
            }
        }
        DirichletCore {
            dst_x: Dst1::new(mx),
            dst_y: Dst1::new(my),
            lam_x: lam(mx, grid.hx),
            lam_y: lam(my, grid.hy),
            dct_x: Dct1::new(grid.nx),
            dct_y: Dct1::new(grid.ny),
            schur_symbol,
        }
    }

    /// Divide by the interior Schur symbol in the DCT-I basis.
    fn schur_precondition(&self, grid: &Grid, data: &mut [f64]) {
        let tx = |src: &[f64], dst: &mut [f64]| self.dct_x.apply(src, dst);
        let ty = |src: &[f64], dst: &mut [f64]| self.dct_y.apply(src, dst);
        let mut hat = apply_2d(&tx, &ty, grid.nx, grid.ny, data);
        for (h, s) in hat.iter_mut().zip(&self.schur_symbol) {
            *h /= s;
        }
        let back = apply_2d(&tx, &ty, grid.nx, grid.ny, &hat);
        let scale = self.dct_x.norm() * self.dct_y.norm();
        for (d, b) in data.iter_mut().zip(&back) {
            *d = b * scale;
        }
    }

    /// (sigma - nu*Lap5)^-1 on one scalar plane; boundary values zeroed.
    fn helm_plane(&self, grid: &Grid, sigma: f64, nu: f64, full: &[f64]) -> Vec<f64> {
        let (mx, my) = (grid.nx - 2, grid.ny - 2);
        let mut interior = vec![0.0; mx * my];
        for j in 0..my {
            for i in 0..mx {
                interior[j * mx + i] = full[grid.idx(i + 1, j + 1)];
            }
        }
        let tx = |src: &[f64], dst: &mut [f64]| self.dst_x.apply(src, dst);
        let ty = |src: &[f64], dst: &mut [f64]| self.dst_y.apply(src, dst);
        let mut hat = apply_2d(&tx, &ty, mx, my, &interior);
        for j in 0..my {
            for i in 0..mx {
                hat[j * mx + i] /= sigma - nu * (self.lam_x[i] + self.lam_y[j]);
            }
        }
        let back = apply_2d(&tx, &ty, mx, my, &hat);
        let scale = self.dst_x.norm() * self.dst_y.norm();
        let mut out = vec![0.0; grid.len()];
        for j in 0..my {
            for i in 0..mx {
                out[grid.idx(i + 1, j + 1)] = back[j * mx + i] * scale;
            }
        }
        out
    }

    fn helm_vec(&self, grid: &Grid, sigma: f64, nu: f64, rhs: &VectorField) -> VectorField {
        VectorField {
            grid: *grid,
            x: self.helm_plane(grid, sigma, nu, &rhs.x),
            y: self.helm_plane(grid, sigma, nu, &rhs.y),
        }
    }
}

#[cfg(test)]
mod tests;
