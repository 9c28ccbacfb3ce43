//! Fourier-collocation operators for periodic grids.
//!
//! First-derivative symbols zero the Nyquist mode, and the Laplacian is the
//! exact composition divergence(gradient(.)), so integration by parts holds
//! to roundoff and the discrete energy identities close exactly.

use super::{Grid, ScalarField, VectorField};
use crate::transforms::Fft2;
use rustfft::num_complex::Complex;

/// Integer mode number of index i on an n-point line, Nyquist mapped to 0.
fn mode(n: usize, i: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else if 2 * i == n {
        0
    } else {
        i as i64 - n as i64
    }
}

/// Derivative wavenumber for index i: 2*pi*mode/length.
fn wavenumber(n: usize, i: usize, length: f64) -> f64 {
    2.0 * std::f64::consts::PI * mode(n, i) as f64 / length
}

fn kx(grid: &Grid, i: usize) -> f64 {
    wavenumber(grid.nx, i, grid.x1 - grid.x0)
}

fn ky(grid: &Grid, j: usize) -> f64 {
    wavenumber(grid.ny, j, grid.y1 - grid.y0)
}

pub fn gradient(p: &ScalarField) -> VectorField {
    let grid = p.grid;
    let fft = Fft2::new(grid.nx, grid.ny);
    let spec = fft.forward(&p.data);
    let mut sx = spec.clone();
    let mut sy = spec;
    for j in 0..grid.ny {
        let wy = ky(&grid, j);
        for i in 0..grid.nx {
            let idx = grid.idx(i, j);
            let wx = kx(&grid, i);
            sx[idx] *= Complex::new(0.0, wx);
            sy[idx] *= Complex::new(0.0, wy);
        }
    }
    VectorField {
        grid,
        x: fft.inverse_re(sx),
        y: fft.inverse_re(sy),
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = u.grid;
    let fft = Fft2::new(grid.nx, grid.ny);
    let sx = fft.forward(&u.x);
    let sy = fft.forward(&u.y);
    let mut out = vec![Complex::default(); grid.len()];
    for j in 0..grid.ny {
        let wy = ky(&grid, j);
        for i in 0..grid.nx {
            let idx = grid.idx(i, j);
            let wx = kx(&grid, i);
            out[idx] = Complex::new(0.0, wx) * sx[idx] + Complex::new(0.0, wy) * sy[idx];
        }
    }
    ScalarField {
        grid,
        data: fft.inverse_re(out),
    }
}

fn lap_data(grid: &Grid, data: &[f64]) -> Vec<f64> {
    let fft = Fft2::new(grid.nx, grid.ny);
    let mut spec = fft.forward(data);
    for j in 0..grid.ny {
        let wy = ky(grid, j);
        for i in 0..grid.nx {
            let wx = kx(grid, i);
            spec[grid.idx(i, j)] *= -(wx * wx + wy * wy);
        }
    }
    fft.inverse_re(spec)
}

pub fn laplacian(u: &VectorField) -> VectorField {
    VectorField {
        grid: u.grid,
        x: lap_data(&u.grid, &u.x),
        y: lap_data(&u.grid, &u.y),
    }
}

pub fn scalar_laplacian(p: &ScalarField) -> ScalarField {
    ScalarField {
        grid: p.grid,
        data: lap_data(&p.grid, &p.data),
    }
}

/// 2/3-rule dealiasing: zero every mode with |m| > n/3 on either axis.
pub fn dealias_vector(u: &mut VectorField) {
    let grid = u.grid;
    let fft = Fft2::new(grid.nx, grid.ny);
    let cut_x = (grid.nx / 3) as i64;
    let cut_y = (grid.ny / 3) as i64;
    for comp in [&mut u.x, &mut u.y] {
        let mut spec = fft.forward(comp);
        for j in 0..grid.ny {
            let my = mode(grid.ny, j).abs();
            for i in 0..grid.nx {
                let mx = mode(grid.nx, i).abs();
                // Nyquist indices map to mode 0 but hold unresolved content.
                let nyq = (2 * i == grid.nx) || (2 * j == grid.ny);
                if mx > cut_x || my > cut_y || nyq {
                    spec[grid.idx(i, j)] = Complex::default();
                }
            }
        }
        *comp = fft.inverse_re(spec);
    }
}

/// Imaginary parts of the first-derivative symbols and the Laplacian symbol
/// for a periodic grid, for either discretization. The derivative acts as
/// multiplication by i*dx (resp. i*dy); the Laplacian by `lap` (<= 0).
pub fn periodic_symbols(grid: &Grid, i: usize, j: usize) -> (f64, f64, f64) {
    match grid.disc {
        super::Disc::Spectral => {
            let wx = kx(grid, i);
            let wy = ky(grid, j);
            (wx, wy, -(wx * wx + wy * wy))
        }
        super::Disc::FiniteDifference => {
            let tx = 2.0 * std::f64::consts::PI * i as f64 / grid.nx as f64;
            let ty = 2.0 * std::f64::consts::PI * j as f64 / grid.ny as f64;
            let dx = tx.sin() / grid.hx;
            let dy = ty.sin() / grid.hy;
            let lap = (2.0 * tx.cos() - 2.0) / (grid.hx * grid.hx)
                + (2.0 * ty.cos() - 2.0) / (grid.hy * grid.hy);
            (dx, dy, lap)
        }
    }
}

/// Squared magnitude of the first-derivative symbol pair: the symbol of the
/// composed divergence-gradient operator on a periodic grid.
pub fn periodic_laplace_symbol(grid: &Grid, i: usize, j: usize) -> f64 {
    let (dx, dy, _) = periodic_symbols(grid, i, j);
    dx * dx + dy * dy
}

/// Exact per-mode solve of (sigma - nu*Lap - gamma*GradDiv) u = rhs on a
/// periodic grid. The 2x2 mode matrix (a I + gamma d d^T) is inverted in
/// closed form. For sigma = 0 the zero mode of rhs must vanish; the zero
/// mode of the solution is set to zero.
pub fn spectral_solve_elliptic(
    sigma: f64,
    nu: f64,
    gamma: f64,
    rhs: &VectorField,
) -> VectorField {
    let grid = rhs.grid;
    let fft = Fft2::new(grid.nx, grid.ny);
    let mut sx = fft.forward(&rhs.x);
    let mut sy = fft.forward(&rhs.y);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let idx = grid.idx(i, j);
            let (dx, dy, lap) = periodic_symbols(&grid, i, j);
            let a = sigma - nu * lap;
            let d2 = dx * dx + dy * dy;
            if a == 0.0 {
                // nullspace mode (sigma = 0, constant): rhs must be zero here
                debug_assert!(
                    sx[idx].norm() + sy[idx].norm() < 1e-8 * (grid.len() as f64),
                    "zero-mode rhs on a sigma=0 periodic operator"
                );
                sx[idx] = Complex::default();
                sy[idx] = Complex::default();
                continue;
            }
            // (a I + g d d^T)^-1 = (1/a)(I - g d d^T / (a + g |d|^2))
            let c = gamma / (a * (a + gamma * d2));
            let dot = Complex::new(dx, 0.0) * sx[idx] + Complex::new(dy, 0.0) * sy[idx];
            let ux = sx[idx] / a - dot * (c * dx);
            let uy = sy[idx] / a - dot * (c * dy);
            sx[idx] = ux;
            sy[idx] = uy;
        }
    }
    VectorField {
        grid,
        x: fft.inverse_re(sx),
        y: fft.inverse_re(sy),
    }
}
