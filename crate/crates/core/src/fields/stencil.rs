//! Second-order finite-difference stencils: centered in the interior,
//! wraparound on periodic grids, one-sided second-order closures at
//! Dirichlet boundaries so derivatives are defined on the full grid.

use super::{Bc, Grid, ScalarField, VectorField};

/// d/dx of nodal data, full grid.
pub fn ddx(grid: &Grid, data: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let inv2h = 1.0 / (2.0 * grid.hx);
    let mut out = vec![0.0; data.len()];
    for j in 0..ny {
        let row = j * nx;
        match grid.bc {
            Bc::Periodic => {
                for i in 0..nx {
                    let ip = if i + 1 == nx { 0 } else { i + 1 };
                    let im = if i == 0 { nx - 1 } else { i - 1 };
                    out[row + i] = (data[row + ip] - data[row + im]) * inv2h;
                }
            }
            Bc::DirichletHomogeneous => {
                out[row] = (-3.0 * data[row] + 4.0 * data[row + 1] - data[row + 2]) * inv2h;
                for i in 1..nx - 1 {
                    out[row + i] = (data[row + i + 1] - data[row + i - 1]) * inv2h;
                }
                out[row + nx - 1] = (3.0 * data[row + nx - 1] - 4.0 * data[row + nx - 2]
                    + data[row + nx - 3])
                    * inv2h;
            }
        }
    }
    out
}

/// d/dy of nodal data, full grid.
pub fn ddy(grid: &Grid, data: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let inv2h = 1.0 / (2.0 * grid.hy);
    let mut out = vec![0.0; data.len()];
    for i in 0..nx {
        match grid.bc {
            Bc::Periodic => {
                for j in 0..ny {
                    let jp = if j + 1 == ny { 0 } else { j + 1 };
                    let jm = if j == 0 { ny - 1 } else { j - 1 };
                    out[j * nx + i] = (data[jp * nx + i] - data[jm * nx + i]) * inv2h;
                }
            }
            Bc::DirichletHomogeneous => {
                out[i] = (-3.0 * data[i] + 4.0 * data[nx + i] - data[2 * nx + i]) * inv2h;
                for j in 1..ny - 1 {
                    out[j * nx + i] = (data[(j + 1) * nx + i] - data[(j - 1) * nx + i]) * inv2h;
                }
                let last = (ny - 1) * nx + i;
                out[last] = (3.0 * data[last] - 4.0 * data[last - nx] + data[last - 2 * nx])
                    * inv2h;
            }
        }
    }
    out
}

/// Five-point Laplacian with one-sided second-order closures at Dirichlet
/// boundary nodes (values there are never used by the interior solves but
/// keep diagnostics defined on the full grid).
pub fn lap(grid: &Grid, data: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let ihx2 = 1.0 / (grid.hx * grid.hx);
    let ihy2 = 1.0 / (grid.hy * grid.hy);
    let mut out = vec![0.0; data.len()];
    // x-direction second differences
    for j in 0..ny {
        let row = j * nx;
        match grid.bc {
            Bc::Periodic => {
                for i in 0..nx {
                    let ip = if i + 1 == nx { 0 } else { i + 1 };
                    let im = if i == 0 { nx - 1 } else { i - 1 };
                    out[row + i] +=
                        (data[row + ip] - 2.0 * data[row + i] + data[row + im]) * ihx2;
                }
            }
            Bc::DirichletHomogeneous => {
                out[row] += (2.0 * data[row] - 5.0 * data[row + 1] + 4.0 * data[row + 2]
                    - data[row + 3])
                    * ihx2;
                for i in 1..nx - 1 {
                    out[row + i] +=
                        (data[row + i + 1] - 2.0 * data[row + i] + data[row + i - 1]) * ihx2;
                }
                let l = row + nx - 1;
                out[l] += (2.0 * data[l] - 5.0 * data[l - 1] + 4.0 * data[l - 2] - data[l - 3])
                    * ihx2;
            }
        }
    }
    // y-direction second differences
    for i in 0..nx {
        match grid.bc {
            Bc::Periodic => {
                for j in 0..ny {
                    let jp = if j + 1 == ny { 0 } else { j + 1 };
                    let jm = if j == 0 { ny - 1 } else { j - 1 };
                    out[j * nx + i] +=
                        (data[jp * nx + i] - 2.0 * data[j * nx + i] + data[jm * nx + i]) * ihy2;
                }
            }
            Bc::DirichletHomogeneous => {
                out[i] += (2.0 * data[i] - 5.0 * data[nx + i] + 4.0 * data[2 * nx + i]
                    - data[3 * nx + i])
                    * ihy2;
                for j in 1..ny - 1 {
                    out[j * nx + i] += (data[(j + 1) * nx + i] - 2.0 * data[j * nx + i]
                        + data[(j - 1) * nx + i])
                        * ihy2;
                }
                let l = (ny - 1) * nx + i;
                out[l] += (2.0 * data[l] - 5.0 * data[l - nx] + 4.0 * data[l - 2 * nx]
                    - data[l - 3 * nx])
                    * ihy2;
            }
        }
    }
    out
}

pub fn gradient(p: &ScalarField) -> VectorField {
    VectorField {
        grid: p.grid,
        x: ddx(&p.grid, &p.data),
        y: ddy(&p.grid, &p.data),
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let dx = ddx(&u.grid, &u.x);
    let dy = ddy(&u.grid, &u.y);
    let data = dx.iter().zip(&dy).map(|(a, b)| a + b).collect();
    ScalarField { grid: u.grid, data }
}

pub fn laplacian(u: &VectorField) -> VectorField {
    VectorField {
        grid: u.grid,
        x: lap(&u.grid, &u.x),
        y: lap(&u.grid, &u.y),
    }
}

pub fn scalar_laplacian(p: &ScalarField) -> ScalarField {
    ScalarField {
        grid: p.grid,
        data: lap(&p.grid, &p.data),
    }
}
