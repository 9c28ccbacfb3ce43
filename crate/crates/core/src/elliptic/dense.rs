//! Dense reference solve for small Dirichlet grids: assembles the elliptic
//! operator column by column and eliminates with partial pivoting. Used as
//! an independent cross-check of the fast solver; not a production path.

use super::{zero_boundary_vec, EllipticOperator};
use crate::error::{Result, SolverError};
use crate::fields::{Bc, VectorField};

/// Interior node list of a Dirichlet grid in (component, i, j) column order.
fn interior_nodes(op: &EllipticOperator) -> Vec<(usize, usize)> {
    let grid = op.grid;
    let mut nodes = Vec::new();
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            nodes.push((i, j));
        }
    }
    nodes
}

/// Explicitly assemble the interior operator matrix (row-major, 2m x 2m;
/// x-component unknowns first, then y).
pub fn assemble(op: &EllipticOperator) -> Result<Vec<Vec<f64>>> {
    if op.grid.bc != Bc::DirichletHomogeneous {
        return Err(SolverError::Config(
            "dense assembly is defined for Dirichlet grids".into(),
        ));
    }
    let nodes = interior_nodes(op);
    let m = nodes.len();
    let n = 2 * m;
    let mut matrix = vec![vec![0.0; n]; n];
    for (col, &(i, j)) in nodes.iter().enumerate() {
        for comp in 0..2 {
            let mut e = VectorField::zeros(op.grid);
            let idx = op.grid.idx(i, j);
            if comp == 0 {
                e.x[idx] = 1.0;
            } else {
                e.y[idx] = 1.0;
            }
            let mut col_field = op.apply(&e)?;
            zero_boundary_vec(&mut col_field);
            for (row, &(ri, rj)) in nodes.iter().enumerate() {
                let ridx = op.grid.idx(ri, rj);
                matrix[row][comp * m + col] = col_field.x[ridx];
                matrix[row + m][comp * m + col] = col_field.y[ridx];
            }
        }
    }
    Ok(matrix)
}

/// Gaussian elimination with partial pivoting.
pub fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&p, &q| a[p][k].abs().total_cmp(&a[q][k].abs()))
            .unwrap();
        if a[piv][k].abs() < 1e-300 {
            return Err(SolverError::Config("singular dense system".into()));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            if f != 0.0 {
                for c in k..n {
                    a[r][c] -= f * a[k][c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= a[k][c] * b[c];
        }
        b[k] = s / a[k][k];
    }
    Ok(b)
}

/// Direct solve of L(u) = rhs via the explicitly assembled matrix.
pub fn solve_dense(op: &EllipticOperator, rhs: &VectorField) -> Result<VectorField> {
    let nodes = interior_nodes(op);
    let m = nodes.len();
    let matrix = assemble(op)?;
    let mut b = vec![0.0; 2 * m];
    for (row, &(i, j)) in nodes.iter().enumerate() {
        let idx = op.grid.idx(i, j);
        b[row] = rhs.x[idx];
        b[row + m] = rhs.y[idx];
    }
    let sol = lu_solve(matrix, b)?;
    let mut u = VectorField::zeros(op.grid);
    for (row, &(i, j)) in nodes.iter().enumerate() {
        let idx = op.grid.idx(i, j);
        u.x[idx] = sol[row];
        u.y[idx] = sol[row + m];
    }
    Ok(u)
}
