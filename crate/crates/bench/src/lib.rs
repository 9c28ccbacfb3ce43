//! Shared setup helpers for the criterion benchmarks.

use savns_core::*;
use std::f64::consts::TAU;

pub fn taylor_green_periodic(n: usize) -> (Grid, VectorField) {
    let grid = Grid::periodic(n, n, (0.0, TAU, 0.0, TAU)).unwrap();
    let u = VectorField::from_fn(grid, |x, y| (-x.cos() * y.sin(), x.sin() * y.cos()));
    (grid, u)
}

pub fn bump_dirichlet(n: usize) -> (Grid, VectorField) {
    let grid = Grid::dirichlet(n, n, (0.0, 1.0, 0.0, 1.0)).unwrap();
    let pi = std::f64::consts::PI;
    let u = VectorField::from_fn(grid, |x, y| {
        let b = (pi * x).sin() * (pi * y).sin();
        (b * (1.0 + x), -b * (2.0 - y))
    });
    (grid, u)
}
