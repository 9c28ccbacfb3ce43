//! Discrete differential operators, dispatched on the grid discretization.
//!
//! grad_div is the literal composition gradient(divergence(.)) on every
//! backend, matching the recovered-pressure definition bit for bit.

use super::{spectral, stencil, Disc, ScalarField, VectorField};

/// L2, max, and H1-seminorm of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
    pub h1_semi: f64,
}

pub fn gradient(p: &ScalarField) -> VectorField {
    match p.grid.disc {
        Disc::Spectral => spectral::gradient(p),
        Disc::FiniteDifference => stencil::gradient(p),
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    match u.grid.disc {
        Disc::Spectral => spectral::divergence(u),
        Disc::FiniteDifference => stencil::divergence(u),
    }
}

pub fn laplacian(u: &VectorField) -> VectorField {
    match u.grid.disc {
        Disc::Spectral => spectral::laplacian(u),
        Disc::FiniteDifference => stencil::laplacian(u),
    }
}

pub fn scalar_laplacian(p: &ScalarField) -> ScalarField {
    match p.grid.disc {
        Disc::Spectral => spectral::scalar_laplacian(p),
        Disc::FiniteDifference => stencil::scalar_laplacian(p),
    }
}

pub fn grad_div(u: &VectorField) -> VectorField {
    gradient(&divergence(u))
}
