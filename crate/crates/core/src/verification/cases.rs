//! Manufactured solutions with closed-form forcing.
//!
//! Case 1: homogeneous-Dirichlet box [0,1]^2 with a stream-function field
//! that switches on like sin(t); the body force is derived by hand from
//! f = u_t + (u.grad)u - nu*Lap(u) + grad(p).
//!
//! Case 2: Taylor-Green vortices on the periodic box [0,2pi]^2 with nu = 1.
//! The convective term is balanced by the pressure gradient and the decay
//! e^{-2t} balances viscosity, so the exact forcing is identically zero.

use crate::fields::{Bc, Grid, ScalarField, VectorField};
use crate::psav::ForcingFn;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// Dirichlet box, finite differences.
    Example1,
    /// Periodic Taylor-Green, Fourier collocation.
    Example2,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseId::Example1 => write!(f, "example1"),
            CaseId::Example2 => write!(f, "example2"),
        }
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "example1" => Ok(CaseId::Example1),
            "example2" => Ok(CaseId::Example2),
            other => Err(format!("unknown case '{other}' (expected example1|example2)")),
        }
    }
}

type VelocityFn = dyn Fn(f64, f64, f64) -> (f64, f64) + Send + Sync;
type PressureFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// Closed-form reference solution with matching forcing.
pub struct ManufacturedCase {
    pub id: CaseId,
    pub nu: f64,
    pub extents: (f64, f64, f64, f64),
    pub bc: Bc,
    exact_u: Arc<VelocityFn>,
    exact_p: Arc<PressureFn>,
    forcing: Arc<ForcingFn>,
}

pub fn make_case(id: CaseId) -> ManufacturedCase {
    match id {
        CaseId::Example1 => ManufacturedCase {
            id,
            nu: 1.0,
            extents: (0.0, 1.0, 0.0, 1.0),
            bc: Bc::DirichletHomogeneous,
            exact_u: Arc::new(example1_velocity),
            exact_p: Arc::new(example1_pressure),
            forcing: Arc::new(example1_forcing),
        },
        CaseId::Example2 => ManufacturedCase {
            id,
            nu: 1.0,
            extents: (0.0, 2.0 * PI, 0.0, 2.0 * PI),
            bc: Bc::Periodic,
            exact_u: Arc::new(taylor_green_velocity),
            exact_p: Arc::new(taylor_green_pressure),
            forcing: Arc::new(|_, _, _| (0.0, 0.0)),
        },
    }
}

impl ManufacturedCase {
    /// Natural grid of the case: spectral on the periodic box, second-order
    /// finite differences on the Dirichlet box.
    pub fn grid(&self, n: usize) -> crate::error::Result<Grid> {
        match self.bc {
            Bc::Periodic => Grid::periodic(n, n, self.extents),
            Bc::DirichletHomogeneous => Grid::dirichlet(n, n, self.extents),
        }
    }

    pub fn velocity_at(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        (self.exact_u)(t, x, y)
    }

    pub fn pressure_at(&self, t: f64, x: f64, y: f64) -> f64 {
        (self.exact_p)(t, x, y)
    }

    pub fn forcing_at(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        (self.forcing)(t, x, y)
    }

    /// True when the body force vanishes identically (free decay).
    pub fn is_unforced(&self) -> bool {
        matches!(self.id, CaseId::Example2)
    }

    pub fn velocity_field(&self, grid: Grid, t: f64) -> VectorField {
        let f = self.exact_u.clone();
        VectorField::from_fn(grid, move |x, y| f(t, x, y))
    }

    pub fn pressure_field(&self, grid: Grid, t: f64) -> ScalarField {
        let f = self.exact_p.clone();
        ScalarField::from_fn(grid, move |x, y| f(t, x, y))
    }

    pub fn forcing_fn(&self) -> Option<Arc<ForcingFn>> {
        if self.is_unforced() {
            None
        } else {
            Some(self.forcing.clone())
        }
    }
}

fn example1_velocity(t: f64, x: f64, y: f64) -> (f64, f64) {
    let s = t.sin();
    let sx = (PI * x).sin();
    let sy = (PI * y).sin();
    let s2x = (2.0 * PI * x).sin();
    let s2y = (2.0 * PI * y).sin();
    (s * sx * sx * s2y, -s * s2x * sy * sy)
}

fn example1_pressure(t: f64, x: f64, y: f64) -> f64 {
    t.sin() * (PI * x).cos() * (PI * y).sin()
}

/// Hand-derived f = u_t + (u.grad)u - nu Lap u + grad p for case 1 (nu = 1).
fn example1_forcing(t: f64, x: f64, y: f64) -> (f64, f64) {
    let nu = 1.0;
    let (s, c) = (t.sin(), t.cos());
    let pi2 = PI * PI;
    let sx = (PI * x).sin();
    let cx = (PI * x).cos();
    let sy = (PI * y).sin();
    let cy = (PI * y).cos();
    let s2x = (2.0 * PI * x).sin();
    let c2x = (2.0 * PI * x).cos();
    let s2y = (2.0 * PI * y).sin();
    let c2y = (2.0 * PI * y).cos();

    let ut_x = c * sx * sx * s2y;
    let ut_y = -c * s2x * sy * sy;

    let adv_x = PI * s * s * sx * sx * s2x * (s2y * s2y - 2.0 * sy * sy * c2y);
    let adv_y = PI * s * s * s2y * sy * sy * (s2x * s2x - 2.0 * sx * sx * c2x);

    let lap_x = s * (2.0 * pi2 * c2x * s2y - 4.0 * pi2 * sx * sx * s2y);
    let lap_y = -s * (2.0 * pi2 * s2x * c2y - 4.0 * pi2 * s2x * sy * sy);

    let gp_x = -PI * s * sx * sy;
    let gp_y = PI * s * cx * cy;

    (
        ut_x + adv_x - nu * lap_x + gp_x,
        ut_y + adv_y - nu * lap_y + gp_y,
    )
}

fn taylor_green_velocity(t: f64, x: f64, y: f64) -> (f64, f64) {
    let decay = (-2.0 * t).exp();
    (-x.cos() * y.sin() * decay, x.sin() * y.cos() * decay)
}

fn taylor_green_pressure(t: f64, x: f64, y: f64) -> f64 {
    -0.25 * ((2.0 * x).cos() + (2.0 * y).cos()) * (-4.0 * t).exp()
}
