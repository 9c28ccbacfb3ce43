//! Structured grids and nodal field containers.
//!
//! Everything downstream (elliptic solves, time steppers, verification)
//! works on node-centered samples over a uniform rectangular grid. The grid
//! carries both the boundary condition and the discretization used for
//! derivatives, so every operator call dispatches consistently.

mod ops;
mod spectral;
mod stencil;

pub use ops::{divergence, grad_div, gradient, laplacian, scalar_laplacian, Norms};
pub(crate) use spectral::{
    dealias_vector, periodic_laplace_symbol, spectral_solve_elliptic,
};

use crate::error::{Result, SolverError};

/// Boundary condition attached to a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    /// Fully periodic in both directions; nodes exclude the duplicate edge.
    Periodic,
    /// Homogeneous Dirichlet (no-slip for velocity); nodes include the boundary.
    DirichletHomogeneous,
}

/// Discretization backing the differential operators on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disc {
    /// Fourier collocation; only valid together with [`Bc::Periodic`].
    Spectral,
    /// Second-order centered differences (one-sided closures at Dirichlet
    /// boundaries, wraparound on periodic grids).
    FiniteDifference,
}

/// Uniform node-centered rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub bc: Bc,
    pub disc: Disc,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(
        nx: usize,
        ny: usize,
        extents: (f64, f64, f64, f64),
        bc: Bc,
        disc: Disc,
    ) -> Result<Self> {
        let (x0, x1, y0, y1) = extents;
        if nx < 4 || ny < 4 {
            return Err(SolverError::Config(format!(
                "grid must have at least 4 nodes per axis, got {nx}x{ny}"
            )));
        }
        if !(x1 > x0 && y1 > y0) {
            return Err(SolverError::Config("empty grid extents".into()));
        }
        if disc == Disc::Spectral && bc != Bc::Periodic {
            return Err(SolverError::Config(
                "spectral discretization requires periodic boundaries".into(),
            ));
        }
        let (hx, hy) = match bc {
            Bc::Periodic => ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64),
            Bc::DirichletHomogeneous => {
                ((x1 - x0) / (nx - 1) as f64, (y1 - y0) / (ny - 1) as f64)
            }
        };
        Ok(Grid {
            nx,
            ny,
            x0,
            x1,
            y0,
            y1,
            bc,
            disc,
            hx,
            hy,
        })
    }

    /// Periodic spectral grid, the default for the Taylor-Green experiments.
    pub fn periodic(nx: usize, ny: usize, extents: (f64, f64, f64, f64)) -> Result<Self> {
        Grid::new(nx, ny, extents, Bc::Periodic, Disc::Spectral)
    }

    /// Periodic grid with finite-difference operators (wraparound stencils).
    pub fn periodic_fd(nx: usize, ny: usize, extents: (f64, f64, f64, f64)) -> Result<Self> {
        Grid::new(nx, ny, extents, Bc::Periodic, Disc::FiniteDifference)
    }

    /// Homogeneous-Dirichlet grid with finite-difference operators.
    pub fn dirichlet(nx: usize, ny: usize, extents: (f64, f64, f64, f64)) -> Result<Self> {
        Grid::new(
            nx,
            ny,
            extents,
            Bc::DirichletHomogeneous,
            Disc::FiniteDifference,
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major (y-outer) node index.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        match self.bc {
            Bc::Periodic => false,
            Bc::DirichletHomogeneous => {
                i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
            }
        }
    }

    /// Quadrature weight of node (i, j): uniform cells on periodic grids,
    /// trapezoidal on Dirichlet grids.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.bc {
            Bc::Periodic => self.hx * self.hy,
            Bc::DirichletHomogeneous => {
                let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
                let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
                wx * wy * self.hx * self.hy
            }
        }
    }

    pub(crate) fn summary(&self) -> String {
        format!(
            "{}x{} [{},{}]x[{},{}] {:?}/{:?}",
            self.nx, self.ny, self.x0, self.x1, self.y0, self.y1, self.bc, self.disc
        )
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SolverError::GridMismatch {
                expected: self.summary(),
                found: other.summary(),
            })
        }
    }
}

/// Scalar samples, one per grid node, row-major with y outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

/// Two-component samples, one pair per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                data[grid.idx(i, j)] = f(grid.x(i), y);
            }
        }
        ScalarField { grid, data }
    }

    /// L2 inner product with trapezoidal/uniform quadrature weights.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product requires a shared grid");
        quad_sum(&self.grid, |idx| self.data[idx] * other.data[idx])
    }

    pub fn norms(&self) -> Norms {
        let l2 = self.inner(self).max(0.0).sqrt();
        let linf = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let g = gradient(self);
        let h1_semi = g.inner(&g).max(0.0).sqrt();
        Norms { l2, linf, h1_semi }
    }

    pub fn axpy(&mut self, alpha: f64, other: &ScalarField) {
        assert_eq!(self.grid, other.grid);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    /// Subtract the quadrature-weighted mean, pinning the Neumann nullspace.
    pub fn remove_mean(&mut self) {
        let area = quad_sum(&self.grid, |_| 1.0);
        let mean = quad_sum(&self.grid, |idx| self.data[idx]) / area;
        for a in &mut self.data {
            *a -= mean;
        }
    }
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            grid,
            x: vec![0.0; grid.len()],
            y: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut out = VectorField::zeros(grid);
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                let (fx, fy) = f(grid.x(i), y);
                let idx = grid.idx(i, j);
                out.x[idx] = fx;
                out.y[idx] = fy;
            }
        }
        out
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        assert_eq!(self.grid, other.grid, "inner product requires a shared grid");
        quad_sum(&self.grid, |idx| {
            self.x[idx] * other.x[idx] + self.y[idx] * other.y[idx]
        })
    }

    pub fn norms(&self) -> Norms {
        let l2 = self.inner(self).max(0.0).sqrt();
        let linf = self
            .x
            .iter()
            .chain(self.y.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let gx = gradient(&ScalarField {
            grid: self.grid,
            data: self.x.clone(),
        });
        let gy = gradient(&ScalarField {
            grid: self.grid,
            data: self.y.clone(),
        });
        let h1_semi = (gx.inner(&gx) + gy.inner(&gy)).max(0.0).sqrt();
        Norms { l2, linf, h1_semi }
    }

    pub fn axpy(&mut self, alpha: f64, other: &VectorField) {
        assert_eq!(self.grid, other.grid);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a += alpha * b;
        }
        for (a, b) in self.y.iter_mut().zip(&other.y) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.x {
            *a *= alpha;
        }
        for a in &mut self.y {
            *a *= alpha;
        }
    }

    /// a + alpha * b as a new field.
    pub fn add_scaled(&self, alpha: f64, other: &VectorField) -> VectorField {
        let mut out = self.clone();
        out.axpy(alpha, other);
        out
    }

    pub fn linf(&self) -> f64 {
        self.x
            .iter()
            .chain(self.y.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn quad_sum(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    match grid.bc {
        Bc::Periodic => {
            let w = grid.hx * grid.hy;
            let mut s = 0.0;
            for idx in 0..grid.len() {
                s += f(idx);
            }
            s * w
        }
        Bc::DirichletHomogeneous => {
            let mut s = 0.0;
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    s += grid.weight(i, j) * f(grid.idx(i, j));
                }
            }
            s
        }
    }
}
