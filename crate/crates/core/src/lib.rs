//! Decoupled time-stepping schemes for the 2-D incompressible Navier-Stokes
//! equations.
//!
//! The crate provides:
//!
//! - penalty-relaxed schemes with a scalar auxiliary variable multiplying the
//!   explicitly treated nonlinearity (first- and second-order in time), where
//!   every step reduces to constant-coefficient elliptic solves plus one
//!   scalar update;
//! - sequential-regularization variants that iterate the penalty solve a few
//!   times per step with a damped divergence constraint, tightening the
//!   incompressibility error without shrinking the penalty parameter;
//! - a classical first-order linearized projection scheme as a baseline;
//! - a verification harness (manufactured solutions, convergence sweeps,
//!   energy monitoring) behind the `savns` command-line tool.
//!
//! Periodic boxes use Fourier collocation; homogeneous-Dirichlet boxes use
//! second-order finite differences with fast sine/cosine-transform solvers.

pub mod elliptic;
pub mod error;
pub mod fields;
pub mod io;
pub mod krylov;
pub mod projection;
pub mod psav;
pub mod sav;
pub mod srsav;
pub mod transforms;
pub mod verification;

pub use elliptic::{EllipticOperator, SolveStats};
pub use error::{Result, SolverError};
pub use fields::{
    divergence, grad_div, gradient, laplacian, scalar_laplacian, Bc, Disc, Grid, Norms,
    ScalarField, VectorField,
};
pub use projection::{ProjectionDiagnostics, ProjectionState, ProjectionStepper};
pub use psav::{
    energy, recover_pressure, FlowState, ForcingFn, PrevState, PsavStepper, SchemeConfig,
    StepDiagnostics, TimeOrder,
};
pub use srsav::{SrConfig, SrStepper};
pub use verification::{
    energy_series, fit_order, make_case, max_energy_gap, parse_param, run_case,
    run_convergence, run_eps_sweep, run_trajectory, run_trajectory_observed, CaseId,
    ConvergenceReport, EpsSweepConfig, ErrorReference, ManufacturedCase, ReportRow, RunResult,
    RunSpec, SchemeKind, SweepConfig, TrajectoryRecord,
};
