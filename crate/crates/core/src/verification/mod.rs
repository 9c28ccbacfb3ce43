//! Manufactured solutions, convergence/penalty sweeps, energy monitoring:
//! the machinery behind the reproduction tables and plots.

mod cases;
mod harness;
mod report;

pub use cases::{make_case, CaseId, ManufacturedCase};
pub use harness::{
    energy_series, errors_against_exact, initial_energy, max_energy_gap, run_case,
    run_convergence, run_eps_sweep, run_trajectory, run_trajectory_observed, CaseErrors,
    EpsSweepConfig, ErrorReference, RunResult, RunSpec, SchemeKind, StepObserver, SweepConfig,
    TrajectoryRecord,
};
pub use report::{
    fit_order, pairwise_order, parse_param, ConvergenceReport, ReportRow, REPORT_HEADER,
};
