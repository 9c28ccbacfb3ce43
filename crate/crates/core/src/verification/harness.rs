//! Trajectory driver and sweep harnesses behind the convergence tables,
//! the penalty-parameter study, and the energy-evolution data.

use super::cases::ManufacturedCase;
use super::report::{pairwise_order, ConvergenceReport, ReportRow};
use crate::error::{Result, SolverError};
use crate::fields::{Grid, ScalarField, VectorField};
use crate::projection::{ProjectionState, ProjectionStepper};
use crate::psav::{energy, FlowState, ForcingFn, PrevState, PsavStepper, SchemeConfig, TimeOrder};
use crate::srsav::{SrConfig, SrStepper};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Psav1,
    Psav2,
    Srsav1,
    Srsav2,
    Projection,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Psav1,
        SchemeKind::Psav2,
        SchemeKind::Srsav1,
        SchemeKind::Srsav2,
        SchemeKind::Projection,
    ];

    pub fn uses_eps(&self) -> bool {
        !matches!(self, SchemeKind::Projection)
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self, SchemeKind::Srsav1 | SchemeKind::Srsav2)
    }

    fn order(&self) -> TimeOrder {
        match self {
            SchemeKind::Psav2 | SchemeKind::Srsav2 => TimeOrder::Second,
            _ => TimeOrder::First,
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SchemeKind::Psav1 => "psav1",
            SchemeKind::Psav2 => "psav2",
            SchemeKind::Srsav1 => "srsav1",
            SchemeKind::Srsav2 => "srsav2",
            SchemeKind::Projection => "projection",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "psav1" => Ok(SchemeKind::Psav1),
            "psav2" => Ok(SchemeKind::Psav2),
            "srsav1" => Ok(SchemeKind::Srsav1),
            "srsav2" => Ok(SchemeKind::Srsav2),
            "projection" => Ok(SchemeKind::Projection),
            other => Err(format!(
                "unknown scheme '{other}' (expected psav1|psav2|srsav1|srsav2|projection)"
            )),
        }
    }
}

/// Scheme-independent run parameters.
#[derive(Debug, Clone, Copy)]
pub struct RunSpec {
    pub scheme: SchemeKind,
    pub dt: f64,
    pub nu: f64,
    pub eps: f64,
    pub beta: f64,
    pub s: usize,
    pub solver_tol: f64,
    pub t_end: f64,
}

impl RunSpec {
    fn scheme_config(&self) -> SchemeConfig {
        let mut cfg = SchemeConfig::new(self.dt, self.nu, self.eps, self.scheme.order());
        cfg.solver_tol = self.solver_tol;
        cfg
    }

    fn steps(&self) -> Result<usize> {
        let steps = (self.t_end / self.dt).round();
        if steps < 1.0 || ((steps * self.dt - self.t_end) / self.t_end).abs() > 1e-9 {
            return Err(SolverError::Config(format!(
                "dt {} does not divide the horizon {}",
                self.dt, self.t_end
            )));
        }
        Ok(steps as usize)
    }
}

/// One monitoring sample along a trajectory (the first entry is t = 0).
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRecord {
    pub t: f64,
    /// 1/2 ||u||^2
    pub kinetic_energy: f64,
    /// The modified (SAV) energy 1/2 ||u||^2 + (q^2 - 1)/2; converges to
    /// the kinetic energy as the auxiliary variable tracks 1.
    pub modified_energy: f64,
    pub div_linf: f64,
    pub q: f64,
    pub energy_identity_residual: Option<f64>,
    pub residual_momentum: f64,
    pub constraint_residual: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub u: VectorField,
    pub p: ScalarField,
    pub q: f64,
    pub t: f64,
    pub records: Vec<TrajectoryRecord>,
}

fn flow_record(state: &FlowState, div_linf: f64) -> TrajectoryRecord {
    let kinetic = 0.5 * state.u.inner(&state.u);
    TrajectoryRecord {
        t: state.t,
        kinetic_energy: kinetic,
        modified_energy: kinetic + 0.5 * (state.q * state.q - 1.0),
        div_linf,
        q: state.q,
        energy_identity_residual: None,
        residual_momentum: 0.0,
        constraint_residual: 0.0,
    }
}

/// Per-step observer: committed velocity, pressure, time, step index.
pub type StepObserver<'a> =
    &'a mut dyn FnMut(&VectorField, &ScalarField, f64, u64) -> Result<()>;

/// Integrate one trajectory from the given initial data.
pub fn run_trajectory(
    grid: Grid,
    spec: &RunSpec,
    u0: VectorField,
    p0: ScalarField,
    forcing: Option<Arc<ForcingFn>>,
) -> Result<RunResult> {
    run_trajectory_observed(grid, spec, u0, p0, forcing, &mut |_, _, _, _| Ok(()))
}

/// Integrate one trajectory, calling `observer` after every committed step.
pub fn run_trajectory_observed(
    grid: Grid,
    spec: &RunSpec,
    u0: VectorField,
    p0: ScalarField,
    forcing: Option<Arc<ForcingFn>>,
    observer: StepObserver,
) -> Result<RunResult> {
    let steps = spec.steps()?;
    let cfg = spec.scheme_config();
    let mut records = Vec::with_capacity(steps + 2);

    match spec.scheme {
        SchemeKind::Psav1 | SchemeKind::Psav2 => {
            let stepper = PsavStepper::new(grid, cfg, forcing)?;
            let mut state = FlowState::new(u0, p0, 0.0);
            records.push(flow_record(
                &state,
                crate::fields::divergence(&state.u).norms().linf,
            ));
            if spec.scheme == SchemeKind::Psav1 {
                for _ in 0..steps {
                    let (next, diag) = stepper.step_first_order(&state)?;
                    records.push(record_from(&next, &diag));
                    observer(&next.u, &next.p, next.t, next.step_index)?;
                    state = next;
                }
            } else {
                let (half, half_diag) = stepper.start_second_order(&state)?;
                records.push(record_from(&half, &half_diag));
                let (first, diag) = stepper.step_second_order(&state, &PrevState::HalfStep(&half))?;
                records.push(record_from(&first, &diag));
                observer(&first.u, &first.p, first.t, first.step_index)?;
                let mut prev = state;
                let mut state = first;
                for _ in 1..steps {
                    let (next, diag) =
                        stepper.step_second_order(&state, &PrevState::Previous(&prev))?;
                    records.push(record_from(&next, &diag));
                    observer(&next.u, &next.p, next.t, next.step_index)?;
                    prev = state;
                    state = next;
                }
                return Ok(RunResult {
                    q: state.q,
                    t: state.t,
                    u: state.u,
                    p: state.p,
                    records,
                });
            }
            Ok(RunResult {
                q: state.q,
                t: state.t,
                u: state.u,
                p: state.p,
                records,
            })
        }
        SchemeKind::Srsav1 | SchemeKind::Srsav2 => {
            let mut sr = SrConfig::new(cfg);
            sr.beta = spec.beta;
            sr.s = spec.s;
            let stepper = SrStepper::new(grid, sr, forcing)?;
            let mut state = FlowState::new(u0, p0, 0.0);
            records.push(flow_record(
                &state,
                crate::fields::divergence(&state.u).norms().linf,
            ));
            if spec.scheme == SchemeKind::Srsav1 {
                for _ in 0..steps {
                    let (next, diag) = stepper.step_first_order(&state)?;
                    records.push(record_from(&next, &diag));
                    observer(&next.u, &next.p, next.t, next.step_index)?;
                    state = next;
                }
            } else {
                let (half, half_diag) = stepper.start_second_order(&state)?;
                records.push(record_from(&half, &half_diag));
                let (first, diag) = stepper.step_second_order(&state, &PrevState::HalfStep(&half))?;
                records.push(record_from(&first, &diag));
                observer(&first.u, &first.p, first.t, first.step_index)?;
                let mut prev = state;
                let mut state = first;
                for _ in 1..steps {
                    let (next, diag) =
                        stepper.step_second_order(&state, &PrevState::Previous(&prev))?;
                    records.push(record_from(&next, &diag));
                    observer(&next.u, &next.p, next.t, next.step_index)?;
                    prev = state;
                    state = next;
                }
                return Ok(RunResult {
                    q: state.q,
                    t: state.t,
                    u: state.u,
                    p: state.p,
                    records,
                });
            }
            Ok(RunResult {
                q: state.q,
                t: state.t,
                u: state.u,
                p: state.p,
                records,
            })
        }
        SchemeKind::Projection => {
            let stepper = ProjectionStepper::new(grid, cfg, forcing)?;
            let mut state = ProjectionState::new(u0, 0.0);
            state.p = p0;
            records.push(TrajectoryRecord {
                t: 0.0,
                kinetic_energy: 0.5 * state.u.inner(&state.u),
                modified_energy: f64::NAN,
                div_linf: crate::fields::divergence(&state.u).norms().linf,
                q: f64::NAN,
                energy_identity_residual: None,
                residual_momentum: 0.0,
                constraint_residual: f64::NAN,
            });
            for _ in 0..steps {
                let (next, diag) = stepper.step(&state)?;
                observer(&next.u, &next.p, next.t, next.step_index)?;
                records.push(TrajectoryRecord {
                    t: next.t,
                    kinetic_energy: diag.energy,
                    modified_energy: f64::NAN,
                    div_linf: diag.div_linf,
                    q: f64::NAN,
                    energy_identity_residual: None,
                    residual_momentum: diag.advection_residual,
                    constraint_residual: f64::NAN,
                });
                state = next;
            }
            Ok(RunResult {
                q: f64::NAN,
                t: state.t,
                u: state.u,
                p: state.p,
                records,
            })
        }
    }
}

fn record_from(state: &FlowState, diag: &crate::psav::StepDiagnostics) -> TrajectoryRecord {
    let kinetic = 0.5 * state.u.inner(&state.u);
    TrajectoryRecord {
        t: state.t,
        kinetic_energy: kinetic,
        modified_energy: kinetic + 0.5 * (state.q * state.q - 1.0),
        div_linf: diag.div_linf,
        q: state.q,
        energy_identity_residual: diag.energy_identity_residual,
        residual_momentum: diag.residual_momentum,
        constraint_residual: diag.constraint_residual,
    }
}

/// Run a case from its exact initial data and measure errors at t_end.
pub fn run_case(
    case: &ManufacturedCase,
    grid: Grid,
    spec: &RunSpec,
) -> Result<(RunResult, CaseErrors)> {
    let u0 = case.velocity_field(grid, 0.0);
    let p0 = case.pressure_field(grid, 0.0);
    let result = run_trajectory(grid, spec, u0, p0, case.forcing_fn())?;
    let errors = errors_against_exact(case, grid, &result);
    Ok((result, errors))
}

#[derive(Debug, Clone, Copy)]
pub struct CaseErrors {
    pub u_linf: f64,
    pub p_l2: f64,
}

pub fn errors_against_exact(
    case: &ManufacturedCase,
    grid: Grid,
    result: &RunResult,
) -> CaseErrors {
    let mut du = result.u.clone();
    du.axpy(-1.0, &case.velocity_field(grid, result.t));
    let mut dp = result.p.clone();
    dp.axpy(-1.0, &case.pressure_field(grid, result.t));
    CaseErrors {
        u_linf: du.linf(),
        p_l2: dp.norms().l2,
    }
}

/// What a sweep measures its errors against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorReference {
    /// The manufactured exact solution; mixes the swept-parameter error
    /// with the fixed errors of the other discretization axes.
    Exact,
    /// A reference run of the same scheme on the same grid with the swept
    /// parameter pushed far below the sweep range (dt for time sweeps, eps
    /// for penalty sweeps). Isolates the swept error so its order is
    /// measurable even where another error source would floor it.
    SelfReference { param: f64 },
}

/// Time-refinement sweep for one scheme on one case.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub scheme: SchemeKind,
    pub grid_n: usize,
    pub dts: Vec<(String, f64)>,
    pub eps: f64,
    pub beta: f64,
    pub s: usize,
    pub solver_tol: f64,
    pub t_end: f64,
    pub reference: ErrorReference,
    /// Scheme used for the self-reference run (defaults to the swept scheme;
    /// a second-order scheme makes a cheap accurate reference for a
    /// first-order sweep).
    pub ref_scheme: Option<SchemeKind>,
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(scheme: SchemeKind, grid_n: usize, dts: Vec<(String, f64)>) -> Self {
        SweepConfig {
            scheme,
            grid_n,
            dts,
            eps: 1e-5,
            beta: 1.0,
            s: 2,
            solver_tol: 1e-12,
            t_end: 1.0,
            reference: ErrorReference::Exact,
            ref_scheme: None,
            jobs: 1,
        }
    }

    fn spec(&self, dt: f64, nu: f64) -> RunSpec {
        RunSpec {
            scheme: self.scheme,
            dt,
            nu,
            eps: self.eps,
            beta: self.beta,
            s: self.s,
            solver_tol: self.solver_tol,
            t_end: self.t_end,
        }
    }
}

struct RowData {
    err_u: f64,
    err_p: f64,
    div_linf: f64,
    q_drift: f64,
    seconds: f64,
}

fn measure_row(
    case: &ManufacturedCase,
    grid: Grid,
    spec: &RunSpec,
    reference: Option<&RunResult>,
) -> Result<RowData> {
    let start = Instant::now();
    let (result, exact_errors) = run_case(case, grid, spec)?;
    let seconds = start.elapsed().as_secs_f64();
    let (err_u, err_p) = match reference {
        None => (exact_errors.u_linf, exact_errors.p_l2),
        Some(r) => {
            let mut du = result.u.clone();
            du.axpy(-1.0, &r.u);
            let mut dp = result.p.clone();
            dp.axpy(-1.0, &r.p);
            (du.linf(), dp.norms().l2)
        }
    };
    Ok(RowData {
        err_u,
        err_p,
        div_linf: result.records.last().map(|r| r.div_linf).unwrap_or(0.0),
        q_drift: (result.q - 1.0).abs(),
        seconds,
    })
}

/// Run independent sweep rows, optionally across threads, preserving order.
fn run_rows<F>(jobs: usize, count: usize, runner: F) -> Result<Vec<RowData>>
where
    F: Fn(usize) -> Result<RowData> + Sync,
{
    if jobs <= 1 || count <= 1 {
        return (0..count).map(&runner).collect();
    }
    let mut out: Vec<Option<Result<RowData>>> = Vec::new();
    out.resize_with(count, || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(count) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= count {
                    break;
                }
                let row = runner(idx);
                slots.lock().expect("row slots")[idx] = Some(row);
            });
        }
    });
    out.into_iter().map(|slot| slot.expect("row computed")).collect()
}

fn assemble_report(params: &[(String, f64)], data: Vec<RowData>) -> ConvergenceReport {
    let mut rows: Vec<ReportRow> = Vec::new();
    for ((token, value), row) in params.iter().zip(data) {
        let (order_u, order_p) = match rows.last() {
            Some(prev) => (
                pairwise_order(prev.param_value, prev.err_u_linf, *value, row.err_u),
                pairwise_order(prev.param_value, prev.err_p_l2, *value, row.err_p),
            ),
            None => (None, None),
        };
        rows.push(ReportRow {
            param: token.clone(),
            param_value: *value,
            err_u_linf: row.err_u,
            err_p_l2: row.err_p,
            div_linf: row.div_linf,
            q_drift: row.q_drift,
            order_u,
            order_p,
            seconds: row.seconds,
        });
    }
    ConvergenceReport { rows }
}

pub fn run_convergence(case: &ManufacturedCase, cfg: &SweepConfig) -> Result<ConvergenceReport> {
    let grid = case.grid(cfg.grid_n)?;
    let reference = match cfg.reference {
        ErrorReference::Exact => None,
        ErrorReference::SelfReference { param } => {
            let mut spec = cfg.spec(param, case.nu);
            if let Some(scheme) = cfg.ref_scheme {
                spec.scheme = scheme;
            }
            let (result, _) = run_case(case, grid, &spec)?;
            Some(result)
        }
    };
    let data = run_rows(cfg.jobs, cfg.dts.len(), |idx| {
        let spec = cfg.spec(cfg.dts[idx].1, case.nu);
        measure_row(case, grid, &spec, reference.as_ref())
    })?;
    Ok(assemble_report(&cfg.dts, data))
}

#[derive(Debug, Clone)]
pub struct EpsSweepConfig {
    pub schemes: Vec<SchemeKind>,
    pub grid_n: usize,
    pub dt: (String, f64),
    pub eps_list: Vec<(String, f64)>,
    pub beta: f64,
    pub s: usize,
    pub solver_tol: f64,
    pub t_end: f64,
    pub reference: ErrorReference,
    pub jobs: usize,
}

pub fn run_eps_sweep(
    case: &ManufacturedCase,
    cfg: &EpsSweepConfig,
) -> Result<Vec<(SchemeKind, ConvergenceReport)>> {
    let grid = case.grid(cfg.grid_n)?;
    let mut out = Vec::new();
    for &scheme in &cfg.schemes {
        if !scheme.uses_eps() {
            return Err(SolverError::Config(format!(
                "scheme {scheme} has no penalty parameter to sweep"
            )));
        }
        let spec_for = |eps: f64| RunSpec {
            scheme,
            dt: cfg.dt.1,
            nu: case.nu,
            eps,
            beta: cfg.beta,
            s: cfg.s,
            solver_tol: cfg.solver_tol,
            t_end: cfg.t_end,
        };
        let reference = match cfg.reference {
            ErrorReference::Exact => None,
            ErrorReference::SelfReference { param } => {
                let (result, _) = run_case(case, grid, &spec_for(param))?;
                Some(result)
            }
        };
        let data = run_rows(cfg.jobs, cfg.eps_list.len(), |idx| {
            measure_row(case, grid, &spec_for(cfg.eps_list[idx].1), reference.as_ref())
        })?;
        out.push((scheme, assemble_report(&cfg.eps_list, data)));
    }
    Ok(out)
}

/// (t, original energy 1/2||u||^2, modified energy) samples of a run.
pub fn energy_series(records: &[TrajectoryRecord]) -> Vec<(f64, f64, f64)> {
    records
        .iter()
        .map(|r| (r.t, r.kinetic_energy, r.modified_energy))
        .collect()
}

/// Largest gap between the modified and original energy along a run.
pub fn max_energy_gap(records: &[TrajectoryRecord]) -> f64 {
    records
        .iter()
        .map(|r| (r.modified_energy - r.kinetic_energy).abs())
        .fold(0.0, f64::max)
}

/// Free-decay energy of the initial state, for normalizations.
pub fn initial_energy(u0: &VectorField) -> f64 {
    energy(u0, 1.0)
}
