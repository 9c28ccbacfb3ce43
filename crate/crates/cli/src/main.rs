//! `savns`: run the decoupled Navier-Stokes schemes from the command line.
//!
//! Subcommands: `simulate` (one trajectory with snapshots), `converge`
//! (time-refinement sweep), `eps-sweep` (penalty-parameter study at fixed
//! dt), `energy` (energy-evolution series for a list of time steps). Every
//! run writes its artifacts plus a `run.json` manifest into the output
//! directory. Exit codes: 0 success, 1 runtime/solver failure,
//! 2 configuration error.

mod manifest;

use clap::{Args, Parser, Subcommand};
use savns_core::error::SolverError;
use savns_core::io;
use savns_core::verification as verify;
use savns_core::{
    parse_param, CaseId, ErrorReference, Grid, ScalarField, SchemeKind, VectorField,
};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "savns", version, about = "Decoupled penalty/SAV solvers for the 2-D incompressible Navier-Stokes equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory; write snapshots, an energy series, and a
    /// final checkpoint
    Simulate(SimulateArgs),
    /// Time-refinement convergence sweep; writes report.csv
    Converge(ConvergeArgs),
    /// Penalty-parameter sweep at fixed dt; writes report-<scheme>.csv
    #[command(name = "eps-sweep")]
    EpsSweep(EpsSweepArgs),
    /// Energy-evolution study for a list of time steps; writes one
    /// energy-<dt>.csv per step size
    Energy(EnergyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory (default: $SAVNS_OUT or ./savns-out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance of the linear solves
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Penalty parameter
    #[arg(long, default_value = "1e-5")]
    eps: String,
    /// Damping parameter of the sequential-regularization constraint
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Inner iterations per sequential-regularization step
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Final time
    #[arg(long = "t-end", default_value_t = 1.0)]
    t_end: f64,
    /// Nodes per axis
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Worker threads for independent sweep rows
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write zeros in wall-clock columns so outputs are byte-identical
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Manufactured case (example1|example2) or `zero` for resting data on
    /// a periodic box
    #[arg(long, conflicts_with = "initial")]
    case: Option<String>,
    /// Initial velocity field file (as written by the snapshot writer)
    #[arg(long)]
    initial: Option<PathBuf>,
    #[arg(long)]
    scheme: SchemeKind,
    /// Time step (fractions like 1/32 are exact)
    #[arg(long)]
    dt: String,
    /// Viscosity (only for `zero`/file-initialized runs; cases pin nu)
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Write u_/p_ snapshots every N steps (0: only the final state)
    #[arg(long = "snapshot-every", default_value_t = 0)]
    snapshot_every: u64,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    case: String,
    #[arg(long)]
    scheme: SchemeKind,
    /// Comma-separated time steps, e.g. 1/4,1/8,1/16,1/32
    #[arg(long)]
    dts: String,
    /// Error reference: `exact` (manufactured solution) or `self`
    /// (reference run at --ref-dt, isolating the temporal error)
    #[arg(long = "error-ref", default_value = "exact")]
    error_ref: String,
    /// Time step of the self-reference run
    #[arg(long = "ref-dt")]
    ref_dt: Option<String>,
    /// Scheme of the self-reference run (defaults to --scheme)
    #[arg(long = "ref-scheme")]
    ref_scheme: Option<SchemeKind>,
}

#[derive(Args)]
struct EpsSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    case: String,
    /// Comma-separated schemes, e.g. psav2,srsav2
    #[arg(long)]
    schemes: String,
    #[arg(long)]
    dt: String,
    /// Comma-separated penalty parameters, e.g. 0.1,0.05,0.025,0.0125
    #[arg(long = "eps-list")]
    eps_list: String,
    /// Error reference: `exact` or `self` (reference run at --ref-eps)
    #[arg(long = "error-ref", default_value = "self")]
    error_ref: String,
    /// Penalty parameter of the self-reference run
    #[arg(long = "ref-eps", default_value = "1e-6")]
    ref_eps: String,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Unforced case (example2) for the free-decay energy study
    #[arg(long, default_value = "example2")]
    case: String,
    #[arg(long, default_value = "psav2")]
    scheme: SchemeKind,
    /// Comma-separated time steps, one energy series per entry
    #[arg(long)]
    dts: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Converge(args) => converge(args),
        Command::EpsSweep(args) => eps_sweep(args),
        Command::Energy(args) => energy(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                SolverError::Config(_) | SolverError::Parse(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn out_dir(common: &CommonArgs) -> Result<PathBuf, SolverError> {
    let dir = common
        .out
        .clone()
        .or_else(|| std::env::var_os("SAVNS_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("savns-out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn parse_case(token: &str) -> Result<CaseId, SolverError> {
    token
        .parse()
        .map_err(|e: String| SolverError::Config(format!("case: {e}")))
}

fn parse_list(tokens: &str, field: &str) -> Result<Vec<(String, f64)>, SolverError> {
    let mut out = Vec::new();
    for token in tokens.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let value =
            parse_param(token).map_err(|e| SolverError::Config(format!("{field}: {e}")))?;
        out.push((token.to_string(), value));
    }
    if out.is_empty() {
        return Err(SolverError::Config(format!("{field}: empty list")));
    }
    Ok(out)
}

fn parse_schemes(tokens: &str) -> Result<Vec<SchemeKind>, SolverError> {
    tokens
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e: String| SolverError::Config(format!("schemes: {e}")))
        })
        .collect()
}

fn scaled_seconds(no_timing: bool, seconds: f64) -> f64 {
    if no_timing {
        0.0
    } else {
        seconds
    }
}

fn strip_timing(report: &mut verify::ConvergenceReport) {
    for row in &mut report.rows {
        row.seconds = 0.0;
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), SolverError> {
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

fn sanitize(token: &str) -> String {
    token.replace('/', "_").replace('.', "p")
}

fn simulate(args: SimulateArgs) -> Result<(), SolverError> {
    let start = Instant::now();
    let dir = out_dir(&args.common)?;
    let dt = parse_param(&args.dt).map_err(|e| SolverError::Config(format!("dt: {e}")))?;
    let eps =
        parse_param(&args.common.eps).map_err(|e| SolverError::Config(format!("eps: {e}")))?;

    // initial data, grid, forcing
    let (grid, u0, p0, forcing, nu, case_name) = if let Some(path) = &args.initial {
        let file = fs::File::open(path)?;
        let u0 = io::read_vector_field(std::io::BufReader::new(file), None)?;
        let grid = u0.grid;
        (
            grid,
            u0,
            ScalarField::zeros(grid),
            None,
            args.nu,
            format!("file:{}", path.display()),
        )
    } else {
        match args.case.as_deref() {
            Some("zero") => {
                let grid = Grid::periodic(
                    args.common.grid,
                    args.common.grid,
                    (0.0, std::f64::consts::TAU, 0.0, std::f64::consts::TAU),
                )?;
                (
                    grid,
                    VectorField::zeros(grid),
                    ScalarField::zeros(grid),
                    None,
                    args.nu,
                    "zero".to_string(),
                )
            }
            Some(token) => {
                let case = verify::make_case(parse_case(token)?);
                let grid = case.grid(args.common.grid)?;
                (
                    grid,
                    case.velocity_field(grid, 0.0),
                    case.pressure_field(grid, 0.0),
                    case.forcing_fn(),
                    case.nu,
                    token.to_string(),
                )
            }
            None => {
                return Err(SolverError::Config(
                    "simulate needs --case or --initial".into(),
                ))
            }
        }
    };

    let spec = verify::RunSpec {
        scheme: args.scheme,
        dt,
        nu,
        eps,
        beta: args.common.beta,
        s: args.common.s,
        solver_tol: args.common.tol,
        t_end: args.common.t_end,
    };

    let cadence = args.snapshot_every;
    let mut artifacts: Vec<String> = Vec::new();
    let mut snapshot =
        |u: &VectorField, p: &ScalarField, step: u64| -> Result<(), SolverError> {
            let uname = format!("u_{step:06}");
            let pname = format!("p_{step:06}");
            let mut uf = fs::File::create(dir.join(&uname))?;
            io::write_vector_field(&mut uf, u)?;
            let mut pf = fs::File::create(dir.join(&pname))?;
            io::write_scalar_field(&mut pf, p)?;
            artifacts.push(uname);
            artifacts.push(pname);
            Ok(())
        };

    snapshot(&u0, &p0, 0)?;
    let mut last_step = 0u64;
    let mut last_snapshot = 0u64;
    let result = verify::run_trajectory_observed(
        grid,
        &spec,
        u0,
        p0,
        forcing,
        &mut |u, p, _t, step| {
            last_step = step;
            if cadence > 0 && step % cadence == 0 {
                snapshot(u, p, step)?;
                last_snapshot = step;
            }
            Ok(())
        },
    )?;
    let final_step = last_step;
    if last_snapshot != final_step {
        snapshot(&result.u, &result.p, final_step)?;
    }

    // energy series of the run (modified energy defined for SAV schemes)
    let mut energy_csv = String::from("t,original_energy,modified_energy\n");
    for (t, original, modified) in verify::energy_series(&result.records) {
        let modified = if modified.is_finite() {
            format!("{modified:.6e}")
        } else {
            String::new()
        };
        energy_csv.push_str(&format!("{t:.6e},{original:.6e},{modified}\n"));
    }
    write_text(&dir.join("energy.csv"), &energy_csv)?;
    artifacts.push("energy.csv".into());

    // final checkpoint
    let cfg_text = format!(
        "scheme={} case={case_name} grid={} dt={} nu={nu} eps={} beta={} s={} tol={}",
        args.scheme, args.common.grid, args.dt, args.common.eps, args.common.beta,
        args.common.s, args.common.tol
    );
    let state = savns_core::FlowState {
        u: result.u.clone(),
        p: result.p.clone(),
        q: if result.q.is_finite() { result.q } else { 1.0 },
        t: result.t,
        step_index: final_step,
    };
    let sr = args.scheme.is_sequential().then_some(args.common.s);
    let mut ck = fs::File::create(dir.join("checkpoint"))?;
    io::write_checkpoint(&mut ck, &state, io::config_hash(&cfg_text), sr)?;
    artifacts.push("checkpoint".into());

    let manifest = manifest::Manifest::new("simulate", &args.common)
        .case(&case_name)
        .schemes(vec![args.scheme.to_string()])
        .dts(vec![args.dt.clone()])
        .nu(nu)
        .wall(scaled_seconds(args.common.no_timing, start.elapsed().as_secs_f64()))
        .artifacts(artifacts);
    manifest.write(&dir)?;
    println!(
        "simulate {} {case_name}: {} steps to t={}, final div_linf {:.3e}",
        args.scheme,
        final_step,
        result.t,
        result.records.last().map(|r| r.div_linf).unwrap_or(0.0)
    );
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<(), SolverError> {
    let start = Instant::now();
    let dir = out_dir(&args.common)?;
    let case = verify::make_case(parse_case(&args.case)?);
    let dts = parse_list(&args.dts, "dts")?;
    let eps =
        parse_param(&args.common.eps).map_err(|e| SolverError::Config(format!("eps: {e}")))?;

    let reference = match args.error_ref.as_str() {
        "exact" => ErrorReference::Exact,
        "self" => {
            let token = args.ref_dt.as_ref().ok_or_else(|| {
                SolverError::Config("error-ref self needs --ref-dt".into())
            })?;
            ErrorReference::SelfReference {
                param: parse_param(token)
                    .map_err(|e| SolverError::Config(format!("ref-dt: {e}")))?,
            }
        }
        other => {
            return Err(SolverError::Config(format!(
                "error-ref: expected exact|self, got '{other}'"
            )))
        }
    };

    let mut cfg = verify::SweepConfig::new(args.scheme, args.common.grid, dts);
    cfg.eps = eps;
    cfg.beta = args.common.beta;
    cfg.s = args.common.s;
    cfg.solver_tol = args.common.tol;
    cfg.t_end = args.common.t_end;
    cfg.reference = reference;
    cfg.ref_scheme = args.ref_scheme;
    cfg.jobs = args.common.jobs;

    let mut report = verify::run_convergence(&case, &cfg)?;
    if args.common.no_timing {
        strip_timing(&mut report);
    }
    let csv = report.to_csv();
    write_text(&dir.join("report.csv"), &csv)?;
    print!("{csv}");

    let manifest = manifest::Manifest::new("converge", &args.common)
        .case(&args.case)
        .schemes(vec![args.scheme.to_string()])
        .dts(args.dts.split(',').map(str::to_string).collect())
        .nu(case.nu)
        .error_ref(&args.error_ref, args.ref_dt.clone())
        .wall(scaled_seconds(args.common.no_timing, start.elapsed().as_secs_f64()))
        .artifacts(vec!["report.csv".into()]);
    manifest.write(&dir)?;
    Ok(())
}

fn eps_sweep(args: EpsSweepArgs) -> Result<(), SolverError> {
    let start = Instant::now();
    let dir = out_dir(&args.common)?;
    let case = verify::make_case(parse_case(&args.case)?);
    let schemes = parse_schemes(&args.schemes)?;
    let dt_value =
        parse_param(&args.dt).map_err(|e| SolverError::Config(format!("dt: {e}")))?;
    let eps_list = parse_list(&args.eps_list, "eps-list")?;

    let reference = match args.error_ref.as_str() {
        "exact" => ErrorReference::Exact,
        "self" => ErrorReference::SelfReference {
            param: parse_param(&args.ref_eps)
                .map_err(|e| SolverError::Config(format!("ref-eps: {e}")))?,
        },
        other => {
            return Err(SolverError::Config(format!(
                "error-ref: expected exact|self, got '{other}'"
            )))
        }
    };

    let cfg = verify::EpsSweepConfig {
        schemes,
        grid_n: args.common.grid,
        dt: (args.dt.clone(), dt_value),
        eps_list,
        beta: args.common.beta,
        s: args.common.s,
        solver_tol: args.common.tol,
        t_end: args.common.t_end,
        reference,
        jobs: args.common.jobs,
    };
    let reports = verify::run_eps_sweep(&case, &cfg)?;

    let mut artifacts = Vec::new();
    for (scheme, mut report) in reports {
        if args.common.no_timing {
            strip_timing(&mut report);
        }
        let name = format!("report-{scheme}.csv");
        write_text(&dir.join(&name), &report.to_csv())?;
        println!("== {scheme}");
        print!("{}", report.to_csv());
        artifacts.push(name);
    }

    let manifest = manifest::Manifest::new("eps-sweep", &args.common)
        .case(&args.case)
        .schemes(args.schemes.split(',').map(str::to_string).collect())
        .dts(vec![args.dt.clone()])
        .eps_list(args.eps_list.split(',').map(str::to_string).collect())
        .nu(case.nu)
        .error_ref(&args.error_ref, Some(args.ref_eps.clone()))
        .wall(scaled_seconds(args.common.no_timing, start.elapsed().as_secs_f64()))
        .artifacts(artifacts);
    manifest.write(&dir)?;
    Ok(())
}

fn energy(args: EnergyArgs) -> Result<(), SolverError> {
    let start = Instant::now();
    let dir = out_dir(&args.common)?;
    let case = verify::make_case(parse_case(&args.case)?);
    if !case.is_unforced() {
        return Err(SolverError::Config(
            "energy study needs an unforced case (example2)".into(),
        ));
    }
    if args.scheme == SchemeKind::Projection {
        return Err(SolverError::Config(
            "energy study tracks the modified energy of the SAV schemes; \
             scheme: pick psav1|psav2|srsav1|srsav2"
                .into(),
        ));
    }
    let dts = parse_list(&args.dts, "dts")?;
    let eps =
        parse_param(&args.common.eps).map_err(|e| SolverError::Config(format!("eps: {e}")))?;
    let grid = case.grid(args.common.grid)?;

    let mut artifacts = Vec::new();
    for (token, dt) in &dts {
        let spec = verify::RunSpec {
            scheme: args.scheme,
            dt: *dt,
            nu: case.nu,
            eps,
            beta: args.common.beta,
            s: args.common.s,
            solver_tol: args.common.tol,
            t_end: args.common.t_end,
        };
        let (result, _) = verify::run_case(&case, grid, &spec)?;
        let mut csv = String::from("t,original_energy,modified_energy\n");
        for (t, original, modified) in verify::energy_series(&result.records) {
            csv.push_str(&format!("{t:.6e},{original:.6e},{modified:.6e}\n"));
        }
        let name = format!("energy-{}.csv", sanitize(token));
        write_text(&dir.join(&name), &csv)?;
        println!(
            "{}: max |modified - original| {:.6e}",
            name,
            verify::max_energy_gap(&result.records)
        );
        artifacts.push(name);
    }

    let manifest = manifest::Manifest::new("energy", &args.common)
        .case(&args.case)
        .schemes(vec![args.scheme.to_string()])
        .dts(args.dts.split(',').map(str::to_string).collect())
        .nu(case.nu)
        .wall(scaled_seconds(args.common.no_timing, start.elapsed().as_secs_f64()))
        .artifacts(artifacts);
    manifest.write(&dir)?;
    Ok(())
}
