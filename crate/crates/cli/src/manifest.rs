//! The `run.json` manifest: every artifact directory is reproducible from
//! the manifest alone (flags, parameters, tool version).

use crate::CommonArgs;
use savns_core::error::{Result, SolverError};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
pub struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    case: Option<String>,
    schemes: Vec<String>,
    grid: usize,
    dts: Vec<String>,
    eps: String,
    eps_list: Vec<String>,
    beta: f64,
    s: usize,
    nu: f64,
    t_end: f64,
    tol: f64,
    error_ref: Option<String>,
    ref_param: Option<String>,
    jobs: usize,
    no_timing: bool,
    wall_seconds: f64,
    artifacts: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, common: &CommonArgs) -> Self {
        Manifest {
            tool: "savns",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            case: None,
            schemes: Vec::new(),
            grid: common.grid,
            dts: Vec::new(),
            eps: common.eps.clone(),
            eps_list: Vec::new(),
            beta: common.beta,
            s: common.s,
            nu: f64::NAN,
            t_end: common.t_end,
            tol: common.tol,
            error_ref: None,
            ref_param: None,
            jobs: common.jobs,
            no_timing: common.no_timing,
            wall_seconds: 0.0,
            artifacts: Vec::new(),
        }
    }

    pub fn case(mut self, case: &str) -> Self {
        self.case = Some(case.to_string());
        self
    }

    pub fn schemes(mut self, schemes: Vec<String>) -> Self {
        self.schemes = schemes;
        self
    }

    pub fn dts(mut self, dts: Vec<String>) -> Self {
        self.dts = dts;
        self
    }

    pub fn eps_list(mut self, eps_list: Vec<String>) -> Self {
        self.eps_list = eps_list;
        self
    }

    pub fn nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn error_ref(mut self, kind: &str, param: Option<String>) -> Self {
        self.error_ref = Some(kind.to_string());
        self.ref_param = param;
        self
    }

    pub fn wall(mut self, seconds: f64) -> Self {
        self.wall_seconds = seconds;
        self
    }

    pub fn artifacts(mut self, artifacts: Vec<String>) -> Self {
        self.artifacts = artifacts;
        self
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| SolverError::Parse(format!("manifest serialization: {e}")))?;
        std::fs::write(dir.join("run.json"), text + "\n")?;
        Ok(())
    }
}
