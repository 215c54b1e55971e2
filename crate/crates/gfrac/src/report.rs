//! Machine-readable JSON reports. Reports embed the fully resolved
//! configuration and are byte-identical for identical configuration and
//! seed (no timestamps, fixed field order, sequential assembly).

use std::path::Path;

use serde::Serialize;

use crate::analysis::{CertificateReport, LambdaEstimate};
use crate::energy::MpgReport;
use crate::error::Result;
use crate::grid::GridParams;
use crate::solver::SolverConfig;
use crate::young::ExponentBounds;

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub family: String,
    pub bounds: ExponentBounds,
    pub solver: SolverConfig,
    pub threads: usize,
}

/// Coarse-vs-fine deltas for the quantities a run reports; the profile is
/// interpolated onto the refined grid and re-evaluated.
#[derive(Debug, Clone, Serialize)]
pub struct GridConvergence {
    pub refined: GridParams,
    pub modular_delta: f64,
    pub energy_delta: f64,
    pub closure_max_delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub config: ResolvedConfig,
    pub level: f64,
    pub level_pre_polish: f64,
    pub endpoint: f64,
    pub endpoint_energy: f64,
    pub eta: f64,
    pub eta_ring_min_energy: f64,
    pub ps_history: Vec<f64>,
    pub path_energies: Vec<f64>,
    pub kicks_accepted: usize,
    pub residual_max: f64,
    pub neumann_residual: f64,
    pub newton_grad_max: f64,
    pub fixed_point_converged: bool,
    pub fixed_point_displacement: f64,
    pub certificate: CertificateReport,
    pub grid_convergence: Option<GridConvergence>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub config: ResolvedConfig,
    pub estimate: LambdaEstimate,
    pub threshold_lhs: f64,
    pub threshold_rhs: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub config: ResolvedConfig,
    pub checks: Vec<SuiteCheck>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MpgSection {
    pub mpg: MpgReport,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::error::Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
