//! Batch entry points: `verify` (property suites), `solve` (mountain pass
//! plus fixed-point cross-check) and `lambda` (constrained infimum and
//! threshold verdict). All commands read an optional JSON config, accept
//! flag overrides, and write machine-readable reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    estimate_lambda, nonconstancy_certificate, threshold_check, CertificateOptions, LambdaOptions,
};
use crate::energy::{energy_value, radial_sup_bound};
use crate::error::{Error, Result};
use crate::grid::{GridParams, RadialGrid};
use crate::profile::RadialProfile;
use crate::quadrature::NonlocalForm;
use crate::report::{
    GridConvergence, LambdaReport, ResolvedConfig, SolveReport, SuiteCheck, VerifyReport,
    write_json,
};
use crate::sampling;
use crate::solver::{mountain_pass, SolverConfig};
use crate::young::{verify_young_axioms, YoungFamily};

/// Full run configuration: solver fields plus output/reporting options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_grid")]
    pub grid: GridParams,
    #[serde(default = "default_path_nodes")]
    pub path_nodes: usize,
    #[serde(default = "default_deform")]
    pub max_deform_steps: usize,
    #[serde(default = "default_fp")]
    pub max_fixed_point_iters: usize,
    #[serde(default = "default_step")]
    pub step_size0: f64,
    #[serde(default = "default_tol_res")]
    pub tol_residual: f64,
    #[serde(default = "default_tol_fp")]
    pub tol_fixed_point: f64,
    #[serde(default)]
    pub seed: u64,
    /// Known Λ for the certificate's threshold section (otherwise computed
    /// when the family has q⁻ = 2).
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_margin")]
    pub margin_tol: f64,
    #[serde(default = "default_dist")]
    pub dist_tol: f64,
    #[serde(default = "default_true")]
    pub grid_convergence: bool,
    #[serde(default = "default_lambda_starts")]
    pub lambda_starts: usize,
    #[serde(default = "default_lambda_iters")]
    pub lambda_max_iters: usize,
}

fn default_family() -> String {
    "power:2".into()
}
fn default_p() -> f64 {
    4.0
}
fn default_grid() -> GridParams {
    GridParams {
        n: 2,
        s: 0.5,
        m: 32,
        e: 8,
        r_out: 4.0,
        k_ang: 32,
    }
}
fn default_path_nodes() -> usize {
    17
}
fn default_deform() -> usize {
    600
}
fn default_fp() -> usize {
    40
}
fn default_step() -> f64 {
    0.1
}
fn default_tol_res() -> f64 {
    1e-3
}
fn default_tol_fp() -> f64 {
    1e-6
}
fn default_margin() -> f64 {
    1e-3
}
fn default_dist() -> f64 {
    0.1
}
fn default_true() -> bool {
    true
}
fn default_lambda_starts() -> usize {
    5
}
fn default_lambda_iters() -> usize {
    400
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            p: self.p,
            grid: self.grid,
            path_nodes: self.path_nodes,
            max_deform_steps: self.max_deform_steps,
            max_fixed_point_iters: self.max_fixed_point_iters,
            step_size0: self.step_size0,
            tol_residual: self.tol_residual,
            tol_fixed_point: self.tol_fixed_point,
            seed: self.seed,
        }
    }
}

/// Parse `kind:params` family strings: `power:3`, `powerlog:2`,
/// `doublepower:2,3`, `tabulated:<csv path>`.
pub fn parse_family(text: &str) -> Result<YoungFamily> {
    let (kind, params) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("family must look like kind:params, got {text:?}")))?;
    let nums = || -> Result<Vec<f64>> {
        params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad family parameter {p:?}")))
            })
            .collect()
    };
    match kind.trim().to_ascii_lowercase().as_str() {
        "power" => {
            let v = nums()?;
            if v.len() != 1 {
                return Err(Error::Config("power family takes one parameter".into()));
            }
            YoungFamily::power(v[0])
        }
        "powerlog" => {
            let v = nums()?;
            if v.len() != 1 {
                return Err(Error::Config("powerlog family takes one parameter".into()));
            }
            YoungFamily::power_log(v[0])
        }
        "doublepower" => {
            let v = nums()?;
            if v.len() != 2 {
                return Err(Error::Config("doublepower family takes two parameters".into()));
            }
            YoungFamily::double_power(v[0], v[1])
        }
        "tabulated" => YoungFamily::tabulated_from_csv(Path::new(params.trim())),
        other => Err(Error::Config(format!("unknown family kind {other:?}"))),
    }
}

/// Parse `N=2,s=0.5,M=32,E=8,Rout=4,Kang=32` grid strings; omitted keys
/// keep the base values.
pub fn parse_grid(text: &str, base: GridParams) -> Result<GridParams> {
    let mut out = base;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad grid component {part:?}")))?;
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "n" => out.n = value.parse().map_err(|_| Error::Config(format!("bad N {value:?}")))?,
            "s" => out.s = value.parse().map_err(|_| Error::Config(format!("bad s {value:?}")))?,
            "m" => out.m = value.parse().map_err(|_| Error::Config(format!("bad M {value:?}")))?,
            "e" => out.e = value.parse().map_err(|_| Error::Config(format!("bad E {value:?}")))?,
            "rout" | "r_out" => {
                out.r_out = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad Rout {value:?}")))?
            }
            "kang" | "k_ang" => {
                out.k_ang = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad Kang {value:?}")))?
            }
            other => return Err(Error::Config(format!("unknown grid key {other:?}"))),
        }
    }
    Ok(out)
}

/// Parallelism cap from the environment; execution is sequential with a
/// fixed reduction order, so the cap is always honored.
pub fn thread_cap() -> usize {
    std::env::var("SOLVER_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}

fn resolved_config(fam: &YoungFamily, cfg: &SolverConfig) -> Result<ResolvedConfig> {
    Ok(ResolvedConfig {
        family: fam.tag(),
        bounds: fam.exponent_bounds()?,
        solver: cfg.clone(),
        threads: thread_cap(),
    })
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("output directory {}: {e}", out.display())))
}

/// Interpolate a profile onto the refined grid and re-evaluate the
/// quantities a report carries.
fn grid_convergence(
    fam: &YoungFamily,
    cfg: &SolverConfig,
    coarse: &RadialGrid,
    u: &RadialProfile,
) -> Result<GridConvergence> {
    let refined_params = cfg.grid.refined();
    let fine = RadialGrid::build(refined_params)?;
    let ri = coarse.interior_radii();
    let re = coarse.exterior_radii();
    let interior: Vec<f64> = fine
        .interior_radii()
        .iter()
        .map(|&r| u.eval(ri, re, r))
        .collect();
    let uf = fine.neumann_closure(&RadialProfile::new(interior), fam)?;
    let form_c = NonlocalForm::new(coarse, fam)?;
    let form_f = NonlocalForm::new(&fine, fam)?;
    let modular_delta =
        (form_f.modular(&uf)?.value - form_c.modular(u)?.value).abs();
    let energy_delta =
        (energy_value(&form_f, &uf, cfg.p)? - energy_value(&form_c, u, cfg.p)?).abs();
    // Closure difference sampled at the shared outermost node.
    let uc_last = *u.exterior.as_ref().unwrap().last().unwrap();
    let uf_last = *uf.exterior.as_ref().unwrap().last().unwrap();
    Ok(GridConvergence {
        refined: refined_params,
        modular_delta,
        energy_delta,
        closure_max_delta: (uc_last - uf_last).abs(),
    })
}

/// `solve`: mountain pass, fixed-point cross-check, certificate, reports.
pub fn cmd_solve(run: &RunConfig, out: &Path) -> Result<i32> {
    ensure_out_dir(out)?;
    let fam = parse_family(&run.family)?;
    let cfg = run.solver_config();
    cfg.validate(&fam)?;
    let grid = RadialGrid::build(cfg.grid)?;
    let form = NonlocalForm::new(&grid, &fam)?;

    let result = mountain_pass(&form, &cfg)?;

    let lambda = match run.lambda {
        Some(l) => Some(l),
        None if (form.bounds.q_minus - 2.0).abs() < 1e-9 => {
            let opts = LambdaOptions {
                starts: run.lambda_starts,
                max_iters: run.lambda_max_iters,
                step_tol: 1e-8,
                seed: run.seed,
            };
            Some(estimate_lambda(&form, &opts)?.value)
        }
        None => None,
    };
    let certificate = nonconstancy_certificate(
        &form,
        &result,
        cfg.p,
        &CertificateOptions {
            margin_tol: run.margin_tol,
            dist_tol: run.dist_tol,
            lambda,
        },
    )?;

    let convergence = if run.grid_convergence {
        Some(grid_convergence(&fam, &cfg, &grid, &result.profile)?)
    } else {
        None
    };

    let report = SolveReport {
        config: resolved_config(&fam, &cfg)?,
        level: result.level,
        level_pre_polish: result.level_pre_polish,
        endpoint: result.mpg.e,
        endpoint_energy: result.endpoint_energy,
        eta: result.mpg.eta,
        eta_ring_min_energy: result.mpg.min_on_ring,
        ps_history: result.ps_history.clone(),
        path_energies: result.path_energies.clone(),
        kicks_accepted: result.kicks_accepted,
        residual_max: result.residual_max,
        neumann_residual: result.neumann_residual,
        newton_grad_max: result.newton_grad_max,
        fixed_point_converged: result.fixed_point_converged,
        fixed_point_displacement: result.fixed_point_displacement,
        certificate,
        grid_convergence: convergence,
    };
    write_json(&out.join("solve_report.json"), &report)?;
    result
        .profile
        .save_csv(&out.join("profile.csv"), grid.interior_radii(), grid.exterior_radii())?;

    let ok = result.residual_max < cfg.tol_residual && result.neumann_residual < 1e-6;
    Ok(if ok { 0 } else { 1 })
}

/// `lambda`: constrained infimum plus the threshold verdict.
pub fn cmd_lambda(run: &RunConfig, out: &Path) -> Result<i32> {
    ensure_out_dir(out)?;
    let fam = parse_family(&run.family)?;
    let cfg = run.solver_config();
    crate::energy::check_p(run.p)?;
    let grid = RadialGrid::build(cfg.grid)?;
    let form = NonlocalForm::new(&grid, &fam)?;
    let opts = LambdaOptions {
        starts: run.lambda_starts,
        max_iters: run.lambda_max_iters,
        step_tol: 1e-8,
        seed: run.seed,
    };
    let estimate = estimate_lambda(&form, &opts)?;
    let verdict = threshold_check(run.p, form.bounds.q_plus, estimate.value)?;
    let lhs = (run.p / 2.0).powf((form.bounds.q_plus - 2.0) / (run.p - 2.0)) * estimate.value;
    estimate.certificate.save_csv(
        &out.join("lambda_certificate.csv"),
        grid.interior_radii(),
        grid.exterior_radii(),
    )?;
    let report = LambdaReport {
        config: resolved_config(&fam, &cfg)?,
        estimate,
        threshold_lhs: lhs,
        threshold_rhs: run.p - 2.0,
        verdict,
    };
    write_json(&out.join("lambda_report.json"), &report)?;
    Ok(0)
}

/// `verify`: property suites with an itemized JSON summary.
pub fn cmd_verify(suite: &str, run: &RunConfig, out: &Path) -> Result<i32> {
    ensure_out_dir(out)?;
    let fam = parse_family(&run.family)?;
    let cfg = run.solver_config();
    let mut checks = Vec::new();
    match suite {
        "young" => suite_young(&fam, run.seed, &mut checks)?,
        "grid" => suite_grid(&fam, &cfg, run.seed, &mut checks)?,
        "modular" => suite_modular(&fam, &cfg, run.seed, &mut checks)?,
        "cone" => suite_cone(run.seed, &mut checks)?,
        "radial" => suite_radial(&cfg, run.seed, &mut checks)?,
        "all" => {
            suite_young(&fam, run.seed, &mut checks)?;
            suite_grid(&fam, &cfg, run.seed, &mut checks)?;
            suite_modular(&fam, &cfg, run.seed, &mut checks)?;
            suite_cone(run.seed, &mut checks)?;
            suite_radial(&cfg, run.seed, &mut checks)?;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown suite {other:?}; available: young, grid, modular, cone, radial, all"
            )))
        }
    }
    let all_passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let report = VerifyReport {
        suite: suite.to_string(),
        config: resolved_config(&fam, &cfg)?,
        checks,
        all_passed,
    };
    write_json(&out.join(format!("verify_{suite}.json")), &report)?;
    Ok(if all_passed { 0 } else { 1 })
}

fn push(checks: &mut Vec<SuiteCheck>, name: &str, passed: bool, detail: String) {
    checks.push(SuiteCheck {
        name: name.to_string(),
        passed,
        detail,
    });
}

fn suite_young(fam: &YoungFamily, seed: u64, checks: &mut Vec<SuiteCheck>) -> Result<()> {
    let report = verify_young_axioms(fam, 10_000, seed)?;
    for p in &report.properties {
        push(
            checks,
            &format!("young/{}", p.name),
            p.passed,
            format!("worst margin {:.2e}", p.worst_margin),
        );
    }
    for w in &report.warnings {
        push(checks, "young/warning", true, w.clone());
    }
    Ok(())
}

fn suite_grid(
    fam: &YoungFamily,
    cfg: &SolverConfig,
    seed: u64,
    checks: &mut Vec<SuiteCheck>,
) -> Result<()> {
    let grid = RadialGrid::build(cfg.grid)?;
    let volume: f64 = grid.ball_weights.iter().sum();
    let rel = (volume - grid.omega_n).abs() / grid.omega_n;
    push(
        checks,
        "grid/volume-consistency",
        rel < 1e-6,
        format!("Σw = {volume:.12}, ω_N = {:.12}, rel {rel:.2e}", grid.omega_n),
    );
    let mut rng = sampling::rng(seed);
    let mut bracket_ok = true;
    let mut monotone_ok = true;
    for _ in 0..20 {
        let u = sampling::random_k_profile(&grid, fam, &mut rng, 1.0)?;
        let ext = u.exterior.as_ref().unwrap();
        let lo = u.interior.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = u.interior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        bracket_ok &= ext.iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9);
        monotone_ok &= ext.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    }
    push(checks, "grid/closure-bracketed", bracket_ok, "exterior within interior range".into());
    push(checks, "grid/closure-monotone", monotone_ok, "exterior non-decreasing".into());
    let u = sampling::random_k_profile(&grid, fam, &mut rng, 1.0)?;
    let closed_twice = grid.neumann_closure(&u, fam)?;
    let idem = u
        .exterior
        .as_ref()
        .unwrap()
        .iter()
        .zip(closed_twice.exterior.as_ref().unwrap())
        .all(|(a, b)| (a - b).abs() < 1e-10);
    push(checks, "grid/closure-idempotent", idem, "re-closing is a no-op".into());
    let residual = grid.neumann_residual(&u, fam)?;
    push(
        checks,
        "grid/neumann-residual",
        residual < 1e-8,
        format!("max |F| = {residual:.2e}"),
    );
    Ok(())
}

fn suite_modular(
    fam: &YoungFamily,
    cfg: &SolverConfig,
    seed: u64,
    checks: &mut Vec<SuiteCheck>,
) -> Result<()> {
    let grid = RadialGrid::build(cfg.grid)?;
    let form = NonlocalForm::new(&grid, fam)?;
    let mut rng = sampling::rng(seed);
    let mut worst_sigma = 0.0f64;
    for _ in 0..5 {
        let u = sampling::random_k_profile(&grid, fam, &mut rng, 1.0)?;
        let det = form.modular(&u)?;
        let (mc, se) = form.monte_carlo(&u, 50_000, sampling::sub_seed(seed, 7))?;
        if se > 0.0 {
            worst_sigma = worst_sigma.max(((det.value - mc).abs() - det.tail_bound).max(0.0) / se);
        }
    }
    push(
        checks,
        "modular/monte-carlo-3sigma",
        worst_sigma <= 3.0,
        format!("worst deviation {worst_sigma:.2} σ"),
    );
    let u = sampling::random_k_profile(&grid, fam, &mut rng, 1.0)?;
    let lux = form.luxemburg(&u)?;
    let rho = form.modular(&u)?.value;
    let lo = crate::young::xi_minus(lux.value, form.bounds);
    let hi = crate::young::xi_plus(lux.value, form.bounds);
    push(
        checks,
        "modular/luxemburg-sandwich",
        lo <= rho * (1.0 + 1e-7) && rho <= hi * (1.0 + 1e-7),
        format!("ξ−([u]) = {lo:.6}, ρ = {rho:.6}, ξ+([u]) = {hi:.6}"),
    );
    Ok(())
}

fn suite_cone(seed: u64, checks: &mut Vec<SuiteCheck>) -> Result<()> {
    use crate::cone::{is_in_k, project_k, project_sigma, ConeSpec};
    let spec = ConeSpec::new(vec![1.0; 3])?;
    let a = project_k(&[3.0, 1.0, 2.0], &spec)?;
    push(
        checks,
        "cone/pooled-example",
        a == vec![2.0, 2.0, 2.0],
        format!("project_k([3,1,2]) = {a:?}"),
    );
    let b = project_k(&[-1.0, 0.0, 1.0], &spec)?;
    push(
        checks,
        "cone/clipped-example",
        b == vec![0.0, 0.0, 1.0],
        format!("project_k([-1,0,1]) = {b:?}"),
    );
    let mut rng = sampling::rng(seed);
    use rand::Rng;
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let spec = ConeSpec::new(weights)?;
        let p = project_k(&values, &spec)?;
        ok &= is_in_k(&p, &spec);
        let pp = project_k(&p, &spec)?;
        ok &= p.iter().zip(&pp).all(|(a, b)| (a - b).abs() < 1e-12);
        if values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min)
            > 1e-3
        {
            if let Ok(sp) = project_sigma(&values, &spec, 100_000) {
                ok &= spec.mean_functional(&sp.values).abs() < 1e-8;
                ok &= (spec.norm(&sp.values) - 1.0).abs() < 1e-8;
            }
        }
    }
    push(checks, "cone/random-feasibility", ok, "200 random instances".into());
    Ok(())
}

fn suite_radial(cfg: &SolverConfig, seed: u64, checks: &mut Vec<SuiteCheck>) -> Result<()> {
    for n in [2u32, 3] {
        let grid = RadialGrid::build(GridParams { n, ..cfg.grid })?;
        let fam = YoungFamily::power(2.0)?;
        let mut rng = sampling::rng(sampling::sub_seed(seed, n as u64));
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for _ in 0..100 {
            let u = sampling::random_k_profile(&grid, &fam, &mut rng, 1.0)?;
            let rep = radial_sup_bound(&grid, &u)?;
            ok &= rep.satisfied;
            worst = worst.min(rep.bound_from_l2 - rep.sup_norm);
        }
        push(
            checks,
            &format!("radial/sup-bound-n{n}"),
            ok,
            format!("min slack {worst:.3e}"),
        );
    }
    Ok(())
}

/// Deterministic small-grid solve used by the browser demo and smoke
/// tests; returns the node radii, the solved profile and its report.
pub fn demo_solve(
    family: &str,
    p: f64,
    s: f64,
    m: usize,
) -> Result<(Vec<f64>, Vec<f64>, SolveReport)> {
    let mut run = RunConfig::default();
    run.family = family.to_string();
    run.p = p;
    run.grid = GridParams {
        n: 2,
        s: s.clamp(0.05, 0.95),
        m: m.clamp(8, 48),
        e: 6,
        r_out: 3.0,
        k_ang: 16,
    };
    run.max_deform_steps = 200;
    run.grid_convergence = false;
    let fam = parse_family(&run.family)?;
    let cfg = run.solver_config();
    cfg.validate(&fam)?;
    let grid = RadialGrid::build(cfg.grid)?;
    let form = NonlocalForm::new(&grid, &fam)?;
    let result = mountain_pass(&form, &cfg)?;
    let certificate =
        nonconstancy_certificate(&form, &result, cfg.p, &CertificateOptions::default())?;
    let mut radii = grid.interior_radii().to_vec();
    radii.extend_from_slice(grid.exterior_radii());
    let mut values = result.profile.interior.clone();
    values.extend_from_slice(result.profile.exterior.as_ref().unwrap());
    let report = SolveReport {
        config: resolved_config(&fam, &cfg)?,
        level: result.level,
        level_pre_polish: result.level_pre_polish,
        endpoint: result.mpg.e,
        endpoint_energy: result.endpoint_energy,
        eta: result.mpg.eta,
        eta_ring_min_energy: result.mpg.min_on_ring,
        ps_history: result.ps_history.clone(),
        path_energies: result.path_energies.clone(),
        kicks_accepted: result.kicks_accepted,
        residual_max: result.residual_max,
        neumann_residual: result.neumann_residual,
        newton_grad_max: result.newton_grad_max,
        fixed_point_converged: result.fixed_point_converged,
        fixed_point_displacement: result.fixed_point_displacement,
        certificate,
        grid_convergence: None,
    };
    Ok((radii, values, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_parsing() {
        assert!(parse_family("power:3").is_ok());
        assert!(parse_family("powerlog:2").is_ok());
        assert!(parse_family("doublepower:2,3").is_ok());
        assert!(parse_family("power").is_err());
        assert!(parse_family("power:abc").is_err());
        assert!(parse_family("nope:1").is_err());
        assert!(parse_family("doublepower:3,2").is_err());
    }

    #[test]
    fn grid_parsing() {
        let base = default_grid();
        let g = parse_grid("N=3,s=0.25,M=48,E=12,Rout=5,Kang=24", base).unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.m, 48);
        assert_eq!(g.e, 12);
        assert_eq!(g.k_ang, 24);
        assert!((g.s - 0.25).abs() < 1e-15);
        assert!((g.r_out - 5.0).abs() < 1e-15);
        // Partial override keeps the rest.
        let g = parse_grid("M=64", base).unwrap();
        assert_eq!(g.m, 64);
        assert_eq!(g.n, base.n);
        assert!(parse_grid("M=", base).is_err());
        assert!(parse_grid("bogus=3", base).is_err());
    }

    #[test]
    fn config_defaults_and_file() {
        let run = RunConfig::default();
        assert_eq!(run.family, "power:2");
        assert_eq!(run.p, 4.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"family": "power:3", "p": 5.0, "seed": 9}"#).unwrap();
        let run = RunConfig::from_file(&path).unwrap();
        assert_eq!(run.family, "power:3");
        assert_eq!(run.p, 5.0);
        assert_eq!(run.seed, 9);
        assert!(RunConfig::from_file(&dir.path().join("missing.json")).is_err());
    }
}
