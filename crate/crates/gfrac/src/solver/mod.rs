//! The two solution procedures: a discretized mountain-pass deformation
//! for the cone-restricted energy, and the fixed-point scheme built on the
//! convex auxiliary problem
//! `J(v) = ρ(v) + ½∫v² − ∫ |ū|^{p-2}ū v`,
//! whose minimizer solves the linearized-forcing equation; at a critical
//! point the minimizer returns the input, which the fixed-point run
//! certifies.

pub mod newton;

use serde::{Deserialize, Serialize};

use crate::cone::{is_in_k, project_k, ConeSpec};
use crate::energy::{
    cone_spec, energy_gradient, energy_value, mountain_pass_endpoint, mpg_probe, MpgReport,
    ResidualAssembler,
};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::profile::RadialProfile;
use crate::quadrature::NonlocalForm;
use crate::young::{ExponentBounds, YoungFamily};

/// Solver configuration; the defaults are balanced for interior grids of
/// around 64 cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub p: f64,
    pub grid: GridParams,
    #[serde(default = "default_path_nodes")]
    pub path_nodes: usize,
    #[serde(default = "default_deform_steps")]
    pub max_deform_steps: usize,
    #[serde(default = "default_fp_iters")]
    pub max_fixed_point_iters: usize,
    #[serde(default = "default_step_size")]
    pub step_size0: f64,
    #[serde(default = "default_tol_residual")]
    pub tol_residual: f64,
    #[serde(default = "default_tol_fixed_point")]
    pub tol_fixed_point: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_path_nodes() -> usize {
    17
}
fn default_deform_steps() -> usize {
    600
}
fn default_fp_iters() -> usize {
    40
}
fn default_step_size() -> f64 {
    0.1
}
fn default_tol_residual() -> f64 {
    1e-3
}
fn default_tol_fixed_point() -> f64 {
    1e-6
}

impl SolverConfig {
    pub fn new(p: f64, grid: GridParams) -> SolverConfig {
        SolverConfig {
            p,
            grid,
            path_nodes: default_path_nodes(),
            max_deform_steps: default_deform_steps(),
            max_fixed_point_iters: default_fp_iters(),
            step_size0: default_step_size(),
            tol_residual: default_tol_residual(),
            tol_fixed_point: default_tol_fixed_point(),
            seed: 0,
        }
    }

    /// Checks the structural hypothesis `2 <= q⁻ <= q⁺ < p` and the basic
    /// parameter ranges.
    pub fn validate(&self, fam: &YoungFamily) -> Result<ExponentBounds> {
        crate::energy::check_p(self.p)?;
        let bounds = fam.exponent_bounds()?;
        if bounds.q_minus < 2.0 - 1e-9 {
            return Err(Error::Config(format!(
                "growth hypothesis needs q- >= 2, family has q- = {}",
                bounds.q_minus
            )));
        }
        if !(bounds.q_plus < self.p) {
            return Err(Error::Config(format!(
                "growth hypothesis needs q+ < p, family has q+ = {} with p = {}",
                bounds.q_plus, self.p
            )));
        }
        if self.path_nodes < 16 {
            return Err(Error::Config(format!(
                "need at least 16 path nodes, got {}",
                self.path_nodes
            )));
        }
        if !(self.step_size0 > 0.0 && self.tol_residual > 0.0 && self.tol_fixed_point > 0.0) {
            return Err(Error::Config("steps and tolerances must be positive".into()));
        }
        Ok(bounds)
    }
}

/// Result of one auxiliary solve.
#[derive(Debug, Clone)]
pub struct AuxiliaryResult {
    pub profile: RadialProfile,
    pub iterations: usize,
    /// Largest cone violation seen before the final safety projection.
    pub cone_violation: f64,
    pub grad_norm: f64,
}

fn scale_weighted_grad_norm(grad: &[f64], weights: &[f64]) -> f64 {
    grad.iter()
        .zip(weights)
        .map(|(g, w)| g * g / w)
        .sum::<f64>()
        .sqrt()
}

/// Minimize the convex auxiliary functional `J` over interior node values
/// by preconditioned gradient descent with a backtracking (Armijo) line
/// search; spectral trial steps keep the iteration count reasonable, the
/// exterior closure is refreshed after every accepted step. The output is
/// checked against the cone (the continuum minimizer lies in it) and
/// projected if discretization noise pushed it out.
pub fn solve_auxiliary(
    form: &NonlocalForm,
    cfg: &SolverConfig,
    u_bar: &RadialProfile,
    warm_start: Option<&RadialProfile>,
) -> Result<AuxiliaryResult> {
    let grid = form.grid;
    let spec = cone_spec(grid);
    if !is_in_k(&u_bar.interior, &spec) {
        return Err(Error::Config("auxiliary forcing profile must lie in the cone".into()));
    }
    let p = cfg.p;
    let forcing: Vec<f64> = u_bar
        .interior
        .iter()
        .map(|&v| v.abs().powf(p - 2.0) * v)
        .collect();

    let j_value = |v: &RadialProfile| -> Result<f64> {
        let modular = form.modular(v)?.value;
        let l2 = 0.5 * grid.ball_integral(v, |t| t * t);
        let lin: f64 = grid
            .ball_weights
            .iter()
            .zip(v.interior.iter().zip(&forcing))
            .map(|(&w, (&x, &f))| w * x * f)
            .sum();
        Ok(modular + l2 - lin)
    };
    let j_grad = |v: &RadialProfile| -> Result<Vec<f64>> {
        let mut g = form.gradient(v)?;
        g.truncate(grid.interior_len);
        for i in 0..grid.interior_len {
            g[i] += grid.ball_weights[i] * (v.interior[i] - forcing[i]);
        }
        Ok(g)
    };

    let mut v = match warm_start {
        Some(w) => w.clone(),
        None => u_bar.clone(),
    };
    if !v.is_closed() {
        v = grid.neumann_closure(&v, form.fam)?;
    }
    let mut jv = j_value(&v)?;
    let mut grad = j_grad(&v)?;
    let weights = &grid.ball_weights;
    let mut step = cfg.step_size0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    // Nonmonotone Armijo memory: spectral steps are allowed to hop as long
    // as they improve on the recent worst value.
    let mut recent = std::collections::VecDeque::from([jv]);
    let mut iterations = 0;
    const MAX_ITERS: usize = 20_000;

    loop {
        let gnorm = scale_weighted_grad_norm(&grad, weights);
        if gnorm < cfg.tol_fixed_point || iterations >= MAX_ITERS {
            break;
        }
        iterations += 1;
        let dir: Vec<f64> = grad.iter().zip(weights).map(|(g, w)| g / w).collect();
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();

        // Barzilai-Borwein trial step in the weighted metric.
        if let Some((px, pg)) = &prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..grid.interior_len {
                let s = v.interior[i] - px[i];
                let y = (grad[i] - pg[i]) / weights[i];
                ss += weights[i] * s * s;
                sy += weights[i] * s * y;
            }
            if sy > 1e-300 {
                step = (ss / sy).clamp(1e-9, 1e4);
            }
        }
        prev = Some((v.interior.clone(), grad.clone()));

        let reference = recent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut tau = step;
        let mut accepted = false;
        for _ in 0..48 {
            let interior: Vec<f64> = v
                .interior
                .iter()
                .zip(&dir)
                .map(|(x, d)| x - tau * d)
                .collect();
            let trial = grid.neumann_closure(&RadialProfile::new(interior), form.fam)?;
            let jt = j_value(&trial)?;
            if jt <= reference - 1e-4 * tau * slope {
                v = trial;
                jv = jt;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            if gnorm < 1e3 * cfg.tol_fixed_point {
                break;
            }
            return Err(Error::LineSearch(format!(
                "auxiliary solve stalled at iteration {iterations} with gradient norm {gnorm:.3e}"
            )));
        }
        recent.push_back(jv);
        if recent.len() > 8 {
            recent.pop_front();
        }
        grad = j_grad(&v)?;

        // Convexity guard: midpoint of consecutive iterates must not beat
        // the average value.
        if iterations % 64 == 0 {
            if let Some((px, _)) = &prev {
                let mid: Vec<f64> = v
                    .interior
                    .iter()
                    .zip(px.iter())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                let mid = grid.neumann_closure(&RadialProfile::new(mid), form.fam)?;
                let jm = j_value(&mid)?;
                let prev_j = j_value(&grid.neumann_closure(&RadialProfile::new(px.clone()), form.fam)?)?;
                let avg = 0.5 * (jv + prev_j);
                if jm > avg + 1e-8 * (1.0 + avg.abs()) {
                    return Err(Error::NonConvergence(
                        "auxiliary functional failed the numerical convexity guard".into(),
                    ));
                }
            }
        }
    }

    // Cone check: the continuum minimizer is non-negative and
    // non-decreasing; discretization noise may leave tiny violations.
    let mut violation = 0.0f64;
    for (i, &x) in v.interior.iter().enumerate() {
        violation = violation.max(-x);
        if i > 0 {
            violation = violation.max(v.interior[i - 1] - x);
        }
    }
    let grad_norm = scale_weighted_grad_norm(&j_grad(&v)?, weights);
    if violation > spec.tolerance {
        let projected = project_k(&v.interior, &spec)?;
        v = grid.neumann_closure(&RadialProfile::new(projected), form.fam)?;
    }
    Ok(AuxiliaryResult {
        profile: v,
        iterations,
        cone_violation: violation.max(0.0),
        grad_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EscapeKind {
    Collapse,
    Blowup,
}

#[derive(Debug, Clone, Serialize)]
pub struct Escape {
    pub kind: EscapeKind,
    /// Normalized last displacement, the direction the iteration left
    /// along.
    pub direction: Vec<f64>,
}

/// Fixed-point run `u_{k+1} = argmin J(·; u_k)`.
#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub profile: RadialProfile,
    /// Weighted-L² displacements per iteration.
    pub displacements: Vec<f64>,
    pub converged: bool,
    pub escape: Option<Escape>,
}

pub fn fixed_point(
    form: &NonlocalForm,
    cfg: &SolverConfig,
    u0: &RadialProfile,
) -> Result<FixedPointResult> {
    let grid = form.grid;
    let spec = cone_spec(grid);
    if !is_in_k(&u0.interior, &spec) {
        return Err(Error::Config("fixed-point start must lie in the cone".into()));
    }
    let mut u = if u0.is_closed() {
        u0.clone()
    } else {
        grid.neumann_closure(u0, form.fam)?
    };
    let scale = grid.norm_ball(&u.interior).max(1.0);
    let mut displacements = Vec::new();
    for _ in 0..cfg.max_fixed_point_iters {
        let next = solve_auxiliary(form, cfg, &u, Some(&u))?.profile;
        let diff: Vec<f64> = next
            .interior
            .iter()
            .zip(&u.interior)
            .map(|(a, b)| a - b)
            .collect();
        let delta = grid.norm_ball(&diff);
        displacements.push(delta);
        let norm = grid.norm_ball(&next.interior);
        if norm > 1e6 * scale {
            let dirn = normalize(&diff);
            return Ok(FixedPointResult {
                profile: next,
                displacements,
                converged: false,
                escape: Some(Escape {
                    kind: EscapeKind::Blowup,
                    direction: dirn,
                }),
            });
        }
        if norm < 1e-8 * scale && grid.norm_ball(&u0.interior) > 1e-6 {
            let dirn = normalize(&diff);
            return Ok(FixedPointResult {
                profile: next,
                displacements,
                converged: false,
                escape: Some(Escape {
                    kind: EscapeKind::Collapse,
                    direction: dirn,
                }),
            });
        }
        u = next;
        if delta < cfg.tol_fixed_point {
            return Ok(FixedPointResult {
                profile: u,
                displacements,
                converged: true,
                escape: None,
            });
        }
    }
    Ok(FixedPointResult {
        profile: u,
        displacements,
        converged: false,
        escape: None,
    })
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n <= 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

/// Outcome of the deformation run.
#[derive(Debug, Clone)]
pub struct MountainPassResult {
    pub profile: RadialProfile,
    /// Energy of the returned profile.
    pub level: f64,
    /// Energy of the deformation candidate before local refinement.
    pub level_pre_polish: f64,
    /// Projected-gradient norms of the running maximal node.
    pub ps_history: Vec<f64>,
    /// Energies along the final path.
    pub path_energies: Vec<f64>,
    /// Running ceiling (max path energy) per iteration; non-increasing.
    pub ceiling_history: Vec<f64>,
    pub kicks_accepted: usize,
    pub mpg: MpgReport,
    pub endpoint_energy: f64,
    pub fixed_point_converged: bool,
    pub fixed_point_displacement: f64,
    pub newton_grad_max: f64,
    /// Dual-normalized weak residual of the returned profile.
    pub residual_max: f64,
    pub neumann_residual: f64,
}

struct PathState {
    nodes: Vec<RadialProfile>,
    energies: Vec<f64>,
}

impl PathState {
    fn ceiling(&self) -> (usize, f64) {
        let mut idx = 0;
        let mut best = f64::NEG_INFINITY;
        for (j, &e) in self.energies.iter().enumerate() {
            if e > best {
                best = e;
                idx = j;
            }
        }
        (idx, best)
    }
}

/// Deterministic transverse directions used to push a stalled maximal node
/// off a degenerate (constant-like) saddle: the constant family is
/// invariant under the nodal gradient flow, so multiplicative kicks
/// `u ← u·(1 + τ v)` along monotone zero-mean profiles are needed to probe
/// the scaled-path family. Kicks are accepted only when they strictly
/// lower the node energy, so the path ceiling stays monotone.
fn kick_directions(form: &NonlocalForm, seed: u64) -> Vec<Vec<f64>> {
    let grid = form.grid;
    let w_total: f64 = grid.ball_weights.iter().sum();
    let zero_mean = |raw: Vec<f64>| -> Vec<f64> {
        let mean: f64 = grid
            .ball_weights
            .iter()
            .zip(&raw)
            .map(|(&w, &v)| w * v)
            .sum::<f64>()
            / w_total;
        let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let norm = grid.norm_ball(&centered).max(1e-12);
        centered.iter().map(|v| v / norm).collect()
    };
    let mut dirs = Vec::new();
    dirs.push(zero_mean(grid.interior_radii().to_vec()));
    dirs.push(zero_mean(
        grid.interior_radii().iter().map(|r| r * r).collect(),
    ));
    let mut rng = crate::sampling::rng(crate::sampling::sub_seed(seed, 101));
    for _ in 0..2 {
        dirs.push(zero_mean(crate::sampling::random_k_values(
            grid.interior_len,
            &mut rng,
            1.0,
        )));
    }
    dirs
}

/// Discretized mountain-pass deformation. The path starts along the
/// constant segment `t ↦ t·e`, the maximal-energy node (and neighbors)
/// take projected descent steps, nodes are redistributed to equalize
/// energy gaps, and a stalled maximum is probed with the multiplicative
/// kicks above. The converged candidate is refined by a damped Newton
/// solve of the stationarity system and cross-checked with one
/// fixed-point run.
pub fn mountain_pass(form: &NonlocalForm, cfg: &SolverConfig) -> Result<MountainPassResult> {
    cfg.validate(form.fam)?;
    let grid = form.grid;
    let spec = cone_spec(grid);
    let p = cfg.p;
    let mpg = mpg_probe(form, p, cfg.seed)?;
    let e = mountain_pass_endpoint(p);
    let e_profile = RadialProfile::constant(e, grid.interior_len, grid.exterior_len());
    let endpoint_energy = energy_value(form, &e_profile, p)?;

    let segments = cfg.path_nodes - 1;
    let mut path = PathState {
        nodes: (0..=segments)
            .map(|j| {
                let c = e * j as f64 / segments as f64;
                RadialProfile::constant(c, grid.interior_len, grid.exterior_len())
            })
            .collect(),
        energies: Vec::new(),
    };
    path.energies = path
        .nodes
        .iter()
        .map(|u| energy_value(form, u, p))
        .collect::<Result<_>>()?;

    let kicks = kick_directions(form, cfg.seed);
    let kick_scales = [0.02, 0.05, 0.1, 0.2];
    let mut kicks_accepted = 0;
    let mut node_steps = vec![cfg.step_size0; cfg.path_nodes];
    let mut ps_history = Vec::new();
    let mut ceiling_history = Vec::new();

    let descend_node = |path: &mut PathState, j: usize, step: &mut f64| -> Result<bool> {
        if j == 0 || j == segments {
            return Ok(false);
        }
        let u = &path.nodes[j];
        let grad = energy_gradient(form, u, p)?;
        let dir: Vec<f64> = grad[..grid.interior_len]
            .iter()
            .zip(&grid.ball_weights)
            .map(|(g, w)| g / w)
            .collect();
        let mut tau = *step;
        for _ in 0..30 {
            let interior: Vec<f64> = u
                .interior
                .iter()
                .zip(&dir)
                .map(|(x, d)| x - tau * d)
                .collect();
            let projected = project_k(&interior, &spec)?;
            let trial = grid.neumann_closure(&RadialProfile::new(projected), form.fam)?;
            let et = energy_value(form, &trial, p)?;
            if et < path.energies[j] - 1e-14 {
                path.nodes[j] = trial;
                path.energies[j] = et;
                *step = (tau * 1.5).min(10.0);
                return Ok(true);
            }
            tau *= 0.5;
            if tau < 1e-14 {
                break;
            }
        }
        *step = (*step * 0.5).max(1e-12);
        Ok(false)
    };

    for iter in 0..cfg.max_deform_steps {
        let (jmax, ceiling) = path.ceiling();
        ceiling_history.push(ceiling);
        if ceiling < 0.5 * mpg.min_on_ring {
            return Err(Error::PathCollapse(format!(
                "path ceiling {ceiling:.3e} fell below half the η-ring floor {:.3e}; \
                 the mountain-pass geometry check (η = {:.3e}) no longer separates the path from 0",
                mpg.min_on_ring, mpg.eta
            )));
        }

        // Projected-gradient stationarity measure at the maximal node.
        let u = &path.nodes[jmax];
        let grad = energy_gradient(form, u, p)?;
        let dir: Vec<f64> = grad[..grid.interior_len]
            .iter()
            .zip(&grid.ball_weights)
            .map(|(g, w)| g / w)
            .collect();
        let stepped: Vec<f64> = u
            .interior
            .iter()
            .zip(&dir)
            .map(|(x, d)| x - d)
            .collect();
        let projected = project_k(&stepped, &spec)?;
        let pg: Vec<f64> = u
            .interior
            .iter()
            .zip(&projected)
            .map(|(a, b)| a - b)
            .collect();
        let pg_norm = grid.norm_ball(&pg);
        ps_history.push(pg_norm);

        if pg_norm < cfg.tol_residual {
            // Stationary along the flow; probe the transverse kicks before
            // declaring the node a pass.
            let mut kicked = false;
            'outer: for v in &kicks {
                for &tau in &kick_scales {
                    for sign in [1.0, -1.0] {
                        let interior: Vec<f64> = u
                            .interior
                            .iter()
                            .zip(v)
                            .map(|(x, d)| x * (1.0 + sign * tau * d))
                            .collect();
                        let projected = project_k(&interior, &spec)?;
                        let trial =
                            grid.neumann_closure(&RadialProfile::new(projected), form.fam)?;
                        let et = energy_value(form, &trial, p)?;
                        if et < path.energies[jmax] - 1e-10 * (1.0 + ceiling.abs()) {
                            path.nodes[jmax] = trial;
                            path.energies[jmax] = et;
                            kicks_accepted += 1;
                            kicked = true;
                            break 'outer;
                        }
                    }
                }
            }
            if !kicked {
                break;
            }
            continue;
        }

        let mut s = node_steps[jmax];
        descend_node(&mut path, jmax, &mut s)?;
        node_steps[jmax] = s;
        if jmax > 1 {
            let mut s = node_steps[jmax - 1];
            descend_node(&mut path, jmax - 1, &mut s)?;
            node_steps[jmax - 1] = s;
        }
        if jmax + 1 < segments {
            let mut s = node_steps[jmax + 1];
            descend_node(&mut path, jmax + 1, &mut s)?;
            node_steps[jmax + 1] = s;
        }

        // Energy-equalizing reparametrization, rejected if it would raise
        // the ceiling.
        if iter % 5 == 4 {
            if let Some(newpath) = reparametrize(form, cfg, &spec, &path)? {
                let new_ceiling = newpath.ceiling().1;
                if new_ceiling <= ceiling + 1e-12 {
                    path = newpath;
                }
            }
        }
    }

    let (jmax, _) = path.ceiling();
    let candidate = path.nodes[jmax].clone();
    let level_pre_polish = path.energies[jmax];

    let polish = newton::polish(form, &candidate, p, 40)?;
    let polished = if is_in_k(&polish.profile.interior, &spec) {
        polish.profile.clone()
    } else {
        candidate.clone()
    };

    let fp = fixed_point(form, cfg, &polished)?;
    let fp_displacement: f64 = {
        let diff: Vec<f64> = fp
            .profile
            .interior
            .iter()
            .zip(&polished.interior)
            .map(|(a, b)| a - b)
            .collect();
        grid.norm_ball(&diff)
    };
    let profile = if fp.converged && fp_displacement < 10.0 * cfg.tol_residual {
        fp.profile.clone()
    } else {
        polished
    };
    let level = energy_value(form, &profile, p)?;

    let assembler = ResidualAssembler::new(form, p)?;
    let residual_max = assembler.report(form, &profile)?.max_abs;
    let neumann_residual = grid.neumann_residual(&profile, form.fam)?;

    Ok(MountainPassResult {
        profile,
        level,
        level_pre_polish,
        ps_history,
        path_energies: path.energies.clone(),
        ceiling_history,
        kicks_accepted,
        mpg,
        endpoint_energy,
        fixed_point_converged: fp.converged,
        fixed_point_displacement: fp_displacement,
        newton_grad_max: polish.grad_max,
        residual_max,
        neumann_residual,
    })
}

/// Redistribute path nodes so adjacent energy gaps are equal, keeping the
/// endpoints fixed. Interpolation happens along the piecewise-linear path
/// in profile space, then each relocated node is projected and re-closed.
fn reparametrize(
    form: &NonlocalForm,
    cfg: &SolverConfig,
    spec: &ConeSpec,
    path: &PathState,
) -> Result<Option<PathState>> {
    let grid = form.grid;
    let n = path.nodes.len();
    let mut cumvar = vec![0.0; n];
    for j in 1..n {
        cumvar[j] = cumvar[j - 1] + (path.energies[j] - path.energies[j - 1]).abs();
    }
    let total = cumvar[n - 1];
    if total <= 1e-14 {
        return Ok(None);
    }
    let mut nodes = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    nodes.push(path.nodes[0].clone());
    energies.push(path.energies[0]);
    for j in 1..n - 1 {
        let target = total * j as f64 / (n - 1) as f64;
        let seg = cumvar.partition_point(|&c| c < target).clamp(1, n - 1);
        let denom = (cumvar[seg] - cumvar[seg - 1]).max(1e-300);
        let t = (target - cumvar[seg - 1]) / denom;
        let interior: Vec<f64> = path.nodes[seg - 1]
            .interior
            .iter()
            .zip(&path.nodes[seg].interior)
            .map(|(a, b)| a + (b - a) * t)
            .collect();
        let projected = project_k(&interior, spec)?;
        let node = grid.neumann_closure(&RadialProfile::new(projected), form.fam)?;
        let e = energy_value(form, &node, cfg.p)?;
        nodes.push(node);
        energies.push(e);
    }
    nodes.push(path.nodes[n - 1].clone());
    energies.push(path.energies[n - 1]);
    Ok(Some(PathState { nodes, energies }))
}

/// Checks that the only constant solutions are 0 and 1 and reports the
/// cone-restricted energy of the nontrivial one.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantDiagnostics {
    pub residual_zero: f64,
    pub residual_one: f64,
    pub energy_zero: f64,
    pub energy_one: f64,
    /// Closed form (1/2 - 1/p)·ω_N.
    pub i_k_one: f64,
    pub residual_two: f64,
}

pub fn constant_diagnostics(form: &NonlocalForm, p: f64) -> Result<ConstantDiagnostics> {
    crate::energy::check_p(p)?;
    let grid = form.grid;
    let assembler = ResidualAssembler::new(form, p)?;
    let at = |c: f64| -> Result<(f64, f64)> {
        let u = RadialProfile::constant(c, grid.interior_len, grid.exterior_len());
        Ok((
            assembler.report(form, &u)?.max_abs,
            energy_value(form, &u, p)?,
        ))
    };
    let (residual_zero, energy_zero) = at(0.0)?;
    let (residual_one, energy_one) = at(1.0)?;
    let (residual_two, _) = at(2.0)?;
    Ok(ConstantDiagnostics {
        residual_zero,
        residual_one,
        energy_zero,
        energy_one,
        i_k_one: (0.5 - 1.0 / p) * grid.omega_n,
        residual_two,
    })
}
