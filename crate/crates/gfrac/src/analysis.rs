//! Nonconstancy machinery: the constrained infimum
//! `Λ = inf { 2·ρ(v) : v non-decreasing, zero mean, unit L² norm }`,
//! the threshold inequality `(p/2)^{(q⁺-2)/(p-2)} Λ < p-2`, the scaled-path
//! function `h(τ)` with its second-order closed forms, and the certificate
//! comparing a mountain-pass level against the constant-solution energy.

use serde::Serialize;

use crate::cone::{project_sigma, ConeSpec};
use crate::energy::{cone_spec, distance_to_constant};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::profile::RadialProfile;
use crate::quadrature::NonlocalForm;
use crate::sampling;
use crate::solver::MountainPassResult;

/// Options for the Λ minimization.
#[derive(Debug, Clone)]
pub struct LambdaOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub seed: u64,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        LambdaOptions {
            starts: 5,
            max_iters: 400,
            step_tol: 1e-8,
            seed: 0,
        }
    }
}

/// Result of the Λ minimization. `value` uses Neumann-closed exterior
/// values, which for this discretization is exactly the extension that
/// minimizes the modular; `interior_only_value` drops the
/// interior↔exterior coupling entirely and lower-bounds any extension.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaEstimate {
    pub value: f64,
    pub interior_only_value: f64,
    pub tail_bound: f64,
    #[serde(skip)]
    pub certificate: RadialProfile,
    pub grid_tag: GridParams,
    /// Final objective of every start (NaN for failed starts).
    pub per_start: Vec<f64>,
    pub feasibility_mean: f64,
    pub feasibility_norm: f64,
}

fn sigma_spec(grid: &crate::grid::RadialGrid) -> ConeSpec {
    cone_spec(grid).with_tolerance(1e-9)
}

/// Minimize `2ρ` over the Σ constraint set by projected gradient descent
/// with multi-start. Candidate profiles are Neumann-closed after every
/// projection so the exterior always carries its modular-minimizing
/// values.
pub fn estimate_lambda(form: &NonlocalForm, opts: &LambdaOptions) -> Result<LambdaEstimate> {
    let grid = form.grid;
    let spec = sigma_spec(grid);
    let close = |interior: Vec<f64>| -> Result<RadialProfile> {
        grid.neumann_closure(&RadialProfile::new(interior), form.fam)
    };
    let objective = |u: &RadialProfile| -> Result<f64> { Ok(2.0 * form.modular(u)?.value) };

    let mut per_start = Vec::new();
    let mut best: Option<(f64, RadialProfile)> = None;
    for start_idx in 0..opts.starts {
        let init_interior: Vec<f64> = if start_idx == 0 {
            grid.interior_radii().to_vec()
        } else {
            let mut rng = sampling::rng(sampling::sub_seed(opts.seed, start_idx as u64));
            sampling::random_monotone_zero_mean(grid, &mut rng)
        };
        let run = || -> Result<(f64, RadialProfile)> {
            let mut v = project_sigma(&init_interior, &spec, 100_000)?.values;
            let mut u = close(v.clone())?;
            let mut f = objective(&u)?;
            let mut step = 0.1;
            let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
            for _ in 0..opts.max_iters {
                let mut g = form.gradient(&u)?;
                g.truncate(grid.interior_len);
                for x in g.iter_mut() {
                    *x *= 2.0;
                }
                let dir: Vec<f64> = g
                    .iter()
                    .zip(&grid.ball_weights)
                    .map(|(x, w)| x / w)
                    .collect();
                if let Some((pv, pg)) = &prev {
                    let mut ss = 0.0;
                    let mut sy = 0.0;
                    for i in 0..grid.interior_len {
                        let s = v[i] - pv[i];
                        let y = (g[i] - pg[i]) / grid.ball_weights[i];
                        ss += grid.ball_weights[i] * s * s;
                        sy += grid.ball_weights[i] * s * y;
                    }
                    if sy > 1e-300 {
                        step = (ss / sy).clamp(1e-8, 1e3);
                    }
                }
                prev = Some((v.clone(), g.clone()));
                let mut tau = step;
                let mut moved = false;
                for _ in 0..40 {
                    let trial_raw: Vec<f64> = v
                        .iter()
                        .zip(&dir)
                        .map(|(x, d)| x - tau * d)
                        .collect();
                    let projected = match project_sigma(&trial_raw, &spec, 100_000) {
                        Ok(pr) => pr.values,
                        Err(_) => {
                            tau *= 0.5;
                            continue;
                        }
                    };
                    let trial = close(projected.clone())?;
                    let ft = objective(&trial)?;
                    if ft < f {
                        let delta: f64 = projected
                            .iter()
                            .zip(&v)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt();
                        v = projected;
                        u = trial;
                        f = ft;
                        moved = true;
                        if delta < opts.step_tol {
                            return Ok((f, u));
                        }
                        break;
                    }
                    tau *= 0.5;
                }
                if !moved {
                    return Ok((f, u));
                }
            }
            Ok((f, u))
        };
        match run() {
            Ok((f, u)) => {
                per_start.push(f);
                if best.as_ref().map_or(true, |(b, _)| f < *b) {
                    best = Some((f, u));
                }
            }
            Err(_) => per_start.push(f64::NAN),
        }
    }
    let (value, certificate) = best.ok_or_else(|| {
        Error::NonConvergence("all Λ minimization starts failed to produce a feasible profile".into())
    })?;

    let interior_only_value = 2.0 * modular_interior_only(form, &certificate)?;
    let tail_bound = 2.0 * form.tail_bound(certificate.oscillation());
    let feasibility_mean = spec.mean_functional(&certificate.interior);
    let feasibility_norm = spec.norm(&certificate.interior);
    Ok(LambdaEstimate {
        value,
        interior_only_value,
        tail_bound,
        certificate,
        grid_tag: grid.params,
        per_start,
        feasibility_mean,
        feasibility_norm,
    })
}

/// Modular restricted to interior×interior pairs; a lower bound for the
/// modular under any exterior extension.
fn modular_interior_only(form: &NonlocalForm, u: &RadialProfile) -> Result<f64> {
    let grid = form.grid;
    let full = form.modular(u)?.value;
    // Subtract the interior↔exterior coupling, which is exactly the part
    // of the pair sum involving an exterior node.
    let mut coupling = 0.0;
    for i in 0..grid.interior_len {
        for j in grid.interior_len..grid.len() {
            let pm = grid.pair_mass(i, j);
            if pm == 0.0 {
                continue;
            }
            let diff = u.value(i) - u.value(j);
            if diff == 0.0 {
                continue;
            }
            coupling += grid.gamma_nm1
                * pm
                * grid.pair_kernel(form.fam, i, j, diff.abs(), crate::grid::KernelMode::Value);
        }
    }
    Ok(full - coupling)
}

/// `(p/2)^{(q⁺-2)/(p-2)} Λ < p - 2`.
pub fn threshold_check(p: f64, q_plus: f64, lambda: f64) -> Result<bool> {
    if !(p > 2.0) {
        return Err(Error::Config(format!("threshold needs p > 2, got {p}")));
    }
    if !(q_plus >= 2.0) {
        return Err(Error::Config(format!("threshold needs q+ >= 2, got {q_plus}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Config(format!("threshold needs Λ >= 0, got {lambda}")));
    }
    Ok((p / 2.0).powf((q_plus - 2.0) / (p - 2.0)) * lambda < p - 2.0)
}

/// Tabulated scaled-path function
/// `h(τ) = (2 r^{q⁺} |τ|^{q⁻} ρ(v) + r² ∫|1+τv|²)^p − ω^{p-2} (r^p ∫|1+τv|^p)²`
/// with finite-difference derivatives at zero and the applicable
/// closed-form second derivative.
#[derive(Debug, Clone, Serialize)]
pub struct HFamilyReport {
    pub tau: Vec<f64>,
    pub h: Vec<f64>,
    pub h_at_zero: f64,
    pub h_prime_0_fd: f64,
    pub h_second_0_fd: f64,
    /// Closed form for q⁻ > 2: `2p(p-2) r^{2p} ω^{p-2} ((∫v)² − ω∫v²)`.
    pub h_second_0_closed_general: Option<f64>,
    /// Closed form for q⁻ = 2 with Σ-feasible v:
    /// `2p r^{2p} ω^{p-1} (2 r^{q⁺-2} ρ(v) − (p−2))`.
    pub h_second_0_closed_sigma: Option<f64>,
    pub rho_v: f64,
}

pub fn h_family(
    form: &NonlocalForm,
    v: &RadialProfile,
    p: f64,
    r: f64,
    tau_grid: &[f64],
) -> Result<HFamilyReport> {
    crate::energy::check_p(p)?;
    if !(r > 1.0) {
        return Err(Error::Config(format!("path radius must satisfy r > 1, got {r}")));
    }
    let grid = form.grid;
    let sup_v = v.interior.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    for &tau in tau_grid {
        if tau.abs() * sup_v >= 1.0 {
            return Err(Error::Config(format!(
                "tau = {tau} violates |tau|·sup|v| < 1 (sup|v| = {sup_v})"
            )));
        }
    }
    let rho_v = form.modular(v)?.value;
    let bounds = form.bounds;
    let omega = grid.omega_n;
    let h = |tau: f64| -> f64 {
        let l2: f64 = grid
            .ball_weights
            .iter()
            .zip(&v.interior)
            .map(|(&w, &x)| {
                let y = 1.0 + tau * x;
                w * y * y
            })
            .sum();
        let lp: f64 = grid
            .ball_weights
            .iter()
            .zip(&v.interior)
            .map(|(&w, &x)| w * (1.0 + tau * x).abs().powf(p))
            .sum();
        let head = 2.0 * r.powf(bounds.q_plus) * tau.abs().powf(bounds.q_minus) * rho_v
            + r * r * l2;
        head.powf(p) - omega.powf(p - 2.0) * (r.powf(p) * lp).powi(2)
    };

    let table: Vec<f64> = tau_grid.iter().map(|&t| h(t)).collect();
    let h_at_zero = h(0.0);

    let dt = 1e-3;
    let h_prime_0_fd = (h(dt) - h(-dt)) / (2.0 * dt);
    let second = |d: f64| (h(d) - 2.0 * h_at_zero + h(-d)) / (d * d);
    let h_second_0_fd = (4.0 * second(dt / 2.0) - second(dt)) / 3.0;

    let int_v: f64 = grid
        .ball_weights
        .iter()
        .zip(&v.interior)
        .map(|(&w, &x)| w * x)
        .sum();
    let int_v2: f64 = grid
        .ball_weights
        .iter()
        .zip(&v.interior)
        .map(|(&w, &x)| w * x * x)
        .sum();
    let h_second_0_closed_general = if bounds.q_minus > 2.0 {
        Some(
            2.0 * p * (p - 2.0) * r.powf(2.0 * p) * omega.powf(p - 2.0)
                * (int_v * int_v - omega * int_v2),
        )
    } else {
        None
    };
    let sigma_feasible = int_v.abs() < 1e-6 && (int_v2 - 1.0).abs() < 1e-6;
    let h_second_0_closed_sigma = if (bounds.q_minus - 2.0).abs() < 1e-12 && sigma_feasible {
        Some(
            2.0 * p
                * r.powf(2.0 * p)
                * omega.powf(p - 1.0)
                * (2.0 * r.powf(bounds.q_plus - 2.0) * rho_v - (p - 2.0)),
        )
    } else {
        None
    };

    Ok(HFamilyReport {
        tau: tau_grid.to_vec(),
        h: table,
        h_at_zero,
        h_prime_0_fd,
        h_second_0_fd,
        h_second_0_closed_general,
        h_second_0_closed_sigma,
        rho_v,
    })
}

/// Threshold sub-report of the certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Nonconstancy certificate for a computed critical point: affirmative
/// when the level is below the constant-solution energy by more than the
/// margin and the profile is far from both constants.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub level: f64,
    pub i_k_one: f64,
    pub gap: f64,
    pub distance_from_zero: f64,
    pub distance_from_one: f64,
    pub margin_tol: f64,
    pub dist_tol: f64,
    pub affirmative: bool,
    pub threshold: Option<ThresholdReport>,
}

pub struct CertificateOptions {
    pub margin_tol: f64,
    pub dist_tol: f64,
    /// Λ estimate, consulted only when q⁻ = 2.
    pub lambda: Option<f64>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            margin_tol: 1e-3,
            dist_tol: 0.1,
            lambda: None,
        }
    }
}

pub fn nonconstancy_certificate(
    form: &NonlocalForm,
    result: &MountainPassResult,
    p: f64,
    opts: &CertificateOptions,
) -> Result<CertificateReport> {
    crate::energy::check_p(p)?;
    let grid = form.grid;
    let i_k_one = (0.5 - 1.0 / p) * grid.omega_n;
    let gap = i_k_one - result.level;
    let distance_from_zero = distance_to_constant(grid, &result.profile, 0.0);
    let distance_from_one = distance_to_constant(grid, &result.profile, 1.0);
    let threshold = match opts.lambda {
        Some(lambda) if (form.bounds.q_minus - 2.0).abs() < 1e-9 => {
            let lhs = (p / 2.0).powf((form.bounds.q_plus - 2.0) / (p - 2.0)) * lambda;
            Some(ThresholdReport {
                lambda,
                lhs,
                rhs: p - 2.0,
                holds: threshold_check(p, form.bounds.q_plus, lambda)?,
            })
        }
        _ => None,
    };
    let affirmative = gap > opts.margin_tol
        && distance_from_zero > opts.dist_tol
        && distance_from_one > opts.dist_tol;
    Ok(CertificateReport {
        level: result.level,
        i_k_one,
        gap,
        distance_from_zero,
        distance_from_one,
        margin_tol: opts.margin_tol,
        dist_tol: opts.dist_tol,
        affirmative,
        threshold,
    })
}
