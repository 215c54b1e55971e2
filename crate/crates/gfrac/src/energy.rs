//! The energy functional `I(u) = ρ(u) + ½‖u‖²_{L²(B₁)} − (1/p)‖u‖^p_{L^p(B₁)}`,
//! the norm on the working space, the nodal weak residual of the
//! Euler-Lagrange equations, and the radial sup-norm estimate used by the
//! norm-equivalence argument on the cone.

use serde::Serialize;

use crate::cone::{is_in_k, ConeSpec};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::RadialProfile;
use crate::quadrature::NonlocalForm;

/// Itemized energy of a closed profile. `total = modular + l2 - lp`;
/// restricted to the cone the functional is `total` on members and `+∞`
/// outside (use [`EnergyReport::i_k`]).
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub modular_part: f64,
    pub modular_tail_bound: f64,
    pub l2_part: f64,
    pub lp_part: f64,
    pub total: f64,
    pub in_k: bool,
}

impl EnergyReport {
    /// Cone-restricted energy: `+∞` outside `K`.
    pub fn i_k(&self) -> f64 {
        if self.in_k {
            self.total
        } else {
            f64::INFINITY
        }
    }
}

pub fn check_p(p: f64) -> Result<()> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::Config(format!("the exponent must satisfy p > 2, got {p}")));
    }
    Ok(())
}

/// Ball weights as a cone spec for membership tests and projections.
pub fn cone_spec(grid: &RadialGrid) -> ConeSpec {
    ConeSpec::new(grid.ball_weights.clone()).expect("ball weights are positive")
}

/// Assemble the three energy terms of a closed profile.
pub fn energy(form: &NonlocalForm, u: &RadialProfile, p: f64) -> Result<EnergyReport> {
    check_p(p)?;
    let modular = form.modular(u)?;
    let grid = form.grid;
    let l2_part = 0.5 * grid.ball_integral(u, |t| t * t);
    let lp_part = grid.ball_integral(u, |t| t.abs().powf(p)) / p;
    let spec = cone_spec(grid);
    Ok(EnergyReport {
        modular_part: modular.value,
        modular_tail_bound: modular.tail_bound,
        l2_part,
        lp_part,
        total: modular.value + l2_part - lp_part,
        in_k: is_in_k(&u.interior, &spec),
    })
}

/// Energy value without the report plumbing; hot path for the solvers.
pub fn energy_value(form: &NonlocalForm, u: &RadialProfile, p: f64) -> Result<f64> {
    let modular = form.modular(u)?.value;
    let grid = form.grid;
    let l2 = 0.5 * grid.ball_integral(u, |t| t * t);
    let lp = grid.ball_integral(u, |t| t.abs().powf(p)) / p;
    Ok(modular + l2 - lp)
}

/// Full nodal gradient of the energy over all nodes (interior then
/// exterior). The local terms only load interior nodes; exterior
/// components are the nonlocal stationarity functions that the Neumann
/// closure zeroes.
pub fn energy_gradient(form: &NonlocalForm, u: &RadialProfile, p: f64) -> Result<Vec<f64>> {
    let mut grad = form.gradient(u)?;
    let grid = form.grid;
    for i in 0..grid.interior_len {
        let v = u.interior[i];
        grad[i] += grid.ball_weights[i] * (v - v.abs().powf(p - 2.0) * v);
    }
    Ok(grad)
}

/// Norm on the working space: `‖u‖_{L²(B₁)} + [u] + ‖u‖_{L^p(B₁)}` with
/// `[u]` the Luxemburg seminorm. Positively homogeneous of degree one.
pub fn v_norm(form: &NonlocalForm, u: &RadialProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    let grid = form.grid;
    let l2 = grid.ball_integral(u, |t| t * t).sqrt();
    let lp = grid.ball_integral(u, |t| t.abs().powf(p)).powf(1.0 / p);
    let lux = form.luxemburg(u)?.value;
    Ok(l2 + lux + lp)
}

/// Weak residual of `(-Δ_g)^s u + u = |u|^{p-2}u` against the interior
/// nodal hat basis (hats vanishing at the boundary, extended by zero
/// outside the closed ball), each normalized by its `v_norm`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub per_test: Vec<f64>,
    pub max_abs: f64,
    pub l2: f64,
}

/// Caches the test-function norms, which depend only on (grid, family, p).
pub struct ResidualAssembler {
    hat_norms: Vec<f64>,
    p: f64,
}

impl ResidualAssembler {
    pub fn new(form: &NonlocalForm, p: f64) -> Result<ResidualAssembler> {
        check_p(p)?;
        let grid = form.grid;
        let mut hat_norms = Vec::with_capacity(grid.interior_len - 1);
        for m in 0..grid.interior_len - 1 {
            let mut interior = vec![0.0; grid.interior_len];
            interior[m] = 1.0;
            let hat = RadialProfile {
                interior,
                exterior: Some(vec![0.0; grid.exterior_len()]),
            };
            hat_norms.push(v_norm(form, &hat, p)?);
        }
        Ok(ResidualAssembler { hat_norms, p })
    }

    /// Residuals for a closed profile. Entry `m` is the energy gradient
    /// component at node `m` divided by the norm of the `m`-th hat.
    pub fn report(&self, form: &NonlocalForm, u: &RadialProfile) -> Result<ResidualReport> {
        let grad = energy_gradient(form, u, self.p)?;
        let per_test: Vec<f64> = grad[..self.hat_norms.len()]
            .iter()
            .zip(&self.hat_norms)
            .map(|(g, n)| g / n)
            .collect();
        let max_abs = per_test.iter().fold(0.0f64, |a, &r| a.max(r.abs()));
        let l2 = per_test.iter().map(|r| r * r).sum::<f64>().sqrt();
        Ok(ResidualReport {
            per_test,
            max_abs,
            l2,
        })
    }
}

/// Radial sup-norm estimate `‖u‖_∞ ≤ √(N·2^N / γ_{N-1}) ‖u‖_{L²}` for
/// non-negative non-decreasing profiles, reported rather than asserted:
/// profiles concentrated against the boundary can violate it (the annulus
/// argument behind the constant leaves the ball), so the comparison is
/// part of the returned data.
#[derive(Debug, Clone, Serialize)]
pub struct RadialSupReport {
    pub sup_norm: f64,
    pub bound_from_l2: f64,
    pub constant: f64,
    pub satisfied: bool,
}

pub fn radial_sup_bound(grid: &RadialGrid, u: &RadialProfile) -> Result<RadialSupReport> {
    let spec = cone_spec(grid);
    if !is_in_k(&u.interior, &spec) {
        return Err(Error::Config(
            "radial sup bound applies to cone members (non-negative, non-decreasing)".into(),
        ));
    }
    let n = grid.params.n as f64;
    let constant = (n * 2f64.powf(n) / grid.gamma_nm1).sqrt();
    let sup_norm = u.interior.iter().cloned().fold(0.0f64, f64::max);
    let l2 = grid.ball_integral(u, |t| t * t).sqrt();
    let bound_from_l2 = constant * l2;
    Ok(RadialSupReport {
        sup_norm,
        bound_from_l2,
        constant,
        satisfied: sup_norm <= bound_from_l2 * (1.0 + 1e-12),
    })
}

/// Desk-scale check of the mountain-pass geometry: `I(0) = 0`, the
/// endpoint constant `e` has `I(e) <= 0`, and some ring radius `η < ‖e‖`
/// has positive energy over sampled cone directions.
#[derive(Debug, Clone, Serialize)]
pub struct MpgReport {
    pub e: f64,
    pub energy_at_e: f64,
    pub eta: f64,
    pub min_on_ring: f64,
    pub ring_samples: usize,
}

/// Smallest constant with non-positive energy, plus the fixed margin.
pub fn mountain_pass_endpoint(p: f64) -> f64 {
    (p / 2.0).powf(1.0 / (p - 2.0)) + 0.1
}

pub fn mpg_probe(form: &NonlocalForm, p: f64, seed: u64) -> Result<MpgReport> {
    check_p(p)?;
    let grid = form.grid;
    let e = mountain_pass_endpoint(p);
    let e_profile = RadialProfile::constant(e, grid.interior_len, grid.exterior_len());
    let energy_at_e = energy_value(form, &e_profile, p)?;

    let mut directions: Vec<RadialProfile> = Vec::new();
    directions.push(RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len()));
    for power in [1.0, 2.0] {
        let interior: Vec<f64> = grid.interior_radii().iter().map(|r| r.powf(power)).collect();
        directions.push(grid.neumann_closure(&RadialProfile::new(interior), form.fam)?);
    }
    let mut rng = crate::sampling::rng(seed);
    for _ in 0..5 {
        let u = crate::sampling::random_k_profile(grid, form.fam, &mut rng, 1.0)?;
        directions.push(u);
    }

    let e_norm = v_norm(form, &e_profile, p)?;
    let mut eta = 0.5 * e_norm.min(1.0);
    for _ in 0..8 {
        let mut min_on_ring = f64::INFINITY;
        for dir in &directions {
            let norm = v_norm(form, dir, p)?;
            if norm <= 0.0 {
                continue;
            }
            let scale = eta / norm;
            let scaled = RadialProfile {
                interior: dir.interior.iter().map(|v| v * scale).collect(),
                exterior: Some(
                    dir.exterior
                        .as_ref()
                        .unwrap()
                        .iter()
                        .map(|v| v * scale)
                        .collect(),
                ),
            };
            min_on_ring = min_on_ring.min(energy_value(form, &scaled, p)?);
        }
        if min_on_ring > 0.0 {
            return Ok(MpgReport {
                e,
                energy_at_e,
                eta,
                min_on_ring,
                ring_samples: directions.len(),
            });
        }
        eta *= 0.5;
    }
    Err(Error::NonConvergence(
        "no ring radius with positive energy found; mountain-pass geometry not visible at this resolution"
            .into(),
    ))
}

/// Weighted L² distance of a profile from a constant.
pub fn distance_to_constant(grid: &RadialGrid, u: &RadialProfile, c: f64) -> f64 {
    grid.ball_integral(u, |t| (t - c) * (t - c)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridParams;
    use crate::young::YoungFamily;
    use approx::assert_relative_eq;

    fn setup(m: usize) -> (RadialGrid, YoungFamily) {
        let grid = RadialGrid::build(GridParams {
            n: 2,
            s: 0.5,
            m,
            e: 8,
            r_out: 4.0,
            k_ang: 32,
        })
        .unwrap();
        let fam = YoungFamily::power(2.0).unwrap();
        (grid, fam)
    }

    #[test]
    fn constant_energy_closed_form() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let pi = std::f64::consts::PI;
        for (c, p) in [(1.0, 4.0), (0.7, 3.0), (1.3, 5.0)] {
            let u = RadialProfile::constant(c, grid.interior_len, grid.exterior_len());
            let rep = energy(&form, &u, p).unwrap();
            let expected = pi * (c * c / 2.0 - c.powf(p) / p);
            assert_relative_eq!(rep.total, expected, epsilon = 1e-12);
            assert!(rep.in_k);
        }
        // N=2, c=1, p=4 evaluates to π/4.
        let u = RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len());
        assert_relative_eq!(energy(&form, &u, 4.0).unwrap().total, pi / 4.0, epsilon = 1e-12);
        let zero = RadialProfile::constant(0.0, grid.interior_len, grid.exterior_len());
        assert_eq!(energy(&form, &zero, 4.0).unwrap().total, 0.0);
    }

    #[test]
    fn p_must_exceed_two() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let u = RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len());
        assert!(energy(&form, &u, 2.0).is_err());
        assert!(energy(&form, &u, 1.5).is_err());
    }

    #[test]
    fn i_k_is_infinite_outside_the_cone() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let decreasing: Vec<f64> = grid.interior_radii().iter().map(|r| 1.0 - r).collect();
        let u = grid
            .neumann_closure(&RadialProfile::new(decreasing), &fam)
            .unwrap();
        let rep = energy(&form, &u, 4.0).unwrap();
        assert!(!rep.in_k);
        assert!(rep.i_k().is_infinite());
    }

    #[test]
    fn v_norm_of_constant() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let pi = std::f64::consts::PI;
        let u = RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len());
        // sqrt(π) + 0 + π^{1/4}
        assert_relative_eq!(
            v_norm(&form, &u, 4.0).unwrap(),
            pi.sqrt() + pi.powf(0.25),
            epsilon = 1e-10
        );
        let zero = RadialProfile::constant(0.0, grid.interior_len, grid.exterior_len());
        assert_eq!(v_norm(&form, &zero, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn constants_zero_and_one_solve_the_equation() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let assembler = ResidualAssembler::new(&form, 4.0).unwrap();
        for c in [0.0, 1.0] {
            let u = RadialProfile::constant(c, grid.interior_len, grid.exterior_len());
            let rep = assembler.report(&form, &u).unwrap();
            assert!(rep.max_abs < 1e-12, "c = {c}: {}", rep.max_abs);
        }
        // u ≡ 2 is not a solution for p > 2 (2 ≠ 2^{p-1}).
        let u = RadialProfile::constant(2.0, grid.interior_len, grid.exterior_len());
        let rep = assembler.report(&form, &u).unwrap();
        assert!(rep.max_abs > 1e-2);
    }

    #[test]
    fn perturbing_a_solution_raises_the_residual() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let assembler = ResidualAssembler::new(&form, 4.0).unwrap();
        let base = RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len());
        let at_solution = assembler.report(&form, &base).unwrap().max_abs;
        let bumped: Vec<f64> = grid
            .interior_radii()
            .iter()
            .map(|r| 1.0 + 0.1 * r * r)
            .collect();
        let u = grid.neumann_closure(&RadialProfile::new(bumped), &fam).unwrap();
        let perturbed = assembler.report(&form, &u).unwrap().max_abs;
        assert!(perturbed > at_solution + 1e-4);
    }

    #[test]
    fn radial_sup_bound_constant_and_violation() {
        let (grid, _) = setup(16);
        let one = RadialProfile::constant(1.0, grid.interior_len, grid.exterior_len());
        let rep = radial_sup_bound(&grid, &one).unwrap();
        assert_relative_eq!(rep.constant, 2.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        assert!(rep.satisfied);
        assert_relative_eq!(rep.bound_from_l2, 2.0, epsilon = 1e-9);

        // Boundary-concentrated monotone profile violating the estimate:
        // u = r^4 at N = 2 has sup 1 but 2/√π · ‖u‖₂ ≈ 0.894.
        let u4 = RadialProfile::new(grid.interior_radii().iter().map(|r| r.powi(4)).collect());
        let u4 = RadialProfile {
            interior: u4.interior,
            exterior: Some(vec![1.0; grid.exterior_len()]),
        };
        let rep = radial_sup_bound(&grid, &u4).unwrap();
        assert!(!rep.satisfied, "{rep:?}");

        // Not in the cone: precondition error.
        let mut dec = one.clone();
        dec.interior[0] = 5.0;
        assert!(radial_sup_bound(&grid, &dec).is_err());
    }

    #[test]
    fn gateaux_consistency_of_full_gradient() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let p = 4.0;
        let u = grid
            .neumann_closure(
                &RadialProfile::new(grid.interior_radii().iter().map(|r| 0.5 + r * r).collect()),
                &fam,
            )
            .unwrap();
        let grad = energy_gradient(&form, &u, p).unwrap();
        let mut rng = crate::sampling::rng(31);
        use rand::Rng;
        for _ in 0..3 {
            let dir: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let directional: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            let eps = 1e-5;
            let perturb = |sign: f64| {
                let interior: Vec<f64> = u
                    .interior
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v + sign * eps * dir[i])
                    .collect();
                let exterior: Vec<f64> = u
                    .exterior
                    .as_ref()
                    .unwrap()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v + sign * eps * dir[grid.interior_len + i])
                    .collect();
                RadialProfile {
                    interior,
                    exterior: Some(exterior),
                }
            };
            let fp = energy_value(&form, &perturb(1.0), p).unwrap();
            let fm = energy_value(&form, &perturb(-1.0), p).unwrap();
            let fd = (fp - fm) / (2.0 * eps);
            assert_relative_eq!(directional, fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn mpg_probe_finds_a_positive_ring() {
        let (grid, fam) = setup(16);
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let rep = mpg_probe(&form, 4.0, 3).unwrap();
        assert!(rep.energy_at_e <= 0.0);
        assert!(rep.min_on_ring > 0.0);
        assert!(rep.eta > 0.0 && rep.eta < 1.0);
        // e = (p/2)^{1/(p-2)} + 0.1 = sqrt(2) + 0.1 at p = 4.
        assert_relative_eq!(rep.e, 2f64.sqrt() + 0.1, epsilon = 1e-12);
    }
}
