//! Local Newton refinement of a critical-point candidate.
//!
//! The stationarity system is the full nodal energy gradient with the
//! exterior values eliminated through the Neumann closure. Because pairs
//! with both points outside the ball carry no energy, the
//! exterior×exterior block of the second variation is diagonal, so the
//! elimination is a cheap Schur complement. Newton converges to critical
//! points of any index, which is what a mountain-pass candidate needs.

use crate::cone::is_in_k;
use crate::energy::energy_gradient;
use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::quadrature::NonlocalForm;

/// Dense LU solve with partial pivoting, in place. `a` is row-major n×n.
pub fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(Error::NonConvergence(
                "singular second-variation matrix in newton refinement".into(),
            ));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in (col + 1)..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = b[col];
        for k in (col + 1)..n {
            v -= a[col * n + k] * b[k];
        }
        b[col] = v / a[col * n + col];
    }
    Ok(())
}

/// Interior-reduced second variation of the energy: nonlocal Hessian plus
/// the local diagonal, with exterior nodes eliminated by their (diagonal)
/// block.
pub fn reduced_hessian(form: &NonlocalForm, u: &RadialProfile, p: f64) -> Result<Vec<f64>> {
    let grid = form.grid;
    let len = grid.len();
    let ni = grid.interior_len;
    let mut h = form.hessian(u)?;
    for i in 0..ni {
        let v = u.interior[i].abs();
        h[i * len + i] += grid.ball_weights[i] * (1.0 - (p - 1.0) * v.powf(p - 2.0));
    }
    let mut reduced = vec![0.0; ni * ni];
    for i in 0..ni {
        for j in 0..ni {
            reduced[i * ni + j] = h[i * len + j];
        }
    }
    for e in ni..len {
        let dee = h[e * len + e];
        if dee.abs() < 1e-14 {
            continue;
        }
        for i in 0..ni {
            let hie = h[i * len + e];
            if hie == 0.0 {
                continue;
            }
            for j in 0..ni {
                reduced[i * ni + j] -= hie * h[e * len + j] / dee;
            }
        }
    }
    Ok(reduced)
}

pub struct PolishOutcome {
    pub profile: RadialProfile,
    pub grad_max: f64,
    pub iterations: usize,
}

fn grad_max_interior(g: &[f64], ni: usize) -> f64 {
    g[..ni].iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Damped Newton on the interior stationarity system. Accepts steps only
/// when the gradient shrinks and the iterate stays (weakly) inside the
/// cone; otherwise returns the best iterate seen.
pub fn polish(
    form: &NonlocalForm,
    u0: &RadialProfile,
    p: f64,
    max_iters: usize,
) -> Result<PolishOutcome> {
    let grid = form.grid;
    let ni = grid.interior_len;
    let spec = crate::energy::cone_spec(grid).with_tolerance(1e-7);
    let mut best = u0.clone();
    let mut best_grad = grad_max_interior(&energy_gradient(form, &best, p)?, ni);
    let mut current = best.clone();
    let mut iterations = 0;

    for _ in 0..max_iters {
        let grad = energy_gradient(form, &current, p)?;
        let gmax = grad_max_interior(&grad, ni);
        if gmax < best_grad {
            best_grad = gmax;
            best = current.clone();
        }
        if gmax < 1e-13 {
            break;
        }
        let mut h = reduced_hessian(form, &current, p)?;
        let mut step: Vec<f64> = grad[..ni].to_vec();
        if lu_solve(&mut h, &mut step, ni).is_err() {
            break;
        }
        let mut damp = 1.0f64;
        let mut accepted = false;
        for _ in 0..10 {
            let interior: Vec<f64> = current
                .interior
                .iter()
                .zip(&step)
                .map(|(v, s)| v - damp * s)
                .collect();
            if !is_in_k(&interior, &spec) {
                damp *= 0.5;
                continue;
            }
            let trial = grid.neumann_closure(&RadialProfile::new(interior), form.fam)?;
            let tg = grad_max_interior(&energy_gradient(form, &trial, p)?, ni);
            if tg < gmax {
                current = trial;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    let final_grad = grad_max_interior(&energy_gradient(form, &best, p)?, ni);
    Ok(PolishOutcome {
        profile: best,
        grad_max: final_grad,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridParams, RadialGrid};
    use crate::young::YoungFamily;
    use rand::Rng;

    #[test]
    fn lu_solves_random_systems() {
        let mut rng = crate::sampling::rng(41);
        for n in [1usize, 2, 5, 12] {
            let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // Diagonal dominance keeps the random matrix well conditioned.
            let mut m = a.clone();
            for i in 0..n {
                m[i * n + i] += 4.0;
            }
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut b = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    b[i] += m[i * n + j] * x_true[j];
                }
            }
            let mut work = m.clone();
            lu_solve(&mut work, &mut b, n).unwrap();
            for (a, b) in b.iter().zip(&x_true) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let grid = RadialGrid::build(GridParams {
            n: 2,
            s: 0.5,
            m: 8,
            e: 4,
            r_out: 3.0,
            k_ang: 16,
        })
        .unwrap();
        let fam = YoungFamily::power(3.0).unwrap();
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let p = 5.0;
        let u = grid
            .neumann_closure(
                &RadialProfile::new(grid.interior_radii().iter().map(|r| 0.6 + 0.5 * r * r).collect()),
                &fam,
            )
            .unwrap();
        let len = grid.len();
        let mut h = form.hessian(&u).unwrap();
        for i in 0..grid.interior_len {
            let v = u.interior[i].abs();
            h[i * len + i] += grid.ball_weights[i] * (1.0 - (p - 1.0) * v.powf(p - 2.0));
        }
        let mut rng = crate::sampling::rng(43);
        let dir: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eps = 1e-5;
        let perturbed = |sign: f64| RadialProfile {
            interior: (0..grid.interior_len)
                .map(|i| u.value(i) + sign * eps * dir[i])
                .collect(),
            exterior: Some(
                (grid.interior_len..len)
                    .map(|i| u.value(i) + sign * eps * dir[i])
                    .collect(),
            ),
        };
        let gp = crate::energy::energy_gradient(&form, &perturbed(1.0), p).unwrap();
        let gm = crate::energy::energy_gradient(&form, &perturbed(-1.0), p).unwrap();
        for i in 0..len {
            let fd = (gp[i] - gm[i]) / (2.0 * eps);
            let hv: f64 = (0..len).map(|j| h[i * len + j] * dir[j]).sum();
            assert!(
                (fd - hv).abs() < 1e-4 * (1.0 + hv.abs()),
                "row {i}: fd {fd} vs analytic {hv}"
            );
        }
    }

    #[test]
    fn newton_lands_on_the_constant_solution() {
        let grid = RadialGrid::build(GridParams {
            n: 2,
            s: 0.5,
            m: 8,
            e: 4,
            r_out: 3.0,
            k_ang: 16,
        })
        .unwrap();
        let fam = YoungFamily::power(2.0).unwrap();
        let form = NonlocalForm::new(&grid, &fam).unwrap();
        let start: Vec<f64> = grid
            .interior_radii()
            .iter()
            .map(|r| 1.02 + 0.002 * r)
            .collect();
        let u0 = grid.neumann_closure(&RadialProfile::new(start), &fam).unwrap();
        let out = polish(&form, &u0, 4.0, 30).unwrap();
        assert!(out.grad_max < 1e-12, "grad {}", out.grad_max);
        for &v in &out.profile.interior {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }
}
