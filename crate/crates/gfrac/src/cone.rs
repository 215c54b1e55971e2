//! The convex constraint sets: the cone `K` of non-negative non-decreasing
//! nodal profiles and the set `Σ` of non-decreasing profiles with zero
//! weighted mean and unit weighted L² norm.
//!
//! Projections are in the weighted L² metric given by the radial ball
//! weights. The projection onto `{v non-decreasing, v >= 0}` is exactly
//! `clip ∘ PAVA`: clamping at zero after isotonic regression only lifts an
//! initial block of pooled values, which is the optimal active set for the
//! joint constraint.

use serde::Serialize;

use crate::error::{Error, Result};

/// Weighted-metric description of the constraint sets.
#[derive(Debug, Clone, Serialize)]
pub struct ConeSpec {
    /// Strictly positive L²(B₁) node weights.
    pub weights: Vec<f64>,
    /// Slack allowed by membership tests.
    pub tolerance: f64,
}

impl ConeSpec {
    pub fn new(weights: Vec<f64>) -> Result<ConeSpec> {
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Config("cone weights must be strictly positive".into()));
        }
        Ok(ConeSpec {
            weights,
            tolerance: 1e-9,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> ConeSpec {
        self.tolerance = tol;
        self
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.weights.len() {
            return Err(Error::Config(format!(
                "length mismatch: {} values vs {} weights",
                values.len(),
                self.weights.len()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&w, (&x, &y))| w * x * y)
            .sum()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }

    pub fn mean_functional(&self, a: &[f64]) -> f64 {
        self.weights.iter().zip(a).map(|(&w, &x)| w * x).sum()
    }
}

/// Weighted pool-adjacent-violators: the exact weighted-L² projection onto
/// non-decreasing sequences.
pub fn pava(values: &[f64], weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(values.len(), weights.len());
    // Blocks of (weighted mean, weight sum, multiplicity).
    let mut means: Vec<f64> = Vec::with_capacity(values.len());
    let mut wsums: Vec<f64> = Vec::with_capacity(values.len());
    let mut counts: Vec<usize> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        means.push(v);
        wsums.push(w);
        counts.push(1);
        while means.len() > 1 {
            let k = means.len();
            if means[k - 2] <= means[k - 1] {
                break;
            }
            let w_new = wsums[k - 2] + wsums[k - 1];
            let m_new = (means[k - 2] * wsums[k - 2] + means[k - 1] * wsums[k - 1]) / w_new;
            means[k - 2] = m_new;
            wsums[k - 2] = w_new;
            counts[k - 2] += counts[k - 1];
            means.pop();
            wsums.pop();
            counts.pop();
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (m, c) in means.iter().zip(&counts) {
        out.extend(std::iter::repeat(*m).take(*c));
    }
    out
}

/// Exact weighted-L² projection onto `{v >= 0, v non-decreasing}`.
pub fn project_k(values: &[f64], spec: &ConeSpec) -> Result<Vec<f64>> {
    spec.check_len(values)?;
    let mut out = pava(values, &spec.weights);
    for v in out.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(out)
}

/// Membership test for the cone `K` on interior values.
pub fn is_in_k(values: &[f64], spec: &ConeSpec) -> bool {
    let tol = spec.tolerance;
    values.iter().all(|&v| v >= -tol)
        && values.windows(2).all(|w| w[1] - w[0] >= -tol)
}

/// Outcome of the Σ projection.
#[derive(Debug, Clone)]
pub struct SigmaProjection {
    pub values: Vec<f64>,
    pub cycles: usize,
}

/// Project onto `Σ`: Dykstra's alternating projections between the
/// monotone cone and the zero-weighted-mean hyperplane, then scaling to
/// unit weighted norm. The first two constraints form a convex cone, so
/// Dykstra converges to the exact metric projection; the sphere constraint
/// is non-convex and is handled by the final scaling, which preserves both
/// monotonicity and the zero mean.
pub fn project_sigma(values: &[f64], spec: &ConeSpec, max_cycles: usize) -> Result<SigmaProjection> {
    spec.check_len(values)?;
    let n = values.len();
    let w_total: f64 = spec.weights.iter().sum();
    let spread = values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    if spread <= 1e-14 * scale {
        return Err(Error::Degenerate(
            "constant input: its zero-mean reduction is identically zero and cannot be normalized"
                .into(),
        ));
    }

    let mut x = values.to_vec();
    // Dykstra corrections for the cone projection (the hyperplane is a
    // subspace, so its correction cancels and can be dropped).
    let mut p = vec![0.0; n];
    let mut cycles = 0;
    loop {
        cycles += 1;
        let y: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let z = pava(&y, &spec.weights);
        for i in 0..n {
            p[i] = y[i] - z[i];
        }
        let mean = spec.mean_functional(&z) / w_total;
        let x_next: Vec<f64> = z.iter().map(|v| v - mean).collect();
        let delta = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        x = x_next;
        if delta < 1e-10 * scale {
            break;
        }
        if cycles >= max_cycles {
            return Err(Error::NonConvergence(format!(
                "sigma projection did not stabilize in {max_cycles} cycles (last delta {delta:.3e}, iterate {x:?})"
            )));
        }
    }
    let norm = spec.norm(&x);
    if norm <= 1e-14 {
        return Err(Error::Degenerate(
            "projection collapsed to zero; no Σ-feasible point nearby".into(),
        ));
    }
    for v in x.iter_mut() {
        *v /= norm;
    }
    Ok(SigmaProjection { values: x, cycles })
}
