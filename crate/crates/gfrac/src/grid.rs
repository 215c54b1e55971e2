//! Radial discretization of the ball and its exterior collar, quadrature
//! tables for N-dimensional radial double integrals, and the nonlocal
//! Neumann closure of a profile.
//!
//! Geometry conventions: a radial double integral over pairs `(x, y)` with
//! `|x| = r`, `|y| = ρ` and angle `θ` between them reduces to
//!
//! ```text
//! γ_{N-1} ∫ r^{N-1} dr ∫ ρ^{N-1} dρ  γ_{N-2} ∫₀^π sin^{N-2}θ f(r, ρ, θ) dθ
//! ```
//!
//! with `|x - y| = √(r² + ρ² − 2rρcosθ)`. Radial node masses are the exact
//! moments `∫ φ_i(r) r^{N-1} dr` of the nodal hat functions; summing the
//! interior masses reproduces the ball volume at machine precision, which
//! the constant-energy identities downstream depend on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::young::YoungFamily;

/// `Γ(k/2)` for positive half-integers, exact recursion.
fn gamma_half(twice: u32) -> f64 {
    debug_assert!(twice >= 1);
    if twice == 1 {
        std::f64::consts::PI.sqrt()
    } else if twice == 2 {
        1.0
    } else {
        (0.5 * (twice - 2) as f64) * gamma_half(twice - 2)
    }
}

/// Surface measure of the unit sphere `S^d` in `R^{d+1}`; `γ_0 = 2`.
pub fn sphere_surface(d: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(0.5 * (d as f64 + 1.0)) / gamma_half(d + 1)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> f64 {
    std::f64::consts::PI.powf(0.5 * n as f64) / gamma_half(n + 2)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Grid resolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Space dimension, N >= 2.
    pub n: u32,
    /// Fractional order, s in (0, 1).
    pub s: f64,
    /// Interior subdivisions (M+1 nodes on [0, 1]).
    pub m: usize,
    /// Exterior nodes on (1, r_out], geometrically spaced.
    pub e: usize,
    /// Truncation radius of the exterior collar.
    pub r_out: f64,
    /// Angular Gauss-Legendre points on (0, π).
    pub k_ang: usize,
}

impl GridParams {
    /// Same geometry with M, E and K_ang doubled.
    pub fn refined(&self) -> GridParams {
        GridParams {
            m: self.m * 2,
            e: self.e * 2,
            k_ang: self.k_ang * 2,
            ..*self
        }
    }
}

/// How a node's hat mass splits across the ball boundary.
#[derive(Debug, Clone, Copy)]
pub struct NodeMass {
    /// `∫ φ_i r^{N-1} dr` restricted to [0, 1].
    pub inside: f64,
    /// Same restricted to (1, r_out].
    pub outside: f64,
}

impl NodeMass {
    #[inline]
    pub fn full(&self) -> f64 {
        self.inside + self.outside
    }
}

/// Which kernel density a pair integral should use. With `m = |u_i - u_j|`
/// and `d = |x - y|`:
/// `Value`  -> G(m / d^s) d^{-N}            (modular density)
/// `Slope`  -> g(m / d^s) d^{-N-s}          (first variation density)
/// `Curv`   -> g'(m / d^s) d^{-N-2s}        (second variation density)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Value,
    Slope,
    Curv,
}

/// Precomputed radial/angular tables for one resolution.
pub struct RadialGrid {
    pub params: GridParams,
    /// Combined radii: interior nodes 0..=M, then exterior nodes.
    pub radii: Vec<f64>,
    /// Number of interior nodes (M + 1).
    pub interior_len: usize,
    /// Hat masses split across the boundary.
    pub masses: Vec<NodeMass>,
    /// Ball quadrature weights `γ_{N-1}·inside_i` for interior nodes.
    pub ball_weights: Vec<f64>,
    /// Angular nodes on (0, π).
    pub theta: Vec<f64>,
    /// Angular weights `γ_{N-2} sin^{N-2}θ_k · (GL weight)`; they sum to
    /// `γ_{N-1}`.
    pub ang_weights: Vec<f64>,
    /// Surface measure of S^{N-1}.
    pub gamma_nm1: f64,
    /// Surface measure of S^{N-2} (with γ_0 = 2).
    pub gamma_nm2: f64,
    /// Unit ball volume.
    pub omega_n: f64,
    /// Near-field radius: local pair integrals with `d < delta` are handled
    /// by the slope model, everything else by the tables.
    pub delta: f64,
    /// Local node spacing (largest adjacent gap).
    pub spacing: Vec<f64>,
    /// d^{-s} per (unordered pair, angular node); triangular layout.
    inv_ds: Vec<f64>,
    /// d^{-N} per (unordered pair, angular node).
    inv_dn: Vec<f64>,
    /// 8-point Gauss-Legendre rule used by the panel refinement.
    gl8: (Vec<f64>, Vec<f64>),
}

/// Pairs with radii closer than this many local spacings get the
/// panel-refined angular rule; the fixed table under-resolves their peak.
const NEAR_BAND_FACTOR: f64 = 4.0;

impl RadialGrid {
    pub fn build(params: GridParams) -> Result<RadialGrid> {
        let GridParams {
            n,
            s,
            m,
            e,
            r_out,
            k_ang,
        } = params;
        if n < 2 {
            return Err(Error::Config(format!("dimension must satisfy N >= 2, got {n}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Config(format!("order must satisfy s in (0,1), got {s}")));
        }
        if m < 8 {
            return Err(Error::Config(format!("need M >= 8 interior cells, got {m}")));
        }
        if e < 4 {
            return Err(Error::Config(format!("need E >= 4 exterior nodes, got {e}")));
        }
        if !(r_out > 1.0) {
            return Err(Error::Config(format!("need r_out > 1, got {r_out}")));
        }
        if k_ang < 16 {
            return Err(Error::Config(format!("need K_ang >= 16, got {k_ang}")));
        }

        let mut radii: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        for j in 1..=e {
            radii.push(r_out.powf(j as f64 / e as f64));
        }
        let interior_len = m + 1;
        let len = radii.len();

        // Exact hat masses against r^{N-1} dr, split at the boundary node
        // (which is a grid node, so no segment straddles r = 1).
        let nf = n as f64;
        let moment0 = |a: f64, b: f64| (b.powi(n as i32) - a.powi(n as i32)) / nf;
        let moment1 =
            |a: f64, b: f64| (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / (nf + 1.0);
        let mut masses = vec![
            NodeMass {
                inside: 0.0,
                outside: 0.0
            };
            len
        ];
        for seg in 0..len - 1 {
            let (a, b) = (radii[seg], radii[seg + 1]);
            let dp = moment0(a, b);
            let pp = moment1(a, b);
            let share_right = (pp - a * dp) / (b - a);
            let share_left = (b * dp - pp) / (b - a);
            if b <= 1.0 {
                masses[seg].inside += share_left;
                masses[seg + 1].inside += share_right;
            } else {
                masses[seg].outside += share_left;
                masses[seg + 1].outside += share_right;
            }
        }

        let gamma_nm1 = sphere_surface(n - 1);
        let gamma_nm2 = sphere_surface(n - 2);
        let omega_n = unit_ball_volume(n);
        let ball_weights: Vec<f64> = masses[..interior_len]
            .iter()
            .map(|nm| gamma_nm1 * nm.inside)
            .collect();

        let (gl_nodes, gl_w) = gauss_legendre(k_ang);
        let theta: Vec<f64> = gl_nodes
            .iter()
            .map(|x| 0.5 * std::f64::consts::PI * (x + 1.0))
            .collect();
        let ang_weights: Vec<f64> = theta
            .iter()
            .zip(&gl_w)
            .map(|(&t, &w)| {
                gamma_nm2 * t.sin().powi(n as i32 - 2) * w * 0.5 * std::f64::consts::PI
            })
            .collect();

        let mut spacing = vec![0.0; len];
        for i in 0..len {
            let left = if i > 0 { radii[i] - radii[i - 1] } else { 0.0 };
            let right = if i + 1 < len {
                radii[i + 1] - radii[i]
            } else {
                left
            };
            spacing[i] = left.max(right);
        }
        let h_int = 1.0 / m as f64;
        let delta = h_int.min(radii[interior_len] - 1.0);

        // Distance tables, triangular in the pair index.
        let pairs = len * (len + 1) / 2;
        let mut inv_ds = vec![0.0; pairs * k_ang];
        let mut inv_dn = vec![0.0; pairs * k_ang];
        let cos_theta: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
        for i in 0..len {
            for j in i..len {
                let base = (tri_index(i, j, len)) * k_ang;
                let (r, rho) = (radii[i], radii[j]);
                for (k, &ct) in cos_theta.iter().enumerate() {
                    let d2 = r * r + rho * rho - 2.0 * r * rho * ct;
                    let d = d2.max(0.0).sqrt();
                    if d > 0.0 {
                        inv_ds[base + k] = d.powf(-s);
                        inv_dn[base + k] = d.powi(-(n as i32));
                    }
                }
            }
        }

        Ok(RadialGrid {
            params,
            radii,
            interior_len,
            masses,
            ball_weights,
            theta,
            ang_weights,
            gamma_nm1,
            gamma_nm2,
            omega_n,
            delta,
            spacing,
            inv_ds,
            inv_dn,
            gl8: gauss_legendre(8),
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exterior_len(&self) -> usize {
        self.len() - self.interior_len
    }

    pub fn interior_radii(&self) -> &[f64] {
        &self.radii[..self.interior_len]
    }

    pub fn exterior_radii(&self) -> &[f64] {
        &self.radii[self.interior_len..]
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        idx < self.interior_len
    }

    /// Kernel distance `d(r, ρ, θ)`.
    pub fn distance(r: f64, rho: f64, theta: f64) -> f64 {
        (r * r + rho * rho - 2.0 * r * rho * theta.cos())
            .max(0.0)
            .sqrt()
    }

    /// Ordered-pair product mass restricted to the integration set: both
    /// orderings of `(i, j)`, excluding the exterior×exterior part.
    #[inline]
    pub fn pair_mass(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.masses[i], self.masses[j]);
        a.inside * b.full() + b.inside * a.full() + a.outside * b.inside + b.outside * a.inside
    }

    /// Checks whether the fixed angular table resolves the pair; close radii
    /// produce a peak near θ = 0 that needs panel refinement.
    #[inline]
    fn near_band(&self, i: usize, j: usize) -> bool {
        (self.radii[i] - self.radii[j]).abs()
            < NEAR_BAND_FACTOR * self.spacing[i].max(self.spacing[j])
    }

    /// Angular kernel integral for a node pair:
    /// `γ_{N-2} ∫ sin^{N-2}θ Φ(d) dθ` restricted to `d >= delta`, where `Φ`
    /// is selected by `mode` (see [`KernelMode`]) at difference magnitude
    /// `m >= 0`.
    pub fn pair_kernel(&self, fam: &YoungFamily, i: usize, j: usize, m: f64, mode: KernelMode) -> f64 {
        if self.near_band(i, j) {
            self.pair_kernel_panels(fam, self.radii[i], self.radii[j], m, mode)
        } else {
            self.pair_kernel_table(fam, i, j, m, mode)
        }
    }

    #[inline]
    fn density(&self, fam: &YoungFamily, m: f64, ds: f64, dn: f64, mode: KernelMode) -> f64 {
        // ds = d^{-s}, dn = d^{-N}
        match mode {
            KernelMode::Value => fam.big_g(m * ds) * dn,
            KernelMode::Slope => fam.small_g(m * ds) * ds * dn,
            KernelMode::Curv => fam.small_g_prime(m * ds) * ds * ds * dn,
        }
    }

    fn pair_kernel_table(
        &self,
        fam: &YoungFamily,
        i: usize,
        j: usize,
        m: f64,
        mode: KernelMode,
    ) -> f64 {
        let base = tri_index(i.min(j), i.max(j), self.len()) * self.params.k_ang;
        let mut acc = 0.0;
        for k in 0..self.params.k_ang {
            let ds = self.inv_ds[base + k];
            if ds == 0.0 {
                continue;
            }
            acc += self.ang_weights[k] * self.density(fam, m, ds, self.inv_dn[base + k], mode);
        }
        acc
    }

    /// Panel-refined angular integral. Panels grow geometrically from the
    /// scale of the kernel peak at θ ≈ |r-ρ|/√(rρ); the region `d < delta`
    /// is cut (it belongs to the local model).
    fn pair_kernel_panels(
        &self,
        fam: &YoungFamily,
        r: f64,
        rho: f64,
        m: f64,
        mode: KernelMode,
    ) -> f64 {
        let pi = std::f64::consts::PI;
        let s = self.params.s;
        let n = self.params.n as i32;
        let theta_cut = if (r - rho).abs() >= self.delta {
            0.0
        } else {
            let denom = 2.0 * r * rho;
            if denom <= 0.0 {
                // One node at the origin: d = max(r, rho) independent of θ.
                if r.max(rho) < self.delta {
                    return 0.0;
                }
                0.0
            } else {
                let c = ((r * r + rho * rho - self.delta * self.delta) / denom).clamp(-1.0, 1.0);
                c.acos()
            }
        };
        if theta_cut >= pi {
            return 0.0;
        }
        let scale = ((r - rho).abs().max(self.delta) / (r * rho).sqrt().max(1e-12)).min(pi);
        let mut edges = vec![theta_cut];
        let mut x = (scale / 8.0).max(theta_cut.max(1e-8));
        while x < pi {
            if x > *edges.last().unwrap() {
                edges.push(x);
            }
            x *= 2.0;
        }
        edges.push(pi);

        let (gx, gw) = (&self.gl8.0, &self.gl8.1);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wq) in gx.iter().zip(gw) {
                let theta = mid + half * x;
                let d = Self::distance(r, rho, theta);
                if d < self.delta {
                    continue;
                }
                let ds = d.powf(-s);
                let dn = d.powi(-n);
                acc += half
                    * wq
                    * self.gamma_nm2
                    * theta.sin().powi(n - 2)
                    * self.density(fam, m, ds, dn, mode);
            }
        }
        acc
    }

    /// `∫_{B_1} f(u(x)) dx` for a radial nodal profile.
    pub fn ball_integral(&self, u: &RadialProfile, f: impl Fn(f64) -> f64) -> f64 {
        debug_assert_eq!(u.interior.len(), self.interior_len);
        self.ball_weights
            .iter()
            .zip(&u.interior)
            .map(|(&w, &v)| w * f(v))
            .sum()
    }

    /// Weighted L² inner product over the ball.
    pub fn dot_ball(&self, a: &[f64], b: &[f64]) -> f64 {
        self.ball_weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&w, (&x, &y))| w * x * y)
            .sum()
    }

    /// Weighted L² norm over the ball.
    pub fn norm_ball(&self, a: &[f64]) -> f64 {
        self.dot_ball(a, a).sqrt()
    }

    /// The stationarity function of one exterior node: for candidate value
    /// `c` at exterior index `j`,
    /// `F(c) = Σ_{i interior} mass_i · g(|c-u_i|/d^s) sign(c-u_i) d^{-N-s}`
    /// (angular-reduced). `F` is non-decreasing in `c` and its root is the
    /// value the nonlocal Neumann condition selects.
    pub fn neumann_function(
        &self,
        fam: &YoungFamily,
        u_interior: &[f64],
        ext_idx: usize,
        c: f64,
    ) -> f64 {
        let j = self.interior_len + ext_idx;
        let mut acc = 0.0;
        for i in 0..self.interior_len {
            let mass = self.masses[i].inside;
            if mass == 0.0 {
                continue;
            }
            let diff = c - u_interior[i];
            if diff != 0.0 {
                acc += mass
                    * diff.signum()
                    * self.pair_kernel(fam, i, j, diff.abs(), KernelMode::Slope);
            }
        }
        acc
    }

    /// Close a profile: solve `F(c) = 0` by bisection at every exterior
    /// node. The bracket `[min u, max u]` is guaranteed because `F` is
    /// non-decreasing with `F(min u) <= 0 <= F(max u)`.
    pub fn neumann_closure(&self, u: &RadialProfile, fam: &YoungFamily) -> Result<RadialProfile> {
        if u.interior.len() != self.interior_len {
            return Err(Error::Config(format!(
                "profile has {} interior values, grid expects {}",
                u.interior.len(),
                self.interior_len
            )));
        }
        if !u.interior.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("profile has non-finite interior values".into()));
        }
        let lo0 = u.interior.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi0 = u.interior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut exterior = Vec::with_capacity(self.exterior_len());
        for ext in 0..self.exterior_len() {
            if hi0 - lo0 <= 1e-15 * (1.0 + hi0.abs()) {
                exterior.push(0.5 * (lo0 + hi0));
                continue;
            }
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                if hi - lo < 1e-12 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if self.neumann_function(fam, &u.interior, ext, mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            exterior.push(0.5 * (lo + hi));
        }
        Ok(RadialProfile {
            interior: u.interior.clone(),
            exterior: Some(exterior),
        })
    }

    /// Largest |F| over the exterior nodes of a closed profile.
    pub fn neumann_residual(&self, u: &RadialProfile, fam: &YoungFamily) -> Result<f64> {
        let ext = u
            .exterior
            .as_ref()
            .ok_or_else(|| Error::Config("profile not closed".into()))?;
        let mut worst: f64 = 0.0;
        for (idx, &c) in ext.iter().enumerate() {
            worst = worst.max(self.neumann_function(fam, &u.interior, idx, c).abs());
        }
        Ok(worst)
    }
}

#[inline]
fn tri_index(i: usize, j: usize, len: usize) -> usize {
    // i <= j upper-triangular packing
    i * len - i * (i + 1) / 2 + j
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: u32, m: usize) -> RadialGrid {
        RadialGrid::build(GridParams {
            n,
            s: 0.5,
            m,
            e: 8,
            r_out: 4.0,
            k_ang: 32,
        })
        .unwrap()
    }

    #[test]
    fn constants() {
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(
            unit_ball_volume(3),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(sphere_surface(0), 2.0);
        assert_relative_eq!(sphere_surface(1), 2.0 * std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_surface(2), 4.0 * std::f64::consts::PI, max_relative = 1e-14);
    }

    #[test]
    fn volume_consistency() {
        for n in [2u32, 3, 4] {
            let g = grid(n, 16);
            let total: f64 = g.ball_weights.iter().sum();
            assert_relative_eq!(total, unit_ball_volume(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn bad_params_rejected() {
        let bad = GridParams {
            n: 1,
            s: 0.5,
            m: 16,
            e: 8,
            r_out: 4.0,
            k_ang: 32,
        };
        assert!(RadialGrid::build(bad).is_err());
        assert!(RadialGrid::build(GridParams { n: 2, s: 1.5, ..bad }).is_err());
        assert!(RadialGrid::build(GridParams { n: 2, m: 4, ..bad }).is_err());
        assert!(RadialGrid::build(GridParams { n: 2, r_out: 0.5, ..bad }).is_err());
    }

    #[test]
    fn angular_weights_sum_to_sphere_surface() {
        for n in [2u32, 3] {
            let g = grid(n, 16);
            let total: f64 = g.ang_weights.iter().sum();
            assert_relative_eq!(total, sphere_surface(n - 1), max_relative = 1e-10);
        }
    }

    #[test]
    fn ball_integral_examples() {
        let g = grid(2, 16);
        let one = RadialProfile::constant(1.0, g.interior_len, g.exterior_len());
        assert_relative_eq!(
            g.ball_integral(&one, |t| t),
            std::f64::consts::PI,
            max_relative = 1e-12
        );
        let c = RadialProfile::constant(2.5, g.interior_len, g.exterior_len());
        assert_relative_eq!(
            g.ball_integral(&c, |t| t * t),
            std::f64::consts::PI * 6.25,
            max_relative = 1e-12
        );
        let g3 = grid(3, 16);
        let one3 = RadialProfile::constant(1.0, g3.interior_len, g3.exterior_len());
        assert_relative_eq!(
            g3.ball_integral(&one3, |t| t),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn linear_profile_integral_converges() {
        // u(r) = r, f = t^2, N = 2: exact value 2π∫ r^3 dr = π/2, O(h²) error.
        let exact = std::f64::consts::PI / 2.0;
        let g = grid(2, 64);
        let u = RadialProfile::new(g.interior_radii().to_vec());
        let v = g.ball_integral(&u, |t| t * t);
        assert!((v - exact).abs() / exact < 1e-3, "got {v}, want {exact}");
    }

    #[test]
    fn distance_symmetry() {
        let d1 = RadialGrid::distance(0.3, 0.7, 1.1);
        let d2 = RadialGrid::distance(0.7, 0.3, 1.1);
        assert_relative_eq!(d1, d2);
        assert!(RadialGrid::distance(0.5, 0.5, 0.0) == 0.0);
        assert!(RadialGrid::distance(0.5, 0.5, 0.01) > 0.0);
    }

    #[test]
    fn closure_of_constant_is_constant() {
        let g = grid(2, 16);
        let fam = YoungFamily::power(2.0).unwrap();
        let u = RadialProfile::new(vec![1.0; g.interior_len]);
        let closed = g.neumann_closure(&u, &fam).unwrap();
        for &v in closed.exterior.as_ref().unwrap() {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn closure_linear_family_matches_weighted_average() {
        // For g(t) = 2t the stationarity equation is linear in c, so the
        // root has the closed form c = Σ K_i u_i / Σ K_i with
        // K_i = mass_i · (angular-reduced d^{-N-2s} kernel).
        let g = grid(2, 16);
        let fam = YoungFamily::power(2.0).unwrap();
        let u = RadialProfile::new(g.interior_radii().iter().map(|r| 0.2 + r * r).collect());
        let closed = g.neumann_closure(&u, &fam).unwrap();
        for ext in 0..g.exterior_len() {
            let j = g.interior_len + ext;
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..g.interior_len {
                let k =
                    g.masses[i].inside * g.pair_kernel(&fam, i, j, 1.0, KernelMode::Slope);
                num += k * u.interior[i];
                den += k;
            }
            assert_relative_eq!(
                closed.exterior.as_ref().unwrap()[ext],
                num / den,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn closure_monotone_profiles_stay_bracketed_and_monotone() {
        use rand::{Rng, SeedableRng};
        let g = grid(2, 16);
        let fam = YoungFamily::double_power(2.0, 3.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut acc = rng.gen_range(0.0..0.5);
            let interior: Vec<f64> = (0..g.interior_len)
                .map(|_| {
                    acc += rng.gen_range(0.0..0.1);
                    acc
                })
                .collect();
            let (lo, hi) = (interior[0], *interior.last().unwrap());
            let closed = g
                .neumann_closure(&RadialProfile::new(interior), &fam)
                .unwrap();
            let ext = closed.exterior.as_ref().unwrap();
            for w in ext.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "exterior not monotone: {ext:?}");
            }
            for &v in ext {
                assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn closure_idempotent_and_translation_equivariant() {
        let g = grid(2, 16);
        let fam = YoungFamily::power(3.0).unwrap();
        let u = RadialProfile::new(g.interior_radii().iter().map(|r| r.powi(2)).collect());
        let closed = g.neumann_closure(&u, &fam).unwrap();
        let closed2 = g.neumann_closure(&closed, &fam).unwrap();
        for (a, b) in closed
            .exterior
            .as_ref()
            .unwrap()
            .iter()
            .zip(closed2.exterior.as_ref().unwrap())
        {
            assert_relative_eq!(a, b, epsilon = 1e-11);
        }

        let shifted = RadialProfile::new(u.interior.iter().map(|v| v + 5.0).collect());
        let closed_shifted = g.neumann_closure(&shifted, &fam).unwrap();
        for (a, b) in closed
            .exterior
            .as_ref()
            .unwrap()
            .iter()
            .zip(closed_shifted.exterior.as_ref().unwrap())
        {
            assert_relative_eq!(*a + 5.0, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn closure_residual_is_small() {
        let g = grid(2, 16);
        let fam = YoungFamily::power(2.0).unwrap();
        let u = RadialProfile::new(g.interior_radii().iter().map(|r| r * r).collect());
        let closed = g.neumann_closure(&u, &fam).unwrap();
        assert!(g.neumann_residual(&closed, &fam).unwrap() < 1e-9);
    }

    #[test]
    fn closure_stable_under_refinement() {
        let params = GridParams {
            n: 2,
            s: 0.5,
            m: 16,
            e: 8,
            r_out: 4.0,
            k_ang: 32,
        };
        let coarse = RadialGrid::build(params).unwrap();
        let fine = RadialGrid::build(params.refined()).unwrap();
        let fam = YoungFamily::power(2.0).unwrap();
        let uc = RadialProfile::new(coarse.interior_radii().iter().map(|r| r * r).collect());
        let uf = RadialProfile::new(fine.interior_radii().iter().map(|r| r * r).collect());
        let cc = coarse.neumann_closure(&uc, &fam).unwrap();
        let cf = fine.neumann_closure(&uf, &fam).unwrap();
        // Outermost node exists on both grids (same r_out).
        let a = *cc.exterior.as_ref().unwrap().last().unwrap();
        let b = *cf.exterior.as_ref().unwrap().last().unwrap();
        assert!((a - b).abs() < 5e-3, "coarse {a}, fine {b}");
    }
}
