//! Limit functionals of currents supported away from the future cone: the
//! potential Φ(l), the Coulomb vector C(p) and the current weight ∫χ(sp)ds.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone_geometry::{make_grid, Spectral, VectorField};
use crate::ir_projection::{curl_fraction, project_ir_spectral, GradientClass};
use crate::numerics::minkowski::{dot3, orthonormal_frame, CVec4, FourVector};
use crate::numerics::quadrature::{composite_gl, gauss_hermite_scaled, uniform_composite_gl, Rule};
use crate::profiles::GaussianCurrent;
use crate::{Error, Result};

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1. Returns (S, S').
fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    let s = a + b;
    (a / s, (da * s - a * (da + db)) / (s * s))
}

/// Region in which a truncated current is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportRegion {
    /// x² < −δ
    Spacelike,
    /// x² > δ, x⁰ < 0
    PastCone,
}

/// Gaussian shell g = (1 + b·x̄) exp(−(x⁰−t₀)²/2σ_t² − (|x̄|−R₀)²/2σ_r²)
/// entering J^a = M^{ab} ∂_b(g c). With R₀ = 0 it is a lump on the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub time: f64,
    pub radius: f64,
    pub sigma_t: f64,
    pub sigma_r: f64,
    pub tilt: [f64; 3],
    /// M^{01}, M^{02}, M^{03}, M^{12}, M^{13}, M^{23}
    pub upper: [f64; 6],
}

impl Shell {
    fn matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for ((a, b), v) in pairs.iter().zip(self.upper) {
            m[*a][*b] = v;
            m[*b][*a] = -v;
        }
        m
    }

    /// g and ∂_b g.
    fn profile(&self, x: &FourVector) -> (f64, [f64; 4]) {
        let r = x.spatial_norm();
        let dt = x[0] - self.time;
        let dr = r - self.radius;
        let g0 = (-dt * dt / (2.0 * self.sigma_t * self.sigma_t) - dr * dr / (2.0 * self.sigma_r * self.sigma_r)).exp();
        let radial = if r > 0.0 { -dr / (self.sigma_r * self.sigma_r * r) } else { -1.0 / (self.sigma_r * self.sigma_r) };
        let tilt = 1.0 + dot3(self.tilt, x.spatial());
        let g = g0 * tilt;
        (g, [
            -dt / (self.sigma_t * self.sigma_t) * g,
            radial * x[1] * g + g0 * self.tilt[0],
            radial * x[2] * g + g0 * self.tilt[1],
            radial * x[3] * g + g0 * self.tilt[2],
        ])
    }

    fn time_range(&self) -> (f64, f64) {
        (self.time - 8.5 * self.sigma_t, self.time + 8.5 * self.sigma_t)
    }

    fn radial_rule(&self) -> Rule {
        let lo = self.radius - 8.5 * self.sigma_r;
        if lo <= 0.0 {
            return uniform_composite_gl(0.0, self.radius + 8.5 * self.sigma_r, 4, 10);
        }
        let gh = gauss_hermite_scaled(20, self.radius, self.sigma_r);
        let s2 = 2.0 * self.sigma_r * self.sigma_r;
        Rule {
            weights: gh.nodes.iter().zip(&gh.weights).map(|(r, w)| w * ((r - self.radius).powi(2) / s2).exp()).collect(),
            nodes: gh.nodes,
        }
    }
}

/// Conserved current Σ M^{ab} ∂_b(g_k c) with a mollified cutoff c of the
/// support region, so that it is exactly conserved and exactly supported in
/// the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedCurrent {
    pub shells: Vec<Shell>,
    pub region: SupportRegion,
    pub delta: f64,
}

impl TruncatedCurrent {
    pub fn new(shells: Vec<Shell>, region: SupportRegion, delta: f64) -> Result<Self> {
        let bad = shells.iter().any(|s| !(s.sigma_t > 0.0 && s.sigma_r > 0.0 && s.radius >= 0.0));
        if shells.is_empty() || !(delta > 0.0) || bad {
            return Err(Error::InvalidArgument("truncated current needs shells with positive widths and δ > 0".into()));
        }
        Ok(Self { shells, region, delta })
    }

    /// Default spacelike current: one shell around |x̄| = 6 displaced in time.
    pub fn spacelike_default() -> Self {
        let shell = Shell { time: 1.0, radius: 6.0, sigma_t: 0.5, sigma_r: 0.5, tilt: [0.2, -0.1, 0.15], upper: [0.7, -0.3, 0.5, 0.4, -0.6, 0.2] };
        Self { shells: vec![shell], region: SupportRegion::Spacelike, delta: 0.5 }
    }

    /// Default past-cone current: one lump on the negative time axis.
    pub fn past_cone_default() -> Self {
        let shell = Shell { time: -6.0, radius: 0.0, sigma_t: 0.5, sigma_r: 0.5, tilt: [0.1, 0.0, -0.1], upper: [0.4, 0.1, -0.2, 0.3, 0.5, -0.1] };
        Self { shells: vec![shell], region: SupportRegion::PastCone, delta: 0.5 }
    }

    /// Cutoff c(x) and its gradient ∂_b c (lower index).
    fn cutoff(&self, x: &FourVector) -> (f64, [f64; 4]) {
        let x2 = x.square();
        let xl = x.lower();
        match self.region {
            SupportRegion::Spacelike => {
                let (s, ds) = smooth_step((-x2 - self.delta) / self.delta);
                (s, std::array::from_fn(|b| ds * (-2.0 * xl[b]) / self.delta))
            }
            SupportRegion::PastCone => {
                if x[0] >= 0.0 {
                    return (0.0, [0.0; 4]);
                }
                let (s, ds) = smooth_step((x2 - self.delta) / self.delta);
                (s, std::array::from_fn(|b| ds * 2.0 * xl[b] / self.delta))
            }
        }
    }

    fn assemble(&self, x: &FourVector, truncated: bool) -> [f64; 4] {
        let (c, dc) = if truncated { self.cutoff(x) } else { (1.0, [0.0; 4]) };
        let mut out = [0.0; 4];
        if c == 0.0 && dc.iter().all(|v| *v == 0.0) {
            return out;
        }
        for shell in &self.shells {
            let (g, dg) = shell.profile(x);
            let grad: [f64; 4] = std::array::from_fn(|b| dg[b] * c + g * dc[b]);
            let m = shell.matrix();
            for (a, o) in out.iter_mut().enumerate() {
                *o += (0..4).map(|b| m[a][b] * grad[b]).sum::<f64>();
            }
        }
        out
    }

    pub fn value(&self, x: &FourVector) -> [f64; 4] {
        self.assemble(x, true)
    }

    /// The same shells without the cutoff.
    pub fn untruncated(&self, x: &FourVector) -> [f64; 4] {
        self.assemble(x, false)
    }

    /// ∫|J_untruncated − J|_E / ∫|J_untruncated|_E.
    pub fn truncation_residual(&self) -> f64 {
        let sphere = make_grid(24).expect("valid order");
        let (mut diff, mut total) = (0.0, 0.0);
        let norm = |v: [f64; 4]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
        for shell in &self.shells {
            let (lo, hi) = shell.time_range();
            let t_rule = uniform_composite_gl(lo, hi, 6, 10);
            let r_rule = shell.radial_rule();
            let (d, t) = t_rule
                .nodes
                .par_iter()
                .zip(&t_rule.weights)
                .map(|(&t, &wt)| {
                    let mut acc = (0.0, 0.0);
                    for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
                        for (node, &ws) in sphere.nodes().iter().zip(sphere.weights()) {
                            let n = node.n_hat();
                            let x = FourVector::new(t, r * n[0], r * n[1], r * n[2]);
                            let a = self.untruncated(&x);
                            let b = self.value(&x);
                            let w = wt * wr * ws * r * r;
                            acc.0 += w * norm(std::array::from_fn(|k| a[k] - b[k]));
                            acc.1 += w * norm(a);
                        }
                    }
                    acc
                })
                .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            diff += d;
            total += t;
        }
        if total > 0.0 {
            diff / total
        } else {
            0.0
        }
    }
}

/// Spatial directions x̂ in polar coordinates about n̂: c = n̂·x̂ on a rule
/// refined where x⁰ = |x̄|c meets the time support, φ uniform.
fn polar_nodes(n: [f64; 3], c_rule: &Rule, n_phi: usize) -> Vec<(f64, [f64; 3], f64)> {
    let (e1, e2) = orthonormal_frame(n);
    let mut out = Vec::with_capacity(c_rule.len() * n_phi);
    for (&c, &wc) in c_rule.nodes.iter().zip(&c_rule.weights) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n_phi {
            let (sp, cp) = (2.0 * PI * (j as f64 + 0.5) / n_phi as f64).sin_cos();
            let w = std::array::from_fn(|i| c * n[i] + s * (cp * e1[i] + sp * e2[i]));
            out.push((c, w, wc * 2.0 * PI / n_phi as f64));
        }
    }
    out
}

/// Rule in c = n̂·x̂ for radius r: fine panels where |x⁰ − t₀| = |rc − t₀| ≤ 8.5σ_t.
fn c_rule(shell: &Shell, r: f64) -> Rule {
    let (lo, hi) = shell.time_range();
    let a = (lo / r).clamp(-1.0, 1.0);
    let b = (hi / r).clamp(-1.0, 1.0);
    let mut breaks = Vec::new();
    if a > -1.0 {
        breaks.push(-1.0);
    }
    let panels = 8;
    for k in 0..=panels {
        breaks.push(a + (b - a) * k as f64 / panels as f64);
    }
    if b < 1.0 {
        breaks.push(1.0);
    }
    breaks.dedup();
    composite_gl(&breaks, 8)
}

fn split_rule(lo: f64, hi: f64, cut: f64, panels: usize) -> Rule {
    let mut breaks = vec![lo];
    let step = (hi - lo) / panels as f64;
    let push_range = |a: f64, b: f64, breaks: &mut Vec<f64>| {
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            breaks.push(a + (b - a) * k as f64 / n as f64);
        }
    };
    if cut > lo && cut < hi {
        push_range(lo, cut, &mut breaks);
        push_range(cut, hi, &mut breaks);
    } else {
        push_range(lo, hi, &mut breaks);
    }
    composite_gl(&breaks, 8)
}

const POLAR_PHI: usize = 12;

/// Potentials below this norm are quadrature noise.
pub const PHI_NOISE_FLOOR: f64 = 1e-9;

/// Φ(l) = −½ ∫ sgn(x·l) x·J/x² dx in coordinates (x⁰, |x̄|, n̂·x̂, φ), with
/// the x⁰ rule split where x·l changes sign.
pub fn phi_direct(current: &TruncatedCurrent, n: [f64; 3]) -> f64 {
    let mut total = 0.0;
    for shell in &current.shells {
        let (lo, hi) = shell.time_range();
        let r_rule = shell.radial_rule();
        total += r_rule
            .nodes
            .par_iter()
            .zip(&r_rule.weights)
            .map(|(&r, &wr)| {
                let mut acc = 0.0;
                for (c, w, ws) in polar_nodes(n, &c_rule(shell, r), POLAR_PHI) {
                    let cut = r * c;
                    let t_rule = split_rule(lo, hi, cut, 4);
                    for (&t, &wt) in t_rule.nodes.iter().zip(&t_rule.weights) {
                        let x = FourVector::new(t, r * w[0], r * w[1], r * w[2]);
                        let x2 = x.square();
                        if x2 == 0.0 {
                            continue;
                        }
                        let xj = x.dot(&FourVector(current.value(&x)));
                        acc += wt * ws * (t - cut).signum() * xj / x2;
                    }
                }
                acc * wr * r * r
            })
            .sum::<f64>();
    }
    -0.5 * total
}

/// V(0, l) = ∫ δ(x·l) J(x) dx = ∫ J(|x̄| n̂·x̂, x̄) d³x.
pub fn v_zero(current: &TruncatedCurrent, n: [f64; 3]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for shell in &current.shells {
        let r_rule = shell.radial_rule();
        for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
            for (c, w, ws) in polar_nodes(n, &c_rule(shell, r), POLAR_PHI) {
                let j = current.value(&FourVector::new(r * c, r * w[0], r * w[1], r * w[2]));
                for a in 0..4 {
                    out[a] += wr * ws * r * r * j[a];
                }
            }
        }
    }
    out
}

/// Resolution of the Φ computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSettings {
    pub grid_order: usize,
    pub lmax: usize,
    pub max_truncation: f64,
}

impl Default for PhiSettings {
    fn default() -> Self {
        Self { grid_order: 12, lmax: 6, max_truncation: 1e-6 }
    }
}

/// Both routes to the potential of V_ir = −P_ir V(0, ·).
#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    #[serde(skip)]
    pub direct: GradientClass,
    #[serde(skip)]
    pub via_projection: GradientClass,
    pub direct_norm: f64,
    pub projection_norm: f64,
    pub difference: f64,
    pub relative_difference: f64,
    pub truncation_residual: f64,
    pub max_l_component: f64,
    pub v_zero_curl_fraction: f64,
    pub tail_fraction: f64,
}

/// Φ(l) by direct 4D quadrature and via the spectral projection of −V(0, ·).
pub fn spacelike_phi(current: &TruncatedCurrent, settings: &PhiSettings) -> Result<PhiReport> {
    let truncation_residual = current.truncation_residual();
    if truncation_residual > settings.max_truncation {
        return Err(Error::InvalidSupport(format!(
            "cutoff removes a fraction {truncation_residual:e} of the current (limit {:e})",
            settings.max_truncation
        )));
    }
    let grid = make_grid(settings.grid_order)?;
    let spec = Spectral::new(&grid, settings.lmax);
    let phi: Vec<C64> = grid.sample(|node| C64::new(phi_direct(current, node.n_hat()), 0.0));
    let direct = GradientClass::from_values(&phi, &spec);
    let v0: Vec<[f64; 4]> = grid.sample(|node| v_zero(current, node.n_hat()));
    let mut max_l_component = 0.0f64;
    let parts: Vec<[C64; 3]> = grid
        .nodes()
        .iter()
        .zip(&v0)
        .map(|(node, v)| {
            let n = node.n_hat();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let ldot = v[0] - (0..3).map(|i| n[i] * v[i + 1]).sum::<f64>();
            if norm > 0.0 {
                max_l_component = max_l_component.max(ldot.abs() / norm);
            }
            let f: [f64; 3] = std::array::from_fn(|i| -(v[i + 1] - v[0] * n[i]));
            let radial: f64 = (0..3).map(|i| f[i] * n[i]).sum();
            std::array::from_fn(|i| C64::new(f[i] - radial * n[i], 0.0))
        })
        .collect();
    let field = VectorField::from_tangent(&parts, -1);
    let via_projection = project_ir_spectral(&field, &spec)?;
    let v_zero_curl_fraction = if field.values.iter().any(|v: &CVec4| v.norm() > 0.0) {
        curl_fraction(&field, &spec)?
    } else {
        0.0
    };
    let difference = direct.sub(&via_projection).norm();
    let direct_norm = direct.norm();
    let scale = direct_norm.max(via_projection.norm());
    Ok(PhiReport {
        tail_fraction: spec.tail_fraction(&direct.coeffs),
        direct_norm,
        projection_norm: via_projection.norm(),
        relative_difference: if scale > PHI_NOISE_FLOOR { difference / scale } else { 0.0 },
        difference,
        truncation_residual,
        max_l_component,
        v_zero_curl_fraction,
        direct,
        via_projection,
    })
}

/// Region of spacetime carrying a current, for quadrature placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: FourVector,
    pub radius: f64,
}

/// C(p) = ∫ J(x)/√((p·x)² − p²x²) dx, computed in the rest frame of p where
/// the denominator is m|ȳ|.
pub fn coulomb_c<J>(p: &FourVector, current: J, window: &Window) -> Result<[f64; 4]>
where
    J: Fn(&FourVector) -> [f64; 4] + Sync,
{
    let p2 = p.square();
    if p2 <= 0.0 || p[0] <= 0.0 {
        return Err(Error::InvalidArgument(format!("C(p) needs p on the forward mass shell, p² = {p2}")));
    }
    let m = p2.sqrt();
    let u = p.scale(1.0 / m);
    let boost = FourVector::boost_matrix(&u);
    let inv = FourVector::boost_matrix(&FourVector::new(u[0], -u[1], -u[2], -u[3]));
    let cy = FourVector::transform(&inv, &window.center);
    let ry = window.radius * (u[0] + u.spatial_norm());
    let t_rule = uniform_composite_gl(cy[0] - ry, cy[0] + ry, 16, 10);
    let cn = cy.spatial_norm();
    let r_rule = uniform_composite_gl((cn - ry).max(0.0), cn + ry, 16, 10);
    let sphere = make_grid(80)?;
    let parts: Vec<[f64; 4]> = t_rule
        .nodes
        .par_iter()
        .zip(&t_rule.weights)
        .map(|(&t, &wt)| {
            let mut acc = [0.0; 4];
            for (&r, &wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
                for (node, &ws) in sphere.nodes().iter().zip(sphere.weights()) {
                    let n = node.n_hat();
                    let y = FourVector::new(t, r * n[0], r * n[1], r * n[2]);
                    let j = current(&FourVector::transform(&boost, &y));
                    let w = wt * wr * ws * r;
                    for a in 0..4 {
                        acc[a] += w * j[a];
                    }
                }
            }
            acc
        })
        .collect();
    Ok(std::array::from_fn(|a| parts.iter().map(|v| v[a]).sum::<f64>() / m))
}

/// C(p) at p = (m, 0) for a Gaussian current, reduced to one radial integral:
/// ∫ e^{−|x̄−ā|²/2σ²}/|x̄| d³x = (2πσ²/A) ∫₀^∞ [e^{−(r−A)²/2σ²} − e^{−(r+A)²/2σ²}] dr.
pub fn coulomb_c_gaussian_rest(current: &GaussianCurrent, mass: f64) -> [f64; 4] {
    let g = &current.profile;
    let s = g.sigma;
    let a = g.center.spatial_norm();
    let spatial = if a < 1e-12 * s {
        4.0 * PI * s * s
    } else {
        let rule = uniform_composite_gl(0.0, a + 12.0 * s, 24, 12);
        let radial = rule.integrate(|r| (-(r - a).powi(2) / (2.0 * s * s)).exp() - (-(r + a).powi(2) / (2.0 * s * s)).exp());
        2.0 * PI * s * s / a * radial
    };
    let time = (2.0 * PI).sqrt() * s;
    current.direction.map(|c| c * time * spatial / mass)
}

/// ∫_ℝ χ(sp) ds.
pub fn current_limit_weight<F: Fn(&FourVector) -> f64>(chi: F, p: &FourVector) -> f64 {
    let pe = p.euclid_sq().sqrt();
    let mut s_max = 1.0 / pe;
    let sup = |s: f64| chi(&p.scale(s)).abs().max(chi(&p.scale(-s)).abs());
    let mut peak = chi(&p.scale(0.0)).abs();
    for _ in 0..60 {
        let edge = sup(s_max);
        peak = peak.max(sup(0.5 * s_max)).max(edge);
        if edge <= 1e-18 * peak {
            break;
        }
        s_max *= 2.0;
    }
    uniform_composite_gl(-s_max, s_max, 64, 16).integrate(|s| chi(&p.scale(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::TestCurrent;

    #[test]
    fn smooth_step_derivative() {
        for t in [0.1, 0.3, 0.5, 0.8] {
            let h = 1e-6;
            let d = (smooth_step(t + h).0 - smooth_step(t - h).0) / (2.0 * h);
            assert!((d - smooth_step(t).1).abs() < 1e-7);
        }
    }

    #[test]
    fn truncated_current_is_conserved() {
        let j = TruncatedCurrent::spacelike_default();
        let x = FourVector::new(1.0, 5.9, 0.8, 0.3);
        let h = 1e-5;
        let div: f64 = (0..4)
            .map(|b| {
                let mut e = [0.0; 4];
                e[b] = h;
                let e = FourVector(e);
                (j.value(&(x + e))[b] - j.value(&(x - e))[b]) / (2.0 * h)
            })
            .sum();
        let scale = j.value(&x).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(scale > 1e-8);
        assert!(div.abs() < 1e-6 * scale.max(1.0), "{div}");
        assert_eq!(j.value(&FourVector::new(1.0, 1.2, 0.0, 0.0)), [0.0; 4]);
    }

    #[test]
    fn l_components_vanish() {
        let j = TruncatedCurrent::spacelike_default();
        let dirs = [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [-0.48, 0.6, 0.64]];
        let vs: Vec<[f64; 4]> = dirs.iter().map(|n| v_zero(&j, *n)).collect();
        let scale = vs.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(scale > 1e-3);
        for (n, v) in dirs.iter().zip(&vs) {
            let ldot = v[0] - n[0] * v[1] - n[1] * v[2] - n[2] * v[3];
            assert!(ldot.abs() < 1e-9 * scale, "{ldot} {scale}");
        }
    }

    #[test]
    fn past_cone_current_has_no_v_zero() {
        let j = TruncatedCurrent::past_cone_default();
        assert!(j.value(&FourVector::new(-6.0, 0.3, 0.2, 0.0)).iter().any(|v| v.abs() > 1e-3));
        for n in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]] {
            assert_eq!(v_zero(&j, n), [0.0; 4]);
        }
    }

    #[test]
    fn odd_current_has_vanishing_phi() {
        let mut j = TruncatedCurrent::spacelike_default();
        let mut mirror = j.shells[0];
        mirror.time = -mirror.time;
        mirror.tilt = mirror.tilt.map(|b| -b);
        j.shells.push(mirror);
        let x = FourVector::new(0.1, 2.7, 0.6, 3.0);
        let (a, b) = (j.value(&x), j.value(&-x));
        assert!((0..4).all(|k| (a[k] + b[k]).abs() < 1e-14));
        let scale = phi_direct(&TruncatedCurrent::spacelike_default(), [1.0, 0.0, 0.0]).abs();
        assert!(scale > 1e-3);
        for n in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]] {
            assert!(phi_direct(&j, n).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn coulomb_rest_frame_reduction() {
        let current = GaussianCurrent::new(FourVector::new(0.4, 1.5, -0.8, 0.6), 0.5, [1.0, 0.3, -0.2, 0.5]);
        let m = 1.3;
        let window = Window { center: current.profile.center, radius: 5.0 };
        let quad = coulomb_c(&FourVector::new(m, 0.0, 0.0, 0.0), |x| current.value(x), &window).unwrap();
        let reduced = coulomb_c_gaussian_rest(&current, m);
        for a in 0..4 {
            assert!((quad[a] - reduced[a]).abs() < 1e-6 * reduced[0].abs(), "{a}: {} vs {}", quad[a], reduced[a]);
        }
    }

    #[test]
    fn coulomb_spherical_current_keeps_time_component() {
        let m = 1.0;
        let current = |x: &FourVector| {
            let r2 = x.spatial_norm().powi(2);
            let h = (-(x[0] - 0.5).powi(2) - r2).exp();
            [h * (1.0 + r2), x[1] * h, x[2] * h, x[3] * h]
        };
        let window = Window { center: FourVector::new(0.5, 0.0, 0.0, 0.0), radius: 6.0 };
        let c = coulomb_c(&FourVector::new(m, 0.0, 0.0, 0.0), current, &window).unwrap();
        assert!(c[0] > 0.1);
        for a in 1..4 {
            assert!(c[a].abs() < 1e-12 * c[0]);
        }
    }

    #[test]
    fn current_weight_gaussian() {
        let p = FourVector::new(1.5, 0.3, -0.7, 0.9);
        let w = current_limit_weight(|x| (-x.euclid_sq()).exp(), &p);
        assert!((w - PI.sqrt() / p.euclid_sq().sqrt()).abs() < 1e-10);
        let odd = current_limit_weight(|x| x[1] * (-x.euclid_sq()).exp(), &p);
        assert!(odd.abs() < 1e-14);
        let a = 2.5;
        let scaled = current_limit_weight(|x| (-x.scale(1.0 / a).euclid_sq()).exp(), &p);
        assert!((scaled - a * w).abs() < 1e-10);
    }
}
