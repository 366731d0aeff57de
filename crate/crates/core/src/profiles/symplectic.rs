use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::RadialProfile;
use crate::cone_geometry::ConeGrid;
use crate::numerics::fourier::UniformGrid;
use crate::numerics::minkowski::CVec4;
use crate::numerics::quadrature::{cumulative_integral, Rule};
use crate::{Error, Result};

/// The three representations of the extended symplectic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymplecticMethod {
    /// (1/4π) ∫ [V̇₁·V₂ − V₁·V̇₂] ds d²l
    SlDomain,
    /// (1/4π) ∫ V̇₁(s) sgn(s−τ) V̇₂(τ) ds dτ d²l
    SgnKernel,
    /// i ∫ conj(V̇̃₁)·V̇̃₂ / ω dω d²l (principal value)
    SpectralPv,
}

impl SymplecticMethod {
    pub const ALL: [SymplecticMethod; 3] = [Self::SlDomain, Self::SgnKernel, Self::SpectralPv];

    pub fn name(&self) -> &'static str {
        match self {
            Self::SlDomain => "sl_domain",
            Self::SgnKernel => "sgn_kernel",
            Self::SpectralPv => "spectral_pv",
        }
    }
}

/// Discretization of the ω and s variables.
#[derive(Debug, Clone)]
pub struct SymplecticSettings {
    /// rule on [0, ω_max] for the spectral form
    pub omega: Rule,
    /// uniform grid for the s-domain forms
    pub fft: UniformGrid,
    /// relative size of V̇ allowed at the window edge
    pub edge_tolerance: f64,
}

impl Default for SymplecticSettings {
    fn default() -> Self {
        Self { omega: super::default_omega_rule(), fft: UniformGrid::new(2048, 2.0 * PI / 64.0), edge_tolerance: 1e-9 }
    }
}

pub fn symplectic_form(
    v1: &RadialProfile,
    v2: &RadialProfile,
    method: SymplecticMethod,
    grid: &ConeGrid,
    settings: &SymplecticSettings,
) -> Result<f64> {
    let per_node: Vec<Result<f64>> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let n = node.n_hat();
            match method {
                SymplecticMethod::SpectralPv => Ok(spectral_pv(v1, v2, n, &settings.omega)),
                SymplecticMethod::SlDomain => {
                    let a = SDomain::new(v1, n, &settings.fft, settings.edge_tolerance)?;
                    let b = SDomain::new(v2, n, &settings.fft, settings.edge_tolerance)?;
                    Ok(sl_domain(&a, &b, settings.fft.d_s()))
                }
                SymplecticMethod::SgnKernel => {
                    let a = SDomain::new(v1, n, &settings.fft, settings.edge_tolerance)?;
                    let b = SDomain::new(v2, n, &settings.fft, settings.edge_tolerance)?;
                    Ok(sgn_kernel(&a, &b, settings.fft.d_s()))
                }
            }
        })
        .collect();
    let mut vals = Vec::with_capacity(per_node.len());
    for r in per_node {
        vals.push(r?);
    }
    Ok(grid.sum_real(&vals))
}

fn spectral_pv(v1: &RadialProfile, v2: &RadialProfile, n: [f64; 3], rule: &Rule) -> f64 {
    let mut acc = 0.0;
    for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let a = v1.vdot(w, n);
        let b = v2.vdot(w, n);
        acc += -2.0 * a.cdot(&b).im / w * wt;
    }
    acc
}

/// Real s-domain samples of V̇ and V (V vanishing at s = +∞) for one direction.
struct SDomain {
    vdot: Vec<[f64; 4]>,
    v: Vec<[f64; 4]>,
}

impl SDomain {
    fn new(profile: &RadialProfile, n: [f64; 3], grid: &UniformGrid, edge_tol: f64) -> Result<Self> {
        let omegas = grid.omegas();
        let half = grid.n / 2;
        // spectral samples for ω ≥ 0, reality for ω < 0
        let mut pos = vec![CVec4::zero(); half + 1];
        for (k, p) in pos.iter_mut().enumerate() {
            *p = profile.vdot(k as f64 * grid.d_omega, n);
        }
        let spec_at = |idx: usize| -> CVec4 {
            let k = idx as i64 - half as i64;
            if k >= 0 {
                pos[k as usize]
            } else {
                pos[(-k) as usize].conj()
            }
        };
        let tail = pos[0];
        let s_vals = grid.s_values();
        let mut vdot = vec![[0.0; 4]; grid.n];
        let mut v = vec![[0.0; 4]; grid.n];
        for c in 0..4 {
            let spec: Vec<C64> = (0..grid.n).map(|i| spec_at(i)[c]).collect();
            let sd = grid.to_s(&spec);
            let p = tail[c].re;
            let rem: Vec<C64> = omegas
                .iter()
                .zip(&spec)
                .map(|(&w, &s)| {
                    if w == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        (s - p * (-0.5 * w * w).exp()) * C64::new(0.0, 1.0 / w)
                    }
                })
                .collect();
            let prim = grid.to_s(&rem);
            let last = grid.n - 1;
            let tail_part = |s: f64| -PI * p * erfc(s / std::f64::consts::SQRT_2);
            let shift = prim[last].re + tail_part(s_vals[last]);
            for i in 0..grid.n {
                vdot[i][c] = sd[i].re;
                v[i][c] = prim[i].re - shift + tail_part(s_vals[i]);
            }
        }
        let scale = vdot.iter().flat_map(|x| x.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        let edge = [vdot[0], vdot[grid.n - 1]]
            .iter()
            .flat_map(|x| x.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if scale > 0.0 && edge > edge_tol * scale {
            return Err(Error::PreconditionViolation(format!(
                "profile does not decay inside the s window: edge/peak = {:e}",
                edge / scale
            )));
        }
        Ok(Self { vdot, v })
    }
}

fn mdot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

fn sl_domain(a: &SDomain, b: &SDomain, ds: f64) -> f64 {
    let s: f64 = (0..a.v.len()).map(|i| mdot(&a.vdot[i], &b.v[i]) - mdot(&a.v[i], &b.vdot[i])).sum();
    s * ds / (4.0 * PI)
}

fn sgn_kernel(a: &SDomain, b: &SDomain, ds: f64) -> f64 {
    let n = b.vdot.len();
    let comps: Vec<Vec<f64>> = (0..4)
        .map(|c| cumulative_integral(&b.vdot.iter().map(|v| v[c]).collect::<Vec<f64>>(), ds))
        .collect();
    let cum: Vec<[f64; 4]> = (0..n).map(|i| [comps[0][i], comps[1][i], comps[2][i], comps[3][i]]).collect();
    let total = cum[n - 1];
    let mut acc = 0.0;
    for i in 0..n {
        let g = [
            2.0 * cum[i][0] - total[0],
            2.0 * cum[i][1] - total[1],
            2.0 * cum[i][2] - total[2],
            2.0 * cum[i][3] - total[3],
        ];
        acc += mdot(&a.vdot[i], &g);
    }
    acc * ds / (4.0 * PI)
}
