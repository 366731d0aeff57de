//! Radial-gauge profiles V_K of non-conserved test currents, the smeared
//! commutator function and its consistency checks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cone_geometry::{make_grid, ConeGrid};
use crate::numerics::minkowski::{CVec4, FourVector};
use crate::numerics::quadrature::{cumulative_integral, trapezoid, uniform_composite_gl, Rule};
use crate::profiles::{
    symplectic_form, GaussianCurrent, Profile, RadialProfile, SymplecticMethod, SymplecticSettings, TestCurrent,
};
use crate::{Error, Result};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Smearing function with ρ̂(p) = (2π)⁻¹ exp(−(|p|²_E)^k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmearingRho {
    /// number of vanishing moments requested
    pub moments: u32,
    pub k: u32,
}

impl Default for SmearingRho {
    fn default() -> Self {
        Self::new(7)
    }
}

impl SmearingRho {
    /// Smallest k with ρ̂ − (2π)⁻¹ = O(|p|^{moments+1}).
    pub fn new(moments: u32) -> Self {
        Self { moments, k: (moments + 2) / 2 }
    }

    pub fn rho_hat(&self, p: &FourVector) -> f64 {
        (-p.euclid_sq().powi(self.k as i32)).exp() / (2.0 * PI)
    }

    /// Contravariant components of the momentum gradient of ρ̂.
    pub fn grad_rho_hat(&self, p: &FourVector) -> FourVector {
        let q = p.euclid_sq();
        let k = self.k as f64;
        let f = -2.0 * k * q.powi(self.k as i32 - 1) * self.rho_hat(p);
        FourVector(std::array::from_fn(|a| f * METRIC[a] * p[a]))
    }

    /// ρ̂(ωl) on the unit section, where |l|²_E = 2.
    pub fn rho_hat_on_cone(&self, omega: f64) -> f64 {
        (-(2.0 * omega * omega).powi(self.k as i32)).exp() / (2.0 * PI)
    }

    /// Radius in |ω| beyond which ρ̂(ωl) is below e^{-40}/(2π).
    pub fn cutoff(&self) -> f64 {
        (40f64.powf(1.0 / self.k as f64) / 2.0).sqrt()
    }

    /// Scalar e(ω) with (∂ρ̂)(ωl) = e(ω) g^{aa} l^a.
    fn grad_scalar_on_cone(&self, omega: f64) -> f64 {
        let k = self.k as f64;
        let q = 2.0 * omega * omega;
        -2.0 * k * q.powi(self.k as i32 - 1) * omega * self.rho_hat_on_cone(omega)
    }

    fn omega_rule(&self) -> Rule {
        uniform_composite_gl(0.0, self.cutoff(), 16, 16)
    }

    /// ζ(s) = 2π ∫₀^∞ sin(ωs) ρ̂(ωl) dω (independent of l on the section).
    pub fn zeta(&self, s: f64) -> f64 {
        let r = self.omega_rule();
        2.0 * PI * r.integrate(|w| (w * s).sin() * self.rho_hat_on_cone(w))
    }

    /// ζ′(s).
    pub fn zeta_prime(&self, s: f64) -> f64 {
        let r = self.omega_rule();
        2.0 * PI * r.integrate(|w| w * (w * s).cos() * self.rho_hat_on_cone(w))
    }

    /// ε′(s).
    pub fn eta_scalar_prime(&self, s: f64) -> f64 {
        let r = self.omega_rule();
        -2.0 * PI * r.integrate(|w| w * (w * s).sin() * self.grad_scalar_on_cone(w))
    }

    /// η(s, l) = ε(s) g^{aa} l^a with ε(s) = 2π ∫₀^∞ cos(ωs) e(ω) dω.
    pub fn eta_scalar(&self, s: f64) -> f64 {
        let r = self.omega_rule();
        2.0 * PI * r.integrate(|w| (w * s).cos() * self.grad_scalar_on_cone(w))
    }
}

/// V̇̃_K for a test current K in the radial gauge.
pub struct GaugeProfile {
    current: Arc<dyn TestCurrent>,
    rho: SmearingRho,
    u_rule: Rule,
}

impl GaugeProfile {
    pub fn new(current: Arc<dyn TestCurrent>, rho: SmearingRho) -> Self {
        let u_rule = uniform_composite_gl(0.0, 1.2 * rho.cutoff(), 6, 12);
        Self { current, rho, u_rule }
    }

    /// Contravariant gradient in l of l·K̂(νl), evaluated on the cone.
    fn grad_lk(&self, nu: f64, l: &FourVector) -> CVec4 {
        let p = l.scale(nu);
        let k = self.current.fourier(&p);
        let jac = self.current.jacobian(&p);
        let ll = l.lower();
        CVec4(std::array::from_fn(|a| {
            let s: C64 = (0..4).map(|b| jac[a][b] * ll[b]).sum();
            k[a] + s * (nu * METRIC[a])
        }))
    }

    fn integrand(&self, omega: f64, u: f64, l: &FourVector) -> CVec4 {
        let nu = omega - u;
        let ul = l.scale(u);
        let lk = self.current.fourier(&l.scale(nu)).dot_real(l);
        let lw_dot = C64::new(0.0, -nu) * lk;
        let g = self.rho.grad_rho_hat(&ul).to_complex().scale(lw_dot);
        let d = self.grad_lk(nu, l).scale(C64::new(0.0, self.rho.rho_hat(&ul)));
        g + d
    }
}

impl Profile for GaugeProfile {
    fn vdot(&self, omega: f64, n: [f64; 3]) -> CVec4 {
        let l = FourVector::null(n);
        let base = self.current.fourier(&l.scale(omega)).scale(C64::new(0.0, -omega));
        let mut acc = CVec4::zero();
        for (u, w) in self.u_rule.nodes.iter().zip(&self.u_rule.weights) {
            let d = self.integrand(omega, *u, &l) - self.integrand(omega, -*u, &l);
            acc = acc + d.scale_re(*w);
        }
        base + acc.scale_re(PI)
    }

    fn has_tail(&self) -> bool {
        true
    }
}

/// Radial-gauge profile V_K of a test current.
pub fn gauge_profile<J: TestCurrent + 'static>(current: J, rho: SmearingRho, label: impl Into<String>) -> RadialProfile {
    RadialProfile::new(GaugeProfile::new(Arc::new(current), rho), label)
}

/// Closed-form Radon data of a Gaussian current along the section direction l:
/// W(s) = ∫δ(s − x·l)K, its s-derivative, Q = l·Ẇ and X = ∫δ(s − x·l) x ∂·K.
struct RadonSamples {
    w: Vec<[f64; 4]>,
    w_dot: Vec<[f64; 4]>,
    q: Vec<f64>,
    x: Vec<[f64; 4]>,
}

fn radon_gaussian(k: &GaussianCurrent, n: [f64; 3], s: &[f64]) -> RadonSamples {
    let l = FourVector::null(n);
    let v = [1.0, -n[0], -n[1], -n[2]];
    let a = k.profile.center;
    let sig2 = k.profile.sigma * k.profile.sigma;
    let c = k.direction;
    let al = a.dot(&l);
    let cl = FourVector(c).dot(&l);
    let amp = (2.0 * PI * sig2).powf(1.5) / 2f64.sqrt();
    let mut out = RadonSamples { w: vec![], w_dot: vec![], q: vec![], x: vec![] };
    for &si in s {
        let sp = si - al;
        let r = amp * (-sp * sp / (4.0 * sig2)).exp();
        let d = -sp / (2.0 * sig2);
        out.w.push(c.map(|cb| cb * r));
        out.w_dot.push(c.map(|cb| cb * r * d));
        out.q.push(cl * r * d);
        out.x.push(std::array::from_fn(|b| {
            -(a[b] * cl * sp / 2.0 + sig2 * (c[b] - v[b] * cl / 2.0) + v[b] * cl * sp * sp / 4.0) * r / sig2
        }));
    }
    out
}

fn mdot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// The four pieces of 4π∬K₁^a 𝒟_ab K₂^b.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CommutatorTerms {
    pub metric: f64,
    pub first_f: f64,
    pub second_f: f64,
    pub g: f64,
}

impl CommutatorTerms {
    pub fn total(&self) -> f64 {
        self.metric + self.first_f + self.second_f + self.g
    }
}

/// Uniform s-grid and the smearing kernels sampled on it.
struct SGrid {
    s: Vec<f64>,
    h: f64,
    zeta: Vec<f64>,
    eta: Vec<f64>,
}

impl SGrid {
    fn new(k1: &GaussianCurrent, k2: &GaussianCurrent, rho: &SmearingRho, level: u32) -> Self {
        let reach = |k: &GaussianCurrent| 2f64.sqrt() * k.profile.center.euclid_sq().sqrt() + 16.0 * k.profile.sigma;
        let half = reach(k1).max(reach(k2));
        let h = k1.profile.sigma.min(k2.profile.sigma) / (8.0 * f64::from(1u32 << level));
        let m = (half / h).ceil() as i64;
        let s: Vec<f64> = (-m..=m).map(|i| i as f64 * h).collect();
        let zeta = s.par_iter().map(|x| rho.zeta(*x)).collect();
        let eta = s.par_iter().map(|x| rho.eta_scalar(*x)).collect();
        Self { s, h, zeta, eta }
    }
}

fn node_terms(k1: &GaussianCurrent, k2: &GaussianCurrent, n: [f64; 3], sg: &SGrid) -> CommutatorTerms {
    let r1 = radon_gaussian(k1, n, &sg.s);
    let r2 = radon_gaussian(k2, n, &sg.s);
    let l = [1.0, n[0], n[1], n[2]];
    let eta_vec = |i: usize| -> [f64; 4] { std::array::from_fn(|a| sg.eta[i] * METRIC[a] * l[a]) };
    let b = |r: &RadonSamples| -> Vec<[f64; 4]> {
        (0..sg.s.len())
            .map(|i| {
                let e = eta_vec(i);
                std::array::from_fn(|a| sg.zeta[i] * r.x[i][a] - e[a] * r.q[i])
            })
            .collect()
    };
    let b1 = b(&r1);
    let b2 = b(&r2);
    let n_s = sg.s.len();
    let integ = |f: &dyn Fn(usize) -> f64| trapezoid(&(0..n_s).map(f).collect::<Vec<_>>(), sg.h);
    let metric = integ(&|i| mdot(&r1.w_dot[i], &r2.w[i])) / (2.0 * PI);
    let first_f = -integ(&|i| mdot(&b1[i], &r2.w[i])) / (2.0 * PI);
    let second_f = integ(&|i| mdot(&r1.w[i], &b2[i])) / (2.0 * PI);
    let mut g = 0.0;
    for a in 0..4 {
        let comp: Vec<f64> = b2.iter().map(|v| v[a]).collect();
        let cum = cumulative_integral(&comp, sg.h);
        let total = cum[n_s - 1];
        g += METRIC[a] * integ(&|i| b1[i][a] * (2.0 * cum[i] - total));
    }
    CommutatorTerms { metric, first_f, second_f, g: g / (4.0 * PI) }
}

/// 4π∬K₁^a(x) 𝒟_ab(x, y) K₂^b(y), with the δ and sgn factors reduced to
/// one-dimensional integrals along x·l and the cone integral done on `grid`.
pub fn smeared_commutator(
    k1: &GaussianCurrent,
    k2: &GaussianCurrent,
    rho: &SmearingRho,
    grid: &ConeGrid,
    level: u32,
) -> CommutatorTerms {
    let sg = SGrid::new(k1, k2, rho, level);
    let per: Vec<CommutatorTerms> = grid.nodes().par_iter().map(|nd| node_terms(k1, k2, nd.n_hat(), &sg)).collect();
    let mut out = CommutatorTerms::default();
    for (t, w) in per.iter().zip(grid.weights()) {
        out.metric += w * t.metric;
        out.first_f += w * t.first_f;
        out.second_f += w * t.second_f;
        out.g += w * t.g;
    }
    out
}

/// ∬f₁(x) D(x − y) f₂(y) for scalar Gaussians through the cone representation
/// D(x) = −(8π²)⁻¹ ∫δ′(x·l) d²l.
pub fn smeared_pauli_jordan_cone(
    f1: &crate::profiles::Gaussian,
    f2: &crate::profiles::Gaussian,
    grid: &ConeGrid,
) -> f64 {
    let as_current = |g: &crate::profiles::Gaussian| GaussianCurrent { profile: *g, direction: [1.0, 0.0, 0.0, 0.0] };
    let (k1, k2) = (as_current(f1), as_current(f2));
    let sg = SGrid::new(&k1, &k2, &SmearingRho::default(), 1);
    let vals: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|nd| {
            let r1 = radon_gaussian(&k1, nd.n_hat(), &sg.s);
            let r2 = radon_gaussian(&k2, nd.n_hat(), &sg.s);
            let f: Vec<f64> = (0..sg.s.len()).map(|i| r1.w_dot[i][0] * r2.w[i][0]).collect();
            trapezoid(&f, sg.h)
        })
        .collect();
    vals.iter().zip(grid.weights()).map(|(v, w)| v * w).sum::<f64>() / (8.0 * PI * PI)
}

/// The same pairing through D(z) = (2π)⁻¹ sgn(z⁰) δ(z²), integrating the
/// Gaussian cross-correlation over the light cone.
pub fn smeared_pauli_jordan_direct(
    f1: &crate::profiles::Gaussian,
    f2: &crate::profiles::Gaussian,
    grid: &ConeGrid,
    radial_nodes: usize,
) -> f64 {
    let (s1, s2) = (f1.sigma * f1.sigma, f2.sigma * f2.sigma);
    let var = s1 + s2;
    let amp = (2.0 * PI * s1 * s2 / var).powi(2);
    let d = f1.center - f2.center;
    let corr = |z: FourVector| amp * (-(z - d).euclid_sq() / (2.0 * var)).exp();
    let r_max = d.euclid_sq().sqrt() + 14.0 * var.sqrt();
    let rule = uniform_composite_gl(0.0, r_max, radial_nodes.div_ceil(16).max(1), 16);
    let total: f64 = grid
        .nodes()
        .par_iter()
        .zip(grid.weights().par_iter())
        .map(|(nd, w)| {
            let n = nd.n_hat();
            let inner = rule.integrate(|r| {
                let fut = corr(FourVector::new(r, r * n[0], r * n[1], r * n[2]));
                let past = corr(FourVector::new(-r, r * n[0], r * n[1], r * n[2]));
                0.5 * r * (fut - past)
            });
            w * inner
        })
        .sum();
    total / (2.0 * PI)
}

/// One refinement level of the gauge commutator check.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementLevel {
    pub level: u32,
    pub cone_order: usize,
    pub terms: CommutatorTerms,
    pub rhs: f64,
    pub residual: f64,
}

/// {V_K₁, V_K₂} against 4π∬K₁𝒟K₂ at successive quadrature refinements.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorCheck {
    pub lhs: f64,
    pub levels: Vec<RefinementLevel>,
    pub monotone: bool,
}

impl CommutatorCheck {
    pub fn final_residual(&self) -> f64 {
        self.levels.last().map_or(f64::NAN, |l| l.residual)
    }
}

/// Cone order used by the commutator quadrature at a refinement level.
pub fn refinement_order(level: u32) -> usize {
    4 << level
}

pub fn gauge_commutator_check(
    k1: &GaussianCurrent,
    k2: &GaussianCurrent,
    rho: &SmearingRho,
    lhs_grid: &ConeGrid,
    settings: &SymplecticSettings,
    levels: &[u32],
) -> Result<CommutatorCheck> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("at least one refinement level is required".into()));
    }
    let v1 = gauge_profile(*k1, *rho, "K1");
    let v2 = gauge_profile(*k2, *rho, "K2");
    let lhs = symplectic_form(&v1, &v2, SymplecticMethod::SpectralPv, lhs_grid, settings)?;
    let mut out = Vec::new();
    for &level in levels {
        let order = refinement_order(level);
        let grid = make_grid(order)?;
        let terms = smeared_commutator(k1, k2, rho, &grid, level);
        let rhs = terms.total();
        let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        out.push(RefinementLevel { level, cone_order: order, terms, rhs, residual });
    }
    let monotone = out.windows(2).all(|w| w[1].residual <= w[0].residual || w[1].residual < 1e-9);
    Ok(CommutatorCheck { lhs, levels: out, monotone })
}

/// Timelike tail K(x) = x σ(x) with σ(−τv) = −A τ⁻⁴ e^{−β(v⁰)²}(1 − e^{−τ²})
/// for future unit v and τ > 0; supported in the past cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimelikeTail {
    pub amplitude: f64,
    pub beta: f64,
}

impl TimelikeTail {
    fn chi_max(&self) -> f64 {
        (40.0 / self.beta).sqrt().max(1.0).acosh()
    }

    /// (W⁰, W_∥, S) at s < 0, with W = (W⁰, W_∥ n̂) and S = ∫δ(s − x·l)σ.
    fn radon(&self, s: f64) -> (f64, f64, f64) {
        if s >= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let chi = uniform_composite_gl(0.0, self.chi_max(), 8, 16);
        let cos_rule = crate::numerics::quadrature::gauss_legendre(48);
        let mut out = (0.0, 0.0, 0.0);
        for (x, wx) in chi.nodes.iter().zip(&chi.weights) {
            let (ch, sh) = (x.cosh(), x.sinh());
            let b = self.amplitude * (-self.beta * ch * ch).exp();
            for (c, wc) in cos_rule.nodes.iter().zip(&cos_rule.weights) {
                let vl = ch - sh * c;
                let tau = -s / vl;
                let f = 2.0 * PI * wx * wc * sh * sh * b * (1.0 - (-tau * tau).exp()) / vl;
                out.0 += f * ch;
                out.1 += f * sh * c;
                out.2 -= f / tau;
            }
        }
        out
    }
}

/// Test current with an optional Schwartz part and an optional timelike tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCurrent {
    pub schwartz: Option<GaussianCurrent>,
    pub tail: Option<TimelikeTail>,
}

/// Fitted power-law decay of a sampled function over |s| ∈ [s₀, s₁].
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub s0: f64,
    pub s1: f64,
    pub exponent: f64,
    pub max_abs: f64,
}

/// U_K, Y_K along one direction with decay fits on the past side.
#[derive(Debug, Clone, Serialize)]
pub struct TailDecomposition {
    pub n: [f64; 3],
    pub s: Vec<f64>,
    pub u: Vec<[f64; 4]>,
    pub y: Vec<[f64; 4]>,
    pub u_decay: DecayFit,
    pub y_decay: DecayFit,
    /// |U_K| at the most negative sample relative to |W| there
    pub u_over_w: f64,
}

impl TailDecomposition {
    /// Both pieces decay faster than |s|⁻⁴ over the sampled decade.
    pub fn decays_fast(&self) -> bool {
        let ok = |d: &DecayFit| d.exponent < -4.0 || d.max_abs < 1e-13;
        ok(&self.u_decay) && ok(&self.y_decay)
    }
}

/// Sampled pieces on the hyperplane x·l = s: W, X_l = ∫δ x (l·K), l·W.
struct HyperplaneData {
    w: [f64; 4],
    x_l: [f64; 4],
    lw: f64,
}

fn hyperplane_data(k: &TailCurrent, n: [f64; 3], s: f64) -> HyperplaneData {
    let mut out = HyperplaneData { w: [0.0; 4], x_l: [0.0; 4], lw: 0.0 };
    if let Some(g) = &k.schwartz {
        let r = radon_gaussian(g, n, &[s]);
        let l = FourVector::null(n);
        let v = [1.0, -n[0], -n[1], -n[2]];
        let cl = FourVector(g.direction).dot(&l);
        let sp = s - g.profile.center.dot(&l);
        let rg = r.w[0].iter().zip(&g.direction).find(|(_, c)| **c != 0.0).map_or(0.0, |(w, c)| w / c);
        for b in 0..4 {
            out.w[b] += r.w[0][b];
            out.x_l[b] += cl * (g.profile.center[b] + v[b] * sp / 2.0) * rg;
        }
        out.lw += mdot(&r.w[0], &[1.0, n[0], n[1], n[2]]);
    }
    if let Some(t) = &k.tail {
        let (w0, wpar, sig) = t.radon(s);
        let w = [w0, wpar * n[0], wpar * n[1], wpar * n[2]];
        for b in 0..4 {
            out.w[b] += w[b];
            out.x_l[b] += s * w[b];
        }
        out.lw += s * sig;
    }
    out
}

fn u_and_y(k: &TailCurrent, rho: &SmearingRho, n: [f64; 3], s: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let d = hyperplane_data(k, n, s);
    let l = [1.0, n[0], n[1], n[2]];
    let (z, zp) = (rho.zeta(s), rho.zeta_prime(s));
    let (e, ep) = (rho.eta_scalar(s), rho.eta_scalar_prime(s));
    let u = std::array::from_fn(|a| d.w[a] - z * d.x_l[a] + e * METRIC[a] * l[a] * d.lw);
    let y = std::array::from_fn(|a| z * d.w[a] + zp * d.x_l[a] - ep * METRIC[a] * l[a] * d.lw);
    (u, y, d.w)
}

fn fit_decay(s: &[f64], v: &[[f64; 4]]) -> DecayFit {
    let mags: Vec<f64> = v.iter().map(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
    let max_abs = mags.iter().cloned().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> =
        s.iter().zip(&mags).filter(|(_, m)| **m > 0.0).map(|(x, m)| (x.abs().ln(), m.ln())).collect();
    let exponent = if pts.len() < 2 {
        f64::NEG_INFINITY
    } else {
        let np = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / np, pts.iter().map(|p| p.1).sum::<f64>() / np);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let abs: Vec<f64> = s.iter().map(|x| x.abs()).collect();
    DecayFit { s0: abs.iter().cloned().fold(f64::INFINITY, f64::min), s1: abs.iter().cloned().fold(0.0, f64::max), exponent, max_abs }
}

/// U_K and Y_K along direction `n`, sampled on the past decade s ∈ −[s₀, 10 s₀].
pub fn tail_decomposition(k: &TailCurrent, rho: &SmearingRho, n: [f64; 3], s0: f64, samples: usize) -> TailDecomposition {
    let samples = samples.max(2);
    let s: Vec<f64> =
        (0..samples).map(|i| -s0 * 10f64.powf(i as f64 / (samples - 1) as f64)).collect();
    let parts: Vec<_> = s.par_iter().map(|x| u_and_y(k, rho, n, *x)).collect();
    let u: Vec<[f64; 4]> = parts.iter().map(|p| p.0).collect();
    let y: Vec<[f64; 4]> = parts.iter().map(|p| p.1).collect();
    let norm = |v: &[f64; 4]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let last = parts.last().expect("non-empty");
    let u_over_w = norm(&last.0) / norm(&last.2).max(f64::MIN_POSITIVE);
    TailDecomposition { n, u_decay: fit_decay(&s, &u), y_decay: fit_decay(&s, &y), s, u, y, u_over_w }
}

/// Y_K(s, l) of a Gaussian current by direct quadrature of K·∂κ over the
/// hyperplane x·l = s, with ∂κ from centred differences of κ.
pub fn y_direct(k: &GaussianCurrent, rho: &SmearingRho, n: [f64; 3], s: f64, nodes: usize) -> [f64; 4] {
    let l = FourVector::null(n);
    let kappa = |x: &FourVector| -> [f64; 4] {
        let xl = x.dot(&l);
        let (z, e) = (rho.zeta(xl), rho.eta_scalar(xl));
        std::array::from_fn(|b| x[b] * z - e * METRIC[b] * l[b])
    };
    let c = k.profile.center;
    let rules: Vec<Rule> = (1..4).map(|i| crate::numerics::quadrature::gauss_hermite_scaled(nodes, c[i], k.profile.sigma)).collect();
    let h = 1e-4;
    let mut out = [0.0; 4];
    for (x1, w1) in rules[0].nodes.iter().zip(&rules[0].weights) {
        for (x2, w2) in rules[1].nodes.iter().zip(&rules[1].weights) {
            for (x3, w3) in rules[2].nodes.iter().zip(&rules[2].weights) {
                let x0 = s + n[0] * x1 + n[1] * x2 + n[2] * x3;
                let x = FourVector::new(x0, *x1, *x2, *x3);
                let g0 = (-(x0 - c[0]).powi(2) / (2.0 * k.profile.sigma.powi(2))).exp();
                let w = w1 * w2 * w3 * g0;
                for a in 0..4 {
                    let mut e = [0.0; 4];
                    e[a] = h;
                    let (kp, km) = (kappa(&(x + FourVector(e))), kappa(&(x - FourVector(e))));
                    for b in 0..4 {
                        out[b] += w * k.direction[a] * (kp[b] - km[b]) / (2.0 * h);
                    }
                }
            }
        }
    }
    out
}

/// max_s |U̇_K + Y_K − V̇_K| / max_s |V̇_K| for a Gaussian current, with V̇_K(s)
/// synthesized from the spectral profile on a uniform grid.
pub fn u_y_identity_residual(k: &GaussianCurrent, rho: &SmearingRho, n: [f64; 3]) -> f64 {
    let grid = crate::numerics::fourier::UniformGrid::new(1024, 2.0 * PI / 96.0);
    let prof = GaugeProfile::new(Arc::new(*k), *rho);
    let comps: Vec<Vec<C64>> = {
        let spec: Vec<CVec4> = grid.omegas().par_iter().map(|w| prof.vdot(*w, n)).collect();
        (0..4).map(|a| grid.to_s(&spec.iter().map(|v| v[a]).collect::<Vec<_>>())).collect()
    };
    let l = FourVector::null(n);
    let lv = [1.0, n[0], n[1], n[2]];
    let v = [1.0, -n[0], -n[1], -n[2]];
    let cl = FourVector(k.direction).dot(&l);
    let sig2 = k.profile.sigma.powi(2);
    let a = k.profile.center;
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (j, &s) in grid.s_values().iter().enumerate() {
        if s.abs() > 20.0 {
            continue;
        }
        let r = radon_gaussian(k, n, &[s]);
        let sp = s - a.dot(&l);
        let rg = (2.0 * PI * sig2).powf(1.5) / 2f64.sqrt() * (-sp * sp / (4.0 * sig2)).exp();
        let dlog = -sp / (2.0 * sig2);
        let (z, zp) = (rho.zeta(s), rho.zeta_prime(s));
        let (e, ep) = (rho.eta_scalar(s), rho.eta_scalar_prime(s));
        let lw = mdot(&r.w[0], &lv);
        let lw_dot = lw * dlog;
        for b in 0..4 {
            let xl = cl * (a[b] + v[b] * sp / 2.0) * rg;
            let xl_dot = cl * (v[b] / 2.0 + (a[b] + v[b] * sp / 2.0) * dlog) * rg;
            let eta_b = METRIC[b] * lv[b];
            let u_dot = r.w_dot[0][b] - zp * xl - z * xl_dot + ep * eta_b * lw + e * eta_b * lw_dot;
            let y = z * r.w[0][b] + zp * xl - ep * eta_b * lw;
            let vd = comps[b][j];
            num = num.max((u_dot + y - vd.re).abs().max(vd.im.abs()));
            den = den.max(vd.norm());
        }
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Gaussian;

    fn pair() -> (GaussianCurrent, GaussianCurrent) {
        (
            GaussianCurrent::new(FourVector::new(0.2, 0.3, -0.1, 0.4), 0.8, [1.0, 0.3, -0.2, 0.5]),
            GaussianCurrent::new(FourVector::new(-0.3, 0.1, 0.5, -0.2), 0.9, [0.4, -0.6, 0.1, 0.2]),
        )
    }

    #[test]
    fn moments_to_exponent() {
        assert_eq!(SmearingRho::new(0).k, 1);
        assert_eq!(SmearingRho::new(1).k, 1);
        assert_eq!(SmearingRho::new(3).k, 2);
        assert_eq!(SmearingRho::new(4).k, 3);
    }

    #[test]
    fn gradient_matches_differences() {
        let rho = SmearingRho::default();
        let p = FourVector::new(0.3, -0.4, 0.2, 0.5);
        let g = rho.grad_rho_hat(&p);
        for a in 0..4 {
            let mut e = [0.0; 4];
            e[a] = 1e-6;
            let d = (rho.rho_hat(&(p + FourVector(e))) - rho.rho_hat(&(p - FourVector(e)))) / 2e-6;
            assert!((g[a] - METRIC[a] * d).abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_profile_is_transverse() {
        let (k1, _) = pair();
        let v = gauge_profile(k1, SmearingRho::default(), "K");
        let n = crate::numerics::sph::direction(0.7, 1.9);
        let l = FourVector::null(n);
        for w in [-2.0, -0.4, 0.0, 0.3, 1.1, 3.0] {
            let vd = v.vdot(w, n);
            assert!(vd.dot_real(&l).norm() < 1e-10 * vd.norm().max(1e-3), "ω = {w} {} {}", vd.dot_real(&l).norm(), vd.norm());
        }
    }

    #[test]
    fn conserved_currents_are_unchanged() {
        let j = crate::profiles::CurlCurrent::new(FourVector::new(0.1, 0.0, 0.2, 0.0), 0.9, [0.3, 1.0, -0.4, 0.2, 0.7, -1.1]);
        let plain = crate::profiles::profile_from_current(j, "J");
        let n = crate::numerics::sph::direction(1.2, 0.4);
        let rho = SmearingRho::default();
        let gauge = gauge_profile(j, rho, "J");
        for w in [-1.5, 0.2, 2.0] {
            let d = gauge.vdot(w, n) - plain.vdot(w, n);
            assert!(d.norm() < 1e-12, "{w}: {}", d.norm());
        }
    }

    #[test]
    fn commutator_is_antisymmetric() {
        let (k1, k2) = pair();
        let grid = make_grid(8).unwrap();
        let rho = SmearingRho::default();
        let a = smeared_commutator(&k1, &k2, &rho, &grid, 1).total();
        let b = smeared_commutator(&k2, &k1, &rho, &grid, 1).total();
        assert!((a + b).abs() < 1e-6 * a.abs(), "{a} {b}");
    }

    #[test]
    fn kernel_derivatives_match_differences() {
        let rho = SmearingRho::default();
        for s in [-3.0, -0.4, 0.7, 5.0] {
            let h = 1e-5;
            let dz = (rho.zeta(s + h) - rho.zeta(s - h)) / (2.0 * h);
            let de = (rho.eta_scalar(s + h) - rho.eta_scalar(s - h)) / (2.0 * h);
            assert!((dz - rho.zeta_prime(s)).abs() < 1e-8);
            assert!((de - rho.eta_scalar_prime(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn u_plus_y_reproduces_profile() {
        let (k1, _) = pair();
        let n = crate::numerics::sph::direction(0.9, 2.3);
        let r = u_y_identity_residual(&k1, &SmearingRho::default(), n);
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn y_matches_direct_quadrature() {
        let (k1, _) = pair();
        let rho = SmearingRho::default();
        let n = crate::numerics::sph::direction(0.9, 2.3);
        let tc = TailCurrent { schwartz: Some(k1), tail: None };
        for s in [-0.8, 0.5] {
            let (_, y, _) = u_and_y(&tc, &rho, n, s);
            let d = y_direct(&k1, &rho, n, s, 24);
            for b in 0..4 {
                assert!((y[b] - d[b]).abs() < 1e-8 * y.iter().map(|c| c.abs()).fold(0.0, f64::max), "{s} {b}");
            }
        }
    }

    #[test]
    fn tail_pieces_decay() {
        let tc = TailCurrent { schwartz: None, tail: Some(TimelikeTail { amplitude: 1.0, beta: 1.0 }) };
        let d = tail_decomposition(&tc, &SmearingRho::default(), crate::numerics::sph::direction(0.6, 0.3), 8.0, 9);
        assert!(d.decays_fast(), "{:?} {:?}", d.u_decay, d.y_decay);
    }

    #[test]
    fn pauli_jordan_representations_agree() {
        let f1 = Gaussian::new(FourVector::new(0.4, 0.2, -0.3, 0.1), 0.7);
        let f2 = Gaussian::new(FourVector::new(-0.5, 0.1, 0.2, -0.4), 0.8);
        let grid = make_grid(16).unwrap();
        let cone = smeared_pauli_jordan_cone(&f1, &f2, &grid);
        let direct = smeared_pauli_jordan_direct(&f1, &f2, &grid, 128);
        assert!((cone - direct).abs() < 1e-7 * cone.abs(), "{cone} {direct}");
    }
}
