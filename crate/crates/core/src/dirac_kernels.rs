//! Dirac-representation gamma matrices, on-shell projectors, the first-order
//! Dirac smearing kernels V̇_χ and Φ_χ, the asymptotic smearing factor G_Λ and
//! the split of the G_Λ-modified kernel into V̇¹ + V̇².

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{packet_kernel_f_radial, packet_kernel_f_radial_derivative, BumpFunction};
use crate::cone_geometry::{ConeGrid, Spectral, VectorField};
use crate::fock_sim::CovarianceB;
use crate::ir_projection::project_ir_truncated;
use crate::numerics::minkowski::{CVec4, FourVector};
use crate::numerics::quadrature::{uniform_composite_gl, Rule};
use crate::profiles::{omega_rule, HFunction};
use crate::radial_gauge::SmearingRho;
use crate::{Error, Result};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// 4×4 complex matrix acting on bispinors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BispinorMatrix(pub [[C64; 4]; 4]);

impl BispinorMatrix {
    pub fn zero() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Add for BispinorMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + o.0[i][j])))
    }
}

impl Sub for BispinorMatrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - o.0[i][j])))
    }
}

impl Mul for BispinorMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum())))
    }
}

/// Row bispinor (a barred spinor).
pub type RowSpinor = [C64; 4];

/// Row spinor times matrix.
pub fn row_mul(row: &RowSpinor, m: &BispinorMatrix) -> RowSpinor {
    std::array::from_fn(|j| (0..4).map(|k| row[k] * m.0[k][j]).sum())
}

/// γ^a in the Dirac representation.
pub fn gamma(a: usize) -> BispinorMatrix {
    let z = ZERO;
    let o = ONE;
    let m = match a {
        0 => [[o, z, z, z], [z, o, z, z], [z, z, -o, z], [z, z, z, -o]],
        1 => [[z, z, z, o], [z, z, o, z], [z, -o, z, z], [-o, z, z, z]],
        2 => [[z, z, z, -I], [z, z, I, z], [z, I, z, z], [-I, z, z, z]],
        3 => [[z, z, o, z], [z, z, z, -o], [-o, z, z, z], [z, o, z, z]],
        _ => panic!("gamma index {a} out of range"),
    };
    BispinorMatrix(m)
}

/// γ·p = γ^a p_a.
pub fn slash(p: &FourVector) -> BispinorMatrix {
    (0..4).fold(BispinorMatrix::zero(), |acc, a| acc + gamma(a).scale(C64::new(METRIC[a] * p[a], 0.0)))
}

/// Momentum q on the mass hyperboloid together with a sign ε; r = εq.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnShellMomentum {
    pub q: FourVector,
    pub mass: f64,
    pub eps: f64,
}

impl OnShellMomentum {
    pub fn new(q_bar: [f64; 3], mass: f64, eps: f64) -> Result<Self> {
        if mass <= 0.0 {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if eps.abs() != 1.0 {
            return Err(Error::InvalidArgument(format!("sign must be ±1, got {eps}")));
        }
        let e = (mass * mass + q_bar.iter().map(|x| x * x).sum::<f64>()).sqrt();
        Ok(Self { q: FourVector::new(e, q_bar[0], q_bar[1], q_bar[2]), mass, eps })
    }

    pub fn r(&self) -> FourVector {
        self.q.scale(self.eps)
    }
}

/// P(εp) = (m + ε γ·p)/2m for p on the hyperboloid of mass m.
pub fn projector(eps: f64, p: &FourVector, mass: f64) -> Result<BispinorMatrix> {
    let p2 = p.square();
    if mass <= 0.0 || (p2 - mass * mass).abs() > 1e-10 * p.euclid_sq().max(mass * mass) || p[0] <= 0.0 {
        return Err(Error::InvalidArgument(format!("p is not on the forward mass shell (p² = {p2}, m = {mass})")));
    }
    let m = BispinorMatrix::identity().scale(C64::new(mass, 0.0)) + slash(p).scale(C64::new(eps, 0.0));
    Ok(m.scale(C64::new(0.5 / mass, 0.0)))
}

/// Test spinor χ̂(p) = ξ (1 + c·(p − p₀)) exp(−|p − p₀|²_E / 2w²), with the
/// polynomial dot taken Euclidean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiFunction {
    #[serde(skip)]
    pub spinor: [C64; 4],
    pub center: FourVector,
    pub width: f64,
    pub poly: [f64; 4],
}

impl ChiFunction {
    pub fn new(spinor: [C64; 4], center: FourVector, width: f64, poly: [f64; 4]) -> Self {
        Self { spinor, center, width, poly }
    }

    pub fn chi_hat(&self, p: &FourVector) -> [C64; 4] {
        let d = *p - self.center;
        let g = (-d.euclid_sq() / (2.0 * self.width * self.width)).exp();
        let poly = 1.0 + (0..4).map(|a| self.poly[a] * d[a]).sum::<f64>();
        self.spinor.map(|x| x * (g * poly))
    }

    fn bar_spinor(&self) -> RowSpinor {
        std::array::from_fn(|j| self.spinor[j].conj() * if j < 2 { 1.0 } else { -1.0 })
    }
}

/// Source of χ̄̂(p) and its contravariant momentum gradient.
pub trait ChiSource: Sync {
    fn bar(&self, p: &FourVector) -> RowSpinor;
    /// `out[a]` is g^{ab} ∂χ̄̂/∂p^b.
    fn grad_bar(&self, p: &FourVector) -> [RowSpinor; 4];
}

impl ChiSource for ChiFunction {
    fn bar(&self, p: &FourVector) -> RowSpinor {
        let d = *p - self.center;
        let g = (-d.euclid_sq() / (2.0 * self.width * self.width)).exp();
        let poly = 1.0 + (0..4).map(|a| self.poly[a] * d[a]).sum::<f64>();
        self.bar_spinor().map(|x| x * (g * poly))
    }

    fn grad_bar(&self, p: &FourVector) -> [RowSpinor; 4] {
        let d = *p - self.center;
        let w2 = self.width * self.width;
        let g = (-d.euclid_sq() / (2.0 * w2)).exp();
        let poly = 1.0 + (0..4).map(|a| self.poly[a] * d[a]).sum::<f64>();
        let bs = self.bar_spinor();
        std::array::from_fn(|a| {
            let da = (self.poly[a] - poly * d[a] / w2) * g * METRIC[a];
            bs.map(|x| x * da)
        })
    }
}

/// Vector of row spinors, indexed [a][β].
pub type SpinorVector = [RowSpinor; 4];

fn sv_zero() -> SpinorVector {
    [[ZERO; 4]; 4]
}

fn sv_axpy(acc: &mut SpinorVector, s: C64, x: &SpinorVector) {
    for a in 0..4 {
        for b in 0..4 {
            acc[a][b] += s * x[a][b];
        }
    }
}

fn sv_times_matrix(v: &SpinorVector, m: &BispinorMatrix) -> SpinorVector {
    v.map(|row| row_mul(&row, m))
}

/// Largest component modulus of a spinor vector.
pub fn sv_max_abs(v: &SpinorVector) -> f64 {
    v.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// l_a V^a as a row spinor.
pub fn sv_contract(v: &SpinorVector, l: &FourVector) -> RowSpinor {
    std::array::from_fn(|b| (0..4).map(|a| v[a][b] * (METRIC[a] * l[a])).sum())
}

/// Kernel machinery shared by V̇_χ, Φ_χ and the V̇¹/V̇² split.
#[derive(Debug, Clone)]
pub struct DiracKernel {
    pub rho: SmearingRho,
    pub mass: f64,
    pub charge: f64,
    u_rule: Rule,
    log_rule: Rule,
}

impl DiracKernel {
    pub fn new(rho: SmearingRho, mass: f64, charge: f64) -> Self {
        let cut = 1.2 * rho.cutoff();
        Self {
            rho,
            mass,
            charge,
            u_rule: uniform_composite_gl(0.0, cut, 16, 12),
            log_rule: omega_rule(1e-10, cut, 4, 12),
        }
    }

    fn prefactor(&self) -> C64 {
        C64::new(0.0, self.charge / (2.0 * PI).powf(1.5))
    }

    fn projector(&self, r: &OnShellMomentum) -> BispinorMatrix {
        projector(r.eps, &r.q, self.mass).expect("on-shell by construction")
    }

    /// ∂[ρ̂(ul) χ̄̂(p)] with contravariant index.
    fn d_product(&self, chi: &dyn ChiSource, u: f64, l: &FourVector, p: &FourVector) -> SpinorVector {
        let ul = l.scale(u);
        let gr = self.rho.grad_rho_hat(&ul);
        let rh = self.rho.rho_hat(&ul);
        let bar = chi.bar(p);
        let gb = chi.grad_bar(p);
        std::array::from_fn(|a| std::array::from_fn(|b| bar[b] * gr[a] + gb[a][b] * rh))
    }

    /// χ̄̂(p)(r^a − ½ ω l̸ γ^a)/(r·l).
    fn leading(&self, chi: &dyn ChiSource, omega: f64, l: &FourVector, r: &FourVector) -> SpinorVector {
        let p0 = *r - l.scale(omega);
        let bar = chi.bar(&p0);
        let rl = r.dot(l);
        let ls = slash(l);
        std::array::from_fn(|a| {
            let m = BispinorMatrix::identity().scale(C64::new(r[a], 0.0)) - (ls * gamma(a)).scale(C64::new(0.5 * omega, 0.0));
            row_mul(&bar, &m).map(|x| x / rl)
        })
    }

    /// V̇̃_χ(ω, l, r) for an arbitrary χ̄̂ source.
    pub fn vdot_with(&self, chi: &dyn ChiSource, omega: f64, n: [f64; 3], r: &OnShellMomentum) -> SpinorVector {
        let l = FourVector::null(n);
        let rv = r.r();
        let mut acc = self.leading(chi, omega, &l, &rv);
        let base = rv - l.scale(omega);
        for (u, w) in self.u_rule.nodes.iter().zip(&self.u_rule.weights) {
            let plus = self.d_product(chi, *u, &l, &(base + l.scale(*u)));
            let minus = self.d_product(chi, -*u, &l, &(base - l.scale(*u)));
            sv_axpy(&mut acc, C64::new(PI * w, 0.0), &plus);
            sv_axpy(&mut acc, C64::new(-PI * w, 0.0), &minus);
        }
        let pm = self.projector(r);
        sv_times_matrix(&acc, &pm).map(|row| row.map(|x| x * self.prefactor()))
    }

    pub fn vdot(&self, chi: &ChiFunction, omega: f64, n: [f64; 3], r: &OnShellMomentum) -> SpinorVector {
        self.vdot_with(chi, omega, n, r)
    }

    /// Φ_χ(l, r) for any l with r·l ≠ 0 (l need not be null).
    pub fn phase(&self, chi: &dyn ChiSource, l: &FourVector, r: &OnShellMomentum) -> RowSpinor {
        let rv = r.r();
        let rl = rv.dot(l).abs();
        let du = |u: f64| -> RowSpinor {
            let ul = l.scale(u);
            let p = rv + ul;
            let gr = self.rho.grad_rho_hat(&ul);
            let rh = self.rho.rho_hat(&ul);
            let bar = chi.bar(&p);
            let gb = chi.grad_bar(&p);
            let l_gr = (0..4).map(|a| METRIC[a] * l[a] * gr[a]).sum::<f64>();
            std::array::from_fn(|b| {
                let l_gb: C64 = (0..4).map(|a| gb[a][b] * (METRIC[a] * l[a])).sum();
                bar[b] * l_gr + l_gb * rh
            })
        };
        let mut acc = [ZERO; 4];
        for (u, w) in self.log_rule.nodes.iter().zip(&self.log_rule.weights) {
            let lg = (u * rl).ln();
            let (p, m) = (du(*u), du(-*u));
            for b in 0..4 {
                acc[b] += (p[b] - m[b]) * (w * lg);
            }
        }
        let pref = C64::new(0.0, -self.charge / (2.0 * (2.0 * PI).sqrt()));
        row_mul(&acc, &self.projector(r)).map(|x| x * pref)
    }

    /// Contravariant l-gradient of Φ_χ by centred differences off the cone.
    pub fn phase_gradient(&self, chi: &dyn ChiSource, n: [f64; 3], r: &OnShellMomentum) -> SpinorVector {
        let l = FourVector::null(n);
        let h = 1e-5;
        std::array::from_fn(|a| {
            let mut e = [0.0; 4];
            e[a] = h;
            let e = FourVector(e);
            let (p, m) = (self.phase(chi, &(l + e), r), self.phase(chi, &(l - e), r));
            std::array::from_fn(|b| (p[b] - m[b]) * (METRIC[a] / (2.0 * h)))
        })
    }
}

/// G[m̄, d, Λ] tabulated in μ = √p² for both signs of p⁰, with Hermite
/// interpolation. Below `mu_min` the factor is set to zero.
#[derive(Debug, Clone)]
pub struct GTable {
    pub mbar: f64,
    pub lambda: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    step: f64,
    /// per sign (+, −): (G, dG/dμ) on the μ grid
    values: [Vec<(C64, C64)>; 2],
}

/// G[m̄, d, Λ](μ, sgn p⁰) and its μ-derivative by quadrature of the defining λ-integral.
pub fn g_factor_radial(mbar: f64, d: &BumpFunction, lambda: f64, mu: f64, sign: f64) -> (C64, C64) {
    let r = d.rule();
    let mut g = ZERO;
    let mut dg = ZERO;
    for (s, w) in r.nodes.iter().zip(&r.weights) {
        let lam = lambda * s;
        let amp = (2.0 * PI).sqrt() * (lam * mbar.abs()).powf(1.5) * d.value(*s) * w;
        let phase = C64::from_polar(amp, -sign * (lam * mbar + 0.75 * PI));
        g += phase * packet_kernel_f_radial(lam * mu, sign);
        dg += phase * packet_kernel_f_radial_derivative(lam * mu, sign) * lam;
    }
    (g, dg)
}

/// G[m̄, d, Λ](p) by direct λ-quadrature.
pub fn g_factor(mbar: f64, d: &BumpFunction, lambda: f64, p: &FourVector) -> Result<C64> {
    let p2 = p.square();
    if p2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("G needs p² > 0, got {p2}")));
    }
    Ok(g_factor_radial(mbar, d, lambda, p2.sqrt(), p[0].signum()).0)
}

/// Large-Λ form 2π(|m̄|/√p²)^{3/2} d̃(Λ sgn(p⁰)(√p² − m̄)).
pub fn g_factor_asymptotic(mbar: f64, d: &BumpFunction, lambda: f64, p: &FourVector) -> Result<C64> {
    let p2 = p.square();
    if p2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("G needs p² > 0, got {p2}")));
    }
    let mu = p2.sqrt();
    Ok(d.fourier(lambda * p[0].signum() * (mu - mbar)) * (2.0 * PI * (mbar.abs() / mu).powf(1.5)))
}

impl GTable {
    pub fn new(mbar: f64, d: &BumpFunction, lambda: f64, mu_min: f64, mu_max: f64) -> Self {
        let scale = 1.0 / (lambda * (d.b - d.a).max(1e-3));
        let step = (scale / 16.0).min(4e-3);
        let n = ((mu_max - mu_min) / step).ceil() as usize + 1;
        let mus: Vec<f64> = (0..n).map(|i| mu_min + i as f64 * step).collect();
        let values = [1.0, -1.0].map(|sg| mus.par_iter().map(|mu| g_factor_radial(mbar, d, lambda, *mu, sg)).collect());
        Self { mbar, lambda, mu_min, mu_max, step, values }
    }

    /// (G, dG/dμ) at p; zero outside [mu_min, mu_max] or for p² ≤ 0.
    pub fn eval(&self, p: &FourVector) -> (C64, C64) {
        let p2 = p.square();
        if p2 <= 0.0 {
            return (ZERO, ZERO);
        }
        let mu = p2.sqrt();
        if mu < self.mu_min || mu >= self.mu_max {
            return (ZERO, ZERO);
        }
        let tab = &self.values[if p[0] > 0.0 { 0 } else { 1 }];
        let x = (mu - self.mu_min) / self.step;
        let i = (x.floor() as usize).min(tab.len() - 2);
        let t = x - i as f64;
        let (g0, d0) = tab[i];
        let (g1, d1) = tab[i + 1];
        let h = self.step;
        let (h00, h10, h01, h11) =
            (2.0 * t.powi(3) - 3.0 * t * t + 1.0, t.powi(3) - 2.0 * t * t + t, -2.0 * t.powi(3) + 3.0 * t * t, t.powi(3) - t * t);
        let (e00, e10, e01, e11) = (6.0 * t * t - 6.0 * t, 3.0 * t * t - 4.0 * t + 1.0, -6.0 * t * t + 6.0 * t, 3.0 * t * t - 2.0 * t);
        let g = g0 * h00 + d0 * (h10 * h) + g1 * h01 + d1 * (h11 * h);
        let dg = (g0 * e00 + g1 * e01) / h + d0 * e10 + d1 * e11;
        (g, dg)
    }
}

/// χ̄̂ G_Λ as a χ source.
pub struct GModified<'a> {
    pub chi: &'a ChiFunction,
    pub table: &'a GTable,
}

impl ChiSource for GModified<'_> {
    fn bar(&self, p: &FourVector) -> RowSpinor {
        let (g, _) = self.table.eval(p);
        self.chi.bar(p).map(|x| x * g)
    }

    fn grad_bar(&self, p: &FourVector) -> [RowSpinor; 4] {
        let (g, dg) = self.table.eval(p);
        let bar = self.chi.bar(p);
        let gb = self.chi.grad_bar(p);
        let mu = p.square().max(f64::MIN_POSITIVE).sqrt();
        std::array::from_fn(|a| std::array::from_fn(|b| gb[a][b] * g + bar[b] * dg * (p[a] / mu)))
    }
}

/// V̇¹_Λ, V̇²_Λ and the directly G-modified kernel at one (ω, l, r).
#[derive(Debug, Clone)]
pub struct VSplit {
    pub v1: SpinorVector,
    pub v2: SpinorVector,
    pub direct: SpinorVector,
    pub residual: f64,
}

impl DiracKernel {
    /// V̇¹_Λ(ω, l, r).
    pub fn v1(&self, chi: &ChiFunction, table: &GTable, omega: f64, n: [f64; 3], r: &OnShellMomentum) -> SpinorVector {
        let l = FourVector::null(n);
        let rv = r.r();
        let rl = rv.dot(&l);
        let base = rv - l.scale(omega);
        let piece = |u: f64| -> SpinorVector {
            let ul = l.scale(u);
            let p = base + ul;
            let (g, _) = table.eval(&p);
            if g == ZERO {
                return sv_zero();
            }
            let dp = self.d_product(chi, u, &l, &p);
            let rh = self.rho.rho_hat(&ul);
            let gr = self.rho.grad_rho_hat(&ul);
            let d_rho = (0..4).map(|a| METRIC[a] * l[a] * gr[a]).sum::<f64>();
            let bar = chi.bar(&p);
            let gb = chi.grad_bar(&p);
            let l_gb: RowSpinor = std::array::from_fn(|b| (0..4).map(|a| gb[a][b] * (METRIC[a] * l[a])).sum());
            std::array::from_fn(|a| {
                std::array::from_fn(|b| {
                    let du = (bar[b] * (l[a] * rh) + (bar[b] * d_rho + l_gb[b] * rh) * p[a]) / rl;
                    (dp[a][b] - du) * g
                })
            })
        };
        let mut acc = sv_zero();
        for (u, w) in self.u_rule.nodes.iter().zip(&self.u_rule.weights) {
            sv_axpy(&mut acc, C64::new(PI * w, 0.0), &piece(*u));
            sv_axpy(&mut acc, C64::new(-PI * w, 0.0), &piece(-*u));
        }
        sv_times_matrix(&acc, &self.projector(r)).map(|row| row.map(|x| x * self.prefactor()))
    }

    /// V̇²_Λ(ω, l, r).
    pub fn v2(&self, chi: &ChiFunction, table: &GTable, omega: f64, n: [f64; 3], r: &OnShellMomentum) -> SpinorVector {
        let l = FourVector::null(n);
        let rv = r.r();
        let rl = rv.dot(&l);
        let p0 = rv - l.scale(omega);
        let (g, _) = table.eval(&p0);
        let bar = chi.bar(&p0).map(|x| x * g);
        let ls = slash(&l);
        let out: SpinorVector = std::array::from_fn(|a| {
            let m = BispinorMatrix::identity().scale(C64::new(l[a], 0.0)) - (ls * gamma(a)).scale(C64::new(0.5, 0.0));
            row_mul(&bar, &m).map(|x| x * (omega / rl))
        });
        sv_times_matrix(&out, &self.projector(r)).map(|row| row.map(|x| x * self.prefactor()))
    }

    pub fn v_split(&self, chi: &ChiFunction, table: &GTable, omega: f64, n: [f64; 3], r: &OnShellMomentum) -> VSplit {
        let v1 = self.v1(chi, table, omega, n, r);
        let v2 = self.v2(chi, table, omega, n, r);
        let direct = self.vdot_with(&GModified { chi, table }, omega, n, r);
        let mut sum = v1;
        sv_axpy(&mut sum, ONE, &v2);
        let mut diff = sum;
        sv_axpy(&mut diff, -ONE, &direct);
        let residual = sv_max_abs(&diff) / sv_max_abs(&direct).max(f64::MIN_POSITIVE);
        VSplit { v1, v2, direct, residual }
    }
}

/// One rung of the Λ ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub lambda: f64,
    pub v2_h_norm: f64,
    pub r_h_v1_norm: f64,
    /// ‖B^{½} P_ir R_h(V̇¹_Λ)‖ summed over spinor columns and momenta
    pub ir_norm: Option<f64>,
    /// largest relative spectral tail met in the IR projection
    pub ir_tail: Option<f64>,
}

/// Norms of Ṽ²_{Λ,h} and R_h(V̇¹_Λ) over a Λ ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub rungs: Vec<LadderRung>,
    pub v2_decreasing: bool,
    pub v1_decreasing: bool,
    pub ir_decreasing: Option<bool>,
    pub v2_slope: f64,
    pub v1_slope: f64,
}

/// Setting for the Λ-ladder norms.
pub struct LadderSetup<'a> {
    pub kernel: &'a DiracKernel,
    pub chi: &'a ChiFunction,
    pub r: &'a [OnShellMomentum],
    pub mbar: f64,
    pub bump: &'a BumpFunction,
    pub h: &'a HFunction,
    pub grid: &'a ConeGrid,
    pub omega: &'a Rule,
    /// harmonic setting for the B^{½} P_ir piece; the grid must be `spec.grid()`
    pub ir: Option<(&'a Spectral<'a>, &'a CovarianceB)>,
}

/// ‖B^{½} P_ir f‖ over the spinor columns of a spinor-vector field on the grid.
fn ir_piece(fields: &[SpinorVector], spec: &Spectral<'_>, cov: &CovarianceB) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut worst_tail = 0.0f64;
    for beta in 0..4 {
        let parts: Vec<[C64; 3]> = spec
            .grid()
            .nodes()
            .iter()
            .zip(fields)
            .map(|(node, f)| {
                let n = node.n_hat();
                let t = CVec4(std::array::from_fn(|a| f[a][beta])).tangent_rep(n);
                let radial: C64 = (0..3).map(|i| t[i] * n[i]).sum();
                std::array::from_fn(|i| t[i] - radial * n[i])
            })
            .collect();
        let (class, tail) = project_ir_truncated(&VectorField::from_tangent(&parts, -1), spec)?;
        worst_tail = worst_tail.max(tail);
        let b = cov.apply_power(&class, 0.5);
        total += b.dot(&b).re;
    }
    Ok((total.sqrt(), worst_tail))
}

fn sv_norm_sq(v: &SpinorVector) -> f64 {
    v.iter().flatten().map(|x| x.norm_sqr()).sum()
}

/// Regular-type norm of Ṽ²_{Λ,h} = V̇²_Λ/(iω)·(−1) (V̇²(0) = 0 so no h subtraction
/// survives) over ω of both signs, and the cone L² norm of R_h(V̇¹_Λ).
pub fn lambda_ladder(setup: &LadderSetup<'_>, lambdas: &[f64], mu_range: (f64, f64)) -> Result<LadderReport> {
    let tables = ladder_tables(setup.mbar, setup.bump, lambdas, mu_range);
    lambda_ladder_with(setup, &tables)
}

/// G_Λ tables for a ladder, reusable across χ and r.
pub fn ladder_tables(mbar: f64, bump: &BumpFunction, lambdas: &[f64], mu_range: (f64, f64)) -> Vec<(f64, GTable)> {
    lambdas.iter().map(|&lam| (lam, GTable::new(mbar, bump, lam, mu_range.0, mu_range.1))).collect()
}

/// As [`lambda_ladder`] with precomputed tables.
pub fn lambda_ladder_with(setup: &LadderSetup<'_>, tables: &[(f64, GTable)]) -> Result<LadderReport> {
    let k = setup.kernel;
    let mut rungs = Vec::with_capacity(tables.len());
    for (lam, table) in tables {
        let (lam, table) = (*lam, table);
        let per_node: Vec<(f64, Vec<SpinorVector>)> = setup
            .grid
            .nodes()
            .par_iter()
            .map(|node| {
                let n = node.n_hat();
                let mut v2n = 0.0;
                let mut rhs = Vec::with_capacity(setup.r.len());
                for r in setup.r {
                    let mut rh = sv_zero();
                    for (w, wt) in setup.omega.nodes.iter().zip(&setup.omega.weights) {
                        for sg in [1.0, -1.0] {
                            let om = sg * w;
                            let v2 = k.v2(setup.chi, table, om, n, r);
                            v2n += sv_norm_sq(&v2) / (om * om) * w * wt;
                            let v1 = k.v1(setup.chi, table, om, n, r);
                            let hh = setup.h.eval(om, n).conj();
                            sv_axpy(&mut rh, C64::new(0.0, -1.0) * hh * (wt / om), &v1);
                        }
                    }
                    rhs.push(rh);
                }
                (v2n, rhs)
            })
            .collect();
        let weights = setup.grid.weights();
        let v2: f64 = per_node.iter().zip(weights).map(|(p, w)| p.0 * w).sum();
        let v1: f64 = per_node.iter().zip(weights).map(|(p, w)| p.1.iter().map(sv_norm_sq).sum::<f64>() * w).sum();
        let (ir_norm, ir_tail) = match setup.ir {
            Some((spec, cov)) => {
                let (mut t, mut tail) = (0.0, 0.0f64);
                for ri in 0..setup.r.len() {
                    let fields: Vec<SpinorVector> = per_node.iter().map(|p| p.1[ri]).collect();
                    let (norm, tl) = ir_piece(&fields, spec, cov)?;
                    t += norm * norm;
                    tail = tail.max(tl);
                }
                (Some(t.sqrt()), Some(tail))
            }
            None => (None, None),
        };
        rungs.push(LadderRung { lambda: lam, v2_h_norm: v2.sqrt(), r_h_v1_norm: v1.sqrt(), ir_norm, ir_tail });
    }
    let dec = |f: &dyn Fn(&LadderRung) -> f64| rungs.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    let xs: Vec<f64> = rungs.iter().map(|r| r.lambda.ln()).collect();
    let slope = |f: &dyn Fn(&LadderRung) -> f64| {
        let ys: Vec<f64> = rungs.iter().map(|r| f(r).max(f64::MIN_POSITIVE).ln()).collect();
        crate::fock_sim::fit_slope(&xs, &ys)
    };
    Ok(LadderReport {
        v2_decreasing: dec(&|r| r.v2_h_norm),
        v1_decreasing: dec(&|r| r.r_h_v1_norm),
        ir_decreasing: setup.ir.map(|_| dec(&|r| r.ir_norm.unwrap_or(f64::NAN))),
        v2_slope: slope(&|r| r.v2_h_norm),
        v1_slope: slope(&|r| r.r_h_v1_norm),
        rungs,
    })
}

/// Column β of V̇̃_χ(·, ·, r) as a C⁴-valued function of (ω, n̂).
pub fn kernel_column(
    kernel: &DiracKernel,
    chi: &ChiFunction,
    r: OnShellMomentum,
    beta: usize,
) -> impl Fn(f64, [f64; 3]) -> CVec4 + Send + Sync + Clone {
    let kernel = kernel.clone();
    let chi = *chi;
    move |w, n| {
        let v = kernel.vdot(&chi, w, n, &r);
        CVec4(std::array::from_fn(|a| v[a][beta]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sph::direction;

    fn chi() -> ChiFunction {
        ChiFunction::new(
            [C64::new(1.0, 0.2), C64::new(-0.3, 0.5), C64::new(0.4, 0.0), C64::new(0.1, -0.7)],
            FourVector::new(1.2, 0.3, -0.4, 0.5),
            0.3,
            [0.2, -0.1, 0.3, 0.05],
        )
    }

    #[test]
    fn clifford_algebra() {
        for a in 0..4 {
            for b in 0..4 {
                let ac = gamma(a) * gamma(b) + gamma(b) * gamma(a);
                let expected = if a == b { 2.0 * METRIC[a] } else { 0.0 };
                let diff = ac - BispinorMatrix::identity().scale(C64::new(expected, 0.0));
                assert_eq!(diff.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn projector_algebra() {
        let q = OnShellMomentum::new([0.3, -1.2, 0.7], 1.3, 1.0).unwrap();
        let pp = projector(1.0, &q.q, 1.3).unwrap();
        let pm = projector(-1.0, &q.q, 1.3).unwrap();
        assert!(((pp + pm) - BispinorMatrix::identity()).max_abs() < 1e-15);
        assert!((pp * pp - pp).max_abs() < 1e-13);
        assert!((pp * pm).max_abs() < 1e-13);
        assert!((pp.trace() - 2.0).norm() < 1e-14);
        assert!(projector(1.0, &FourVector::new(1.0, 1.0, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn chi_gradient_matches_differences() {
        let c = chi();
        let p = FourVector::new(1.0, 0.2, -0.2, 0.6);
        let g = c.grad_bar(&p);
        for a in 0..4 {
            let mut e = [0.0; 4];
            e[a] = 1e-6;
            let (x, y) = (c.bar(&(p + FourVector(e))), c.bar(&(p - FourVector(e))));
            for b in 0..4 {
                let d = (x[b] - y[b]) / 2e-6 * METRIC[a];
                assert!((d - g[a][b]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn kernel_is_transverse() {
        let k = DiracKernel::new(SmearingRho::default(), 1.0, 1.0);
        let r = OnShellMomentum::new([0.2, -0.3, 0.4], 1.0, 1.0).unwrap();
        let n = direction(0.8, 2.1);
        let l = FourVector::null(n);
        for w in [-1.5, -0.2, 0.0, 0.4, 2.0] {
            let v = k.vdot(&chi(), w, n, &r);
            let c = sv_contract(&v, &l);
            let m = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(m < 1e-9 * sv_max_abs(&v).max(1e-6), "{w}: {m}");
        }
    }

    #[test]
    fn phase_gradient_reproduces_zero_mode() {
        let k = DiracKernel::new(SmearingRho::default(), 1.0, 1.0);
        let r = OnShellMomentum::new([0.2, -0.3, 0.4], 1.0, 1.0).unwrap();
        let c = chi();
        for n in [direction(0.8, 2.1), direction(2.5, 0.3)] {
            let g = k.phase_gradient(&c, n, &r);
            let v = k.vdot(&c, 0.0, n, &r);
            let mut d = g;
            sv_axpy(&mut d, -ONE, &v);
            assert!(sv_max_abs(&d) < 1e-6 * sv_max_abs(&v), "{} {}", sv_max_abs(&d), sv_max_abs(&v));
        }
    }

    #[test]
    fn split_sums_to_direct() {
        let k = DiracKernel::new(SmearingRho::default(), 1.0, 1.0);
        let r = OnShellMomentum::new([0.2, -0.3, 0.4], 1.0, 1.0).unwrap();
        let c = ChiFunction::new([ONE, ZERO, C64::new(0.3, 0.1), ZERO], r.q, 0.12, [0.0; 4]);
        let table = GTable::new(1.0, &BumpFunction::default(), 10.0, 0.25, 4.0);
        let s = k.v_split(&c, &table, 0.3, direction(1.1, 0.4), &r);
        assert!(s.residual < 1e-6, "{}", s.residual);
    }

    #[test]
    fn g_paths() {
        let d = BumpFunction::default();
        let p = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let g = g_factor(1.0, &d, 50.0, &p).unwrap();
        assert!((g - 1.0).norm() < 0.05, "{g}");
        let a = g_factor_asymptotic(1.0, &d, 30.0, &p).unwrap();
        let b = g_factor(1.0, &d, 30.0, &p).unwrap();
        assert!((a - b).norm() < 0.05 * a.norm());
        assert!(g_factor(1.0, &d, 10.0, &FourVector::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }
}
