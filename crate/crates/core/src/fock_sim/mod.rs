//! Truncated Fock realization of the representation π_h, covariance
//! operators and the energy content of the state ω_h.

mod covariance;
mod energy;

use std::collections::HashMap;

use num_complex::Complex64 as C64;

pub use covariance::{build_covariance, CovarianceB};
pub use energy::{energy_moments, fit_slope, mc_energy_oracle, stderr_slope, EnergyMoments, McEstimate};

use crate::cone_geometry::ConeGrid;
use crate::numerics::quadrature::Rule;
use crate::numerics::sph::lm_from_index;
use crate::profiles::{v_h, HDecomposition, HFunction, RadialProfile};
use crate::{Error, Result};

/// Element of the one-excitation space 𝓗_ir ⊕ 𝓗_reg in an orthonormal
/// coordinate system: IR harmonic coefficients scaled by √(ℓ(ℓ+1)) followed by
/// regular samples scaled by √(ω w_ω w_l).
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticle {
    pub ir: Vec<C64>,
    pub reg: Vec<C64>,
}

impl OneParticle {
    pub fn dot(&self, other: &Self) -> C64 {
        let a: C64 = self.ir.iter().zip(&other.ir).map(|(x, y)| x.conj() * y).sum();
        let b: C64 = self.reg.iter().zip(&other.reg).map(|(x, y)| x.conj() * y).sum();
        a + b
    }

    pub fn ir_dot(&self, other: &Self) -> C64 {
        self.ir.iter().zip(&other.ir).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn reg_dot(&self, other: &Self) -> C64 {
        self.reg.iter().zip(&other.reg).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).re.max(0.0).sqrt()
    }

    fn axpy(&mut self, a: C64, x: &Self) {
        for (s, v) in self.ir.iter_mut().zip(&x.ir) {
            *s += a * v;
        }
        for (s, v) in self.reg.iter_mut().zip(&x.reg) {
            *s += a * v;
        }
    }

    fn scaled(&self, a: C64) -> Self {
        Self { ir: self.ir.iter().map(|v| v * a).collect(), reg: self.reg.iter().map(|v| v * a).collect() }
    }
}

/// One-particle vector (j_h, Ṽ_h) of a profile.
pub fn one_particle(v: &RadialProfile, h: &HFunction, decomp: &HDecomposition, grid: &ConeGrid, rule: &Rule) -> OneParticle {
    let ir = decomp
        .j
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let l = lm_from_index(k).0 as f64;
            c * (l * (l + 1.0)).sqrt()
        })
        .collect();
    let mut reg = Vec::with_capacity(grid.len() * rule.len() * 3);
    for (node, wl) in grid.nodes().iter().zip(grid.weights()) {
        let n = node.n_hat();
        for (&w, &ww) in rule.nodes.iter().zip(&rule.weights) {
            let f = v_h(v, h, w, n).tangent_rep(n);
            let s = (w * ww * wl).sqrt();
            reg.extend(f.iter().map(|c| c * s));
        }
    }
    OneParticle { ir, reg }
}

/// Orthonormal modes spanning a set of one-particle vectors.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub modes: Vec<OneParticle>,
}

impl ModeBasis {
    /// Modified Gram–Schmidt with reorthogonalization; near-dependent vectors are dropped.
    pub fn span(vectors: &[OneParticle], max_modes: usize) -> Result<Self> {
        let mut modes: Vec<OneParticle> = Vec::new();
        for x in vectors {
            let mut r = x.clone();
            for _ in 0..2 {
                for e in &modes {
                    let c = e.dot(&r);
                    r.axpy(-c, e);
                }
            }
            let nr = r.norm();
            if nr > 1e-12 * x.norm().max(1e-300) && nr > 0.0 {
                if modes.len() == max_modes {
                    return Err(Error::ResolutionExceeded(format!("more than {max_modes} modes required")));
                }
                modes.push(r.scaled(C64::new(1.0 / nr, 0.0)));
            }
        }
        Ok(Self { modes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Coefficients ⟨e_m, x⟩ and the relative truncation residual.
    pub fn expand(&self, x: &OneParticle) -> (Vec<C64>, f64) {
        let c: Vec<C64> = self.modes.iter().map(|e| e.dot(x)).collect();
        let mut r = x.clone();
        for (e, ci) in self.modes.iter().zip(&c) {
            r.axpy(-ci, e);
        }
        let nx = x.norm();
        (c, if nx == 0.0 { 0.0 } else { r.norm() / nx })
    }

    /// max |⟨e_i, e_j⟩ − δ_ij|
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).norm());
            }
        }
        worst
    }
}

/// Sparse complex matrix in coordinate form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect() }
    }

    fn dense(&self) -> HashMap<(usize, usize), C64> {
        let mut m = HashMap::new();
        for &(r, c, v) in &self.entries {
            *m.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        m
    }

    /// max |A_rc − B_rc| over the union of stored entries.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let a = self.dense();
        let b = other.dense();
        let zero = C64::new(0.0, 0.0);
        a.keys()
            .chain(b.keys())
            .map(|k| (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).norm())
            .fold(0.0, f64::max)
    }
}

/// Bosonic Fock space over `modes` modes with total occupation ≤ `n_max`.
#[derive(Debug, Clone)]
pub struct TruncatedFock {
    pub modes: usize,
    pub n_max: usize,
    states: Vec<Vec<u8>>,
    annihilators: Vec<SparseMatrix>,
}

impl TruncatedFock {
    pub fn new(modes: usize, n_max: usize) -> Result<Self> {
        if modes == 0 || modes > 12 {
            return Err(Error::InvalidArgument(format!("mode count must be in 1..=12, got {modes}")));
        }
        if n_max == 0 || n_max > 8 {
            return Err(Error::InvalidArgument(format!("occupation cutoff must be in 1..=8, got {n_max}")));
        }
        let mut states = Vec::new();
        let mut cur = vec![0u8; modes];
        enumerate(&mut states, &mut cur, 0, n_max);
        let index: HashMap<Vec<u8>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let dim = states.len();
        let annihilators = (0..modes)
            .map(|m| {
                let mut entries = Vec::new();
                for (col, s) in states.iter().enumerate() {
                    if s[m] > 0 {
                        let mut t = s.clone();
                        t[m] -= 1;
                        entries.push((index[&t], col, C64::new((s[m] as f64).sqrt(), 0.0)));
                    }
                }
                SparseMatrix { dim, entries }
            })
            .collect();
        Ok(Self { modes, n_max, states, annihilators })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn annihilator(&self, m: usize) -> &SparseMatrix {
        &self.annihilators[m]
    }

    pub fn creator(&self, m: usize) -> SparseMatrix {
        self.annihilators[m].adjoint()
    }

    pub fn occupation(&self, state: usize) -> usize {
        self.states[state].iter().map(|&x| x as usize).sum()
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// a(x) + a*(x) for mode coefficients c_m = ⟨e_m, x⟩.
    pub fn field_operator(&self, coeffs: &[C64]) -> SparseMatrix {
        let mut entries = Vec::new();
        for (m, c) in coeffs.iter().enumerate() {
            for &(r, col, v) in &self.annihilators[m].entries {
                entries.push((r, col, v * c.conj()));
                entries.push((col, r, v * c));
            }
        }
        SparseMatrix { dim: self.dim(), entries }
    }

    /// max over protected basis states (occupation ≤ n_max − 1) of
    /// ‖([A, B] − z·1) e_s‖.
    pub fn commutator_residual(&self, a: &SparseMatrix, b: &SparseMatrix, z: C64) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.dim() {
            if self.occupation(s) + 1 > self.n_max {
                continue;
            }
            let mut e = vec![C64::new(0.0, 0.0); self.dim()];
            e[s] = C64::new(1.0, 0.0);
            let ab = a.matvec(&b.matvec(&e));
            let ba = b.matvec(&a.matvec(&e));
            let r: f64 = (0..self.dim())
                .map(|i| {
                    let target = if i == s { z } else { C64::new(0.0, 0.0) };
                    (ab[i] - ba[i] - target).norm_sqr()
                })
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }

    /// max over protected states of ‖([a_m, a*_m′] − δ_mm′) e_s‖.
    pub fn canonical_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.modes {
            for mp in 0..self.modes {
                let z = if m == mp { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max(self.commutator_residual(&self.annihilators[m], &self.creator(mp), z));
            }
        }
        worst
    }
}

fn enumerate(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for k in 0..=left {
        cur[pos] = k as u8;
        enumerate(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

/// π_h(V) in a given Fock space and mode basis; returns the operator and the truncation residual.
pub fn represent(x: &OneParticle, basis: &ModeBasis, fock: &TruncatedFock, max_residual: f64) -> Result<(SparseMatrix, f64)> {
    let (c, resid) = basis.expand(x);
    if resid > max_residual {
        return Err(Error::ResolutionExceeded(format!("basis truncation residual {resid:e}")));
    }
    if c.len() > fock.modes {
        return Err(Error::ResolutionExceeded("mode basis larger than the Fock space".into()));
    }
    Ok((fock.field_operator(&c), resid))
}

/// Three-norm decomposition of (Ω, π(V)² Ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumMoments {
    pub reg: f64,
    pub ir_p: f64,
    pub ir_r: f64,
}

impl VacuumMoments {
    pub fn total(&self) -> f64 {
        self.reg + self.ir_p + self.ir_r
    }
}

/// ‖Ṽ_h‖²_reg, ¼‖B^{−½}p‖²_ir and ‖B^{½}r_h‖²_ir.
pub fn vacuum_norms(x: &OneParticle, decomp: &HDecomposition, cov: &CovarianceB) -> VacuumMoments {
    let reg = x.reg_dot(x).re;
    let a = cov.apply_power(&decomp.p_class, -0.5);
    let b = cov.apply_power(&decomp.r_class, 0.5);
    VacuumMoments { reg, ir_p: 0.25 * a.dot(&a).re, ir_r: b.dot(&b).re }
}

/// ⟨v, M v⟩
pub fn expectation(m: &SparseMatrix, v: &[C64]) -> C64 {
    let mv = m.matvec(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutators_on_protected_subspace() {
        let f = TruncatedFock::new(3, 4).unwrap();
        assert!(f.canonical_residual() < 1e-14);
        let vac = f.vacuum();
        for m in 0..3 {
            let av = f.annihilator(m).matvec(&vac);
            assert!(av.iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn field_operator_is_hermitian() {
        let f = TruncatedFock::new(2, 4).unwrap();
        let op = f.field_operator(&[C64::new(0.3, -1.2), C64::new(0.5, 0.1)]);
        assert!(op.max_difference(&op.adjoint()) < 1e-15);
        let vac = f.vacuum();
        assert!(expectation(&op, &vac).norm() < 1e-15);
        let sq = op.matvec(&op.matvec(&vac));
        let second: C64 = vac.iter().zip(&sq).map(|(a, b)| a.conj() * b).sum();
        assert!((second.re - (0.3f64.powi(2) + 1.2f64.powi(2) + 0.25 + 0.01)).abs() < 1e-14);
    }
}
