//! The orthogonal projection P_ir onto tangential gradients, computed both
//! through the logarithmic kernel and through the spherical-harmonic spectrum.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::cone_geometry::{divergence, gradient, l_ab, ConeGrid, ScalarField, Spectral, VectorField};
use crate::numerics::minkowski::{orthonormal_frame, CVec4};
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::sph::{lm_count, lm_from_index, real_ylm, real_ylm_with_grad};
use crate::{Error, Result};

/// Class [φ] of a degree-0 function modulo constants, stored as real-harmonic
/// coefficients with the ℓ = 0 entry fixed to zero (zero-mean representative).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientClass {
    pub coeffs: Vec<C64>,
    pub lmax: usize,
}

impl GradientClass {
    pub fn zero(lmax: usize) -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0); lm_count(lmax)], lmax }
    }

    pub fn from_coeffs(mut coeffs: Vec<C64>, lmax: usize) -> Self {
        coeffs.resize(lm_count(lmax), C64::new(0.0, 0.0));
        coeffs[0] = C64::new(0.0, 0.0);
        Self { coeffs, lmax }
    }

    /// Projects samples of φ onto the class (drops the mean).
    pub fn from_values(values: &[C64], spec: &Spectral<'_>) -> Self {
        Self::from_coeffs(spec.analyze(values), spec.lmax())
    }

    pub fn values(&self, spec: &Spectral<'_>) -> Vec<C64> {
        let mut c = self.coeffs.clone();
        c.resize(spec.n_coeffs(), C64::new(0.0, 0.0));
        spec.synthesize(&c[..spec.n_coeffs()])
    }

    /// (φ₁, φ₂)_{∂²} = Σ ℓ(ℓ+1) conj(c₁) c₂.
    pub fn dot(&self, other: &Self) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(k, (a, b))| {
                let l = lm_from_index(k).0 as f64;
                a.conj() * b * (l * (l + 1.0))
            })
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).re.max(0.0).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<C64>, k: usize| v.get(k).copied().unwrap_or_default();
        let coeffs = (0..n).map(|k| get(&self.coeffs, k) - get(&other.coeffs, k)).collect();
        Self { coeffs, lmax: self.lmax.max(other.lmax) }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect(), lmax: self.lmax }
    }

    /// Largest |Im c| relative to the largest |c|.
    pub fn imag_fraction(&self) -> f64 {
        let m = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / m
    }

    /// Gradient field ∂φ on the grid (t-frame representative).
    pub fn gradient_field(&self, spec: &Spectral<'_>) -> VectorField {
        let mut c = self.coeffs.clone();
        c.resize(spec.n_coeffs(), C64::new(0.0, 0.0));
        let g = spec.gradient_from_coeffs(&c[..spec.n_coeffs()]);
        let parts: Vec<[C64; 3]> = g.iter().map(|v| [-v[0], -v[1], -v[2]]).collect();
        VectorField::from_tangent(&parts, -1)
    }
}

/// Builds the l-orthogonal field f = ∂φ + (magnetic part of ψ): spatial part −∇φ − n̂×∇ψ.
pub fn field_from_potentials(phi: &[C64], psi: &[C64], spec: &Spectral<'_>) -> VectorField {
    let gphi = spec.gradient_from_coeffs(phi);
    let gpsi = spec.gradient_from_coeffs(psi);
    let parts: Vec<[C64; 3]> = spec
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let n = node.n_hat();
            let gp = gpsi[i];
            let c = [
                gp[2] * n[1] - gp[1] * n[2],
                gp[0] * n[2] - gp[2] * n[0],
                gp[1] * n[0] - gp[0] * n[1],
            ];
            // c = −(n × ∇ψ)
            [-gphi[i][0] + c[0], -gphi[i][1] + c[1], -gphi[i][2] + c[2]]
        })
        .collect();
    VectorField::from_tangent(&parts, -1)
}

fn check_transverse(f: &VectorField, grid: &ConeGrid) -> Result<()> {
    if f.degree != -1 {
        return Err(Error::HomogeneityMismatch { expected: -1, found: f.degree });
    }
    for (node, v) in grid.nodes().iter().zip(&f.values) {
        let d = v.dot_real(&node.l()).norm();
        if d > 1e-9 * v.norm().max(1.0) {
            return Err(Error::PreconditionViolation(format!("field not orthogonal to l: {d:e}")));
        }
    }
    Ok(())
}

/// Spectral route: expand ∂·f in harmonics and divide by ℓ(ℓ+1).
pub fn project_ir_spectral(f: &VectorField, spec: &Spectral<'_>) -> Result<GradientClass> {
    check_transverse(f, spec.grid())?;
    let div = divergence(f, spec)?;
    Ok(class_from_divergence(&spec.analyze(&div.values), spec))
}

/// Spectral route without the band-limit guard, for fields whose low-ℓ part is all
/// that is used downstream. Returns the class and the largest relative tail of the
/// component expansions.
pub fn project_ir_truncated(f: &VectorField, spec: &Spectral<'_>) -> Result<(GradientClass, f64)> {
    check_transverse(f, spec.grid())?;
    let parts = f.tangent_parts(spec.grid());
    let coeffs: Vec<Vec<C64>> = (0..3)
        .map(|a| spec.analyze(&parts.iter().map(|v| v[a]).collect::<Vec<C64>>()))
        .collect();
    let scale_sq: f64 = coeffs.iter().flatten().map(|c| c.norm_sqr()).sum();
    let tail = coeffs.iter().map(|c| spec.tail_fraction_scaled(c, scale_sq)).fold(0.0, f64::max);
    let div = spec.analyze(&spec.surface_divergence(&parts));
    Ok((class_from_divergence(&div, spec), tail))
}

fn class_from_divergence(c: &[C64], spec: &Spectral<'_>) -> GradientClass {
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let l = lm_from_index(k).0;
            if l == 0 {
                C64::new(0.0, 0.0)
            } else {
                v / (l * (l + 1)) as f64
            }
        })
        .collect();
    GradientClass { coeffs, lmax: spec.lmax() }
}

/// Which line of the kernel formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    /// −(1/4π) ∫ log(l·l′/t·l′) ∂′·f(l′) d²l′
    Log,
    /// (1/4π) ∫ l·f(l′)/(l·l′) d²l′
    Contraction,
}

/// Polar quadrature centred at a target direction.
#[derive(Debug, Clone)]
pub struct RotatedRule {
    /// (θ, weight sinθ dθ) pairs after the θ = π u³ substitution
    radial: Vec<(f64, f64)>,
    n_phi: usize,
}

impl RotatedRule {
    pub fn new(n_u: usize, n_phi: usize) -> Self {
        let gl = gauss_legendre(n_u).mapped(0.0, 1.0);
        let radial = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(u, w)| {
                let theta = PI * u * u * u;
                (theta, w * 3.0 * PI * u * u * theta.sin())
            })
            .collect();
        Self { radial, n_phi }
    }

    /// Points n′ and weights around `n`; θ measured from `n`.
    pub fn points(&self, n: [f64; 3]) -> Vec<([f64; 3], f64, f64)> {
        let (e1, e2) = orthonormal_frame(n);
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.radial.len() * self.n_phi);
        for &(theta, w) in &self.radial {
            let (st, ct) = theta.sin_cos();
            for j in 0..self.n_phi {
                let (sp, cp) = ((j as f64 + 0.5) * dphi).sin_cos();
                let p = [
                    ct * n[0] + st * (cp * e1[0] + sp * e2[0]),
                    ct * n[1] + st * (cp * e1[1] + sp * e2[1]),
                    ct * n[2] + st * (cp * e1[2] + sp * e2[2]),
                ];
                out.push((p, theta, w * dphi));
            }
        }
        out
    }
}

impl Default for RotatedRule {
    fn default() -> Self {
        Self::new(48, 64)
    }
}

/// Kernel evaluation of φ at arbitrary target directions for a scalar source
/// s(l′) (the log form takes s = ∂·f or any degree −2 source).
pub fn log_kernel_at(source_coeffs: &[C64], lmax: usize, targets: &[[f64; 3]], rule: &RotatedRule) -> Vec<C64> {
    targets
        .par_iter()
        .map(|&n| {
            let mut acc = C64::new(0.0, 0.0);
            for (p, theta, w) in rule.points(n) {
                let (t, ph) = crate::numerics::sph::direction_angles(p);
                let y = real_ylm(lmax, t, ph);
                let s: C64 = source_coeffs.iter().zip(&y).map(|(c, y)| c * *y).sum();
                let k = (1.0 - theta.cos()).max(1e-300).ln();
                acc += s * (k * w);
            }
            -acc / (4.0 * PI)
        })
        .collect()
}

/// Contraction form: (1/4π) ∫ l·f(l′)/(l·l′) with f(l′) = (0, F(l′)), i.e. −n·F′/(1 − n·n′).
pub fn contraction_kernel_at(tangent_coeffs: &[Vec<C64>; 3], lmax: usize, targets: &[[f64; 3]], rule: &RotatedRule) -> Vec<C64> {
    targets
        .par_iter()
        .map(|&n| {
            let mut acc = C64::new(0.0, 0.0);
            for (p, theta, w) in rule.points(n) {
                let (t, ph) = crate::numerics::sph::direction_angles(p);
                let y = real_ylm(lmax, t, ph);
                let mut ndotf = C64::new(0.0, 0.0);
                for a in 0..3 {
                    let fa: C64 = tangent_coeffs[a].iter().zip(&y).map(|(c, y)| c * *y).sum();
                    ndotf += fa * n[a];
                }
                let denom = 1.0 - theta.cos();
                if denom > 0.0 {
                    acc -= ndotf * (w / denom);
                }
            }
            acc / (4.0 * PI)
        })
        .collect()
}

/// Kernel route evaluated at the grid nodes, returned as a class.
pub fn project_ir_kernel(f: &VectorField, spec: &Spectral<'_>, form: KernelForm, rule: &RotatedRule) -> Result<GradientClass> {
    check_transverse(f, spec.grid())?;
    let targets: Vec<[f64; 3]> = spec.grid().nodes().iter().map(|n| n.n_hat()).collect();
    let values = match form {
        KernelForm::Log => {
            let div = divergence(f, spec)?;
            log_kernel_at(&spec.analyze(&div.values), spec.lmax(), &targets, rule)
        }
        KernelForm::Contraction => {
            let parts = f.tangent_parts(spec.grid());
            let coeffs: [Vec<C64>; 3] = std::array::from_fn(|a| {
                let comp: Vec<C64> = parts.iter().map(|v| v[a]).collect();
                spec.analyze(&comp)
            });
            contraction_kernel_at(&coeffs, spec.lmax(), &targets, rule)
        }
    };
    Ok(GradientClass::from_values(&values, spec))
}

/// Default projection: spectral route.
pub fn project_ir(f: &VectorField, spec: &Spectral<'_>) -> Result<GradientClass> {
    project_ir_spectral(f, spec)
}

/// ‖∂²φ − ∂·P_ir f‖ on the grid (L² over the section), with φ from the log kernel.
pub fn laplace_inversion_check(f: &VectorField, spec: &Spectral<'_>, rule: &RotatedRule) -> Result<f64> {
    let phi = project_ir_kernel(f, spec, KernelForm::Log, rule)?;
    let grad = phi.gradient_field(spec);
    let lap = divergence(&grad, spec)?;
    let fgrad = project_ir_spectral(f, spec)?.gradient_field(spec);
    let div = divergence(&fgrad, spec)?;
    let diff: Vec<C64> = lap.values.iter().zip(&div.values).map(|(a, b)| (a - b) * (a - b).conj()).collect();
    Ok(spec.grid().sum(&diff).re.sqrt())
}

/// [Lⁿφ] by moving Lⁿ onto ∂·f under the log kernel, with L = L_ab.
pub fn iterated_kernel(f: &VectorField, n: usize, ab: (usize, usize), spec: &Spectral<'_>, rule: &RotatedRule) -> Result<GradientClass> {
    if n > 3 {
        return Err(Error::InvalidArgument(format!("iterated kernel supports n ≤ 3, got {n}")));
    }
    check_transverse(f, spec.grid())?;
    let mut src: ScalarField = divergence(f, spec)?;
    for _ in 0..n {
        src = l_ab(&src, ab.0, ab.1, spec)?;
    }
    let targets: Vec<[f64; 3]> = spec.grid().nodes().iter().map(|x| x.n_hat()).collect();
    let values = log_kernel_at(&spec.analyze(&src.values), spec.lmax(), &targets, rule);
    Ok(GradientClass::from_values(&values, spec))
}

/// Direct Lⁿ applied to the spectral projection.
pub fn iterated_direct(f: &VectorField, n: usize, ab: (usize, usize), spec: &Spectral<'_>) -> Result<GradientClass> {
    let phi = project_ir_spectral(f, spec)?;
    let mut s = ScalarField::new(phi.values(spec), 0);
    for _ in 0..n {
        s = l_ab(&s, ab.0, ab.1, spec)?;
    }
    Ok(GradientClass::from_values(&s.values, spec))
}

/// ‖f − P_ir f‖₀ / ‖f‖₀, zero for gradients.
pub fn curl_fraction(f: &VectorField, spec: &Spectral<'_>) -> Result<f64> {
    let p = project_ir_spectral(f, spec)?.gradient_field(spec);
    let grid = spec.grid();
    let a = f.tangent_parts(grid);
    let b = p.tangent_parts(grid);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.len() {
        let w = grid.weights()[i];
        for c in 0..3 {
            num += w * (a[i][c] - b[i][c]).norm_sqr();
            den += w * a[i][c].norm_sqr();
        }
    }
    Ok(if den == 0.0 { 0.0 } else { (num / den).sqrt() })
}

/// (f₁, f₂)₀ = −∫ conj(f₁)·f₂ d²l.
pub fn zero_product(f1: &VectorField, f2: &VectorField, grid: &ConeGrid) -> C64 {
    let vals: Vec<C64> = f1.values.iter().zip(&f2.values).map(|(a, b)| -a.cdot(b)).collect();
    grid.sum(&vals)
}

/// Evaluates a tangent field given by per-component coefficients at a direction.
pub fn eval_tangent(coeffs: &[Vec<C64>; 3], lmax: usize, n: [f64; 3]) -> [C64; 3] {
    let (t, p) = crate::numerics::sph::direction_angles(n);
    let y = real_ylm(lmax, t, p);
    std::array::from_fn(|a| coeffs[a].iter().zip(&y).map(|(c, y)| c * *y).sum())
}

/// Spectral gradient of φ at an arbitrary direction (spatial part of the t-frame representative).
pub fn gradient_at(class: &GradientClass, n: [f64; 3]) -> [C64; 3] {
    let (t, p) = crate::numerics::sph::direction_angles(n);
    let (_, g) = real_ylm_with_grad(class.lmax, t, p);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (c, gy) in class.coeffs.iter().zip(&g) {
        for a in 0..3 {
            out[a] -= c * gy[a];
        }
    }
    out
}

/// Gradient of a degree-0 scalar field as an l-orthogonal vector field.
pub fn gradient_of(phi: &ScalarField, spec: &Spectral<'_>) -> Result<VectorField> {
    if phi.degree != 0 {
        return Err(Error::HomogeneityMismatch { expected: 0, found: phi.degree });
    }
    gradient(phi, spec)
}

/// Tangential component helper: Cartesian spatial vector to 4-vector (0, F).
pub fn spatial_to_cvec(f: [C64; 3]) -> CVec4 {
    CVec4([C64::new(0.0, 0.0), f[0], f[1], f[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_geometry::make_grid;
    use crate::numerics::sph::lm_index;

    #[test]
    fn gradient_projects_to_itself() {
        let grid = make_grid(16).unwrap();
        let spec = Spectral::new(&grid, 8);
        let mut phi = vec![C64::new(0.0, 0.0); spec.n_coeffs()];
        phi[lm_index(1, 1)] = C64::new(1.0, 0.0);
        let zero = vec![C64::new(0.0, 0.0); spec.n_coeffs()];
        let f = field_from_potentials(&phi, &zero, &spec);
        let p = project_ir_spectral(&f, &spec).unwrap();
        assert!((p.coeffs[lm_index(1, 1)] - 1.0).norm() < 1e-12);
        let pure_psi = field_from_potentials(&zero, &phi, &spec);
        assert!(project_ir_spectral(&pure_psi, &spec).unwrap().norm() < 1e-12);
    }
}
