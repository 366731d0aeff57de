//! Quadrature and tangential calculus for homogeneous functions on the
//! forward light cone, stored on the section l⁰ = 1.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::numerics::minkowski::{dot3, normalize3, CVec4, FourVector};
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::sph::{self, lm_count, lm_from_index, real_ylm, real_ylm_with_grad};
use crate::{Error, Result};

/// A null direction l = (1, n̂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullDirection {
    n_hat: [f64; 3],
}

impl NullDirection {
    /// Normalizes `n` onto the unit sphere.
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = dot3(n, n).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("null direction needs a nonzero spatial vector".into()));
        }
        Ok(Self { n_hat: normalize3(n) })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self { n_hat: sph::direction(theta, phi) }
    }

    pub fn n_hat(&self) -> [f64; 3] {
        self.n_hat
    }

    pub fn l(&self) -> FourVector {
        FourVector::null(self.n_hat)
    }

    pub fn angles(&self) -> (f64, f64) {
        sph::direction_angles(self.n_hat)
    }
}

/// Product Gauss–Legendre × uniform azimuth grid on the unit sphere.
#[derive(Debug, Clone)]
pub struct ConeGrid {
    nodes: Vec<NullDirection>,
    weights: Vec<f64>,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    order: usize,
}

/// Grid integrating every harmonic of degree ≤ `order` exactly.
pub fn make_grid(order: usize) -> Result<ConeGrid> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("grid order must be at least 2, got {order}")));
    }
    let m = order / 2 + 1;
    let n_phi = 2 * m;
    let gl = gauss_legendre(m);
    let mut nodes = Vec::with_capacity(m * n_phi);
    let mut weights = Vec::with_capacity(m * n_phi);
    let mut thetas = Vec::with_capacity(m * n_phi);
    let mut phis = Vec::with_capacity(m * n_phi);
    let dphi = 2.0 * PI / n_phi as f64;
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let theta = x.acos();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dphi;
            nodes.push(NullDirection::from_angles(theta, phi));
            weights.push(w * dphi);
            thetas.push(theta);
            phis.push(phi);
        }
    }
    Ok(ConeGrid { nodes, weights, thetas, phis, order })
}

impl ConeGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[NullDirection] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn angles(&self, i: usize) -> (f64, f64) {
        (self.thetas[i], self.phis[i])
    }

    /// Largest harmonic degree whose coefficients the grid resolves without aliasing
    /// for band-limited data of the same degree.
    pub fn max_degree(&self) -> usize {
        self.order / 2
    }

    /// Plain quadrature of section samples: Σ w_i v_i.
    pub fn sum(&self, values: &[C64]) -> C64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    pub fn sum_real(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Samples a section function at every node.
    pub fn sample<T: Send, F: Fn(&NullDirection) -> T + Sync + Send>(&self, f: F) -> Vec<T> {
        self.nodes.par_iter().map(f).collect()
    }

    /// CSV dump with columns θ, φ_az, weight and one column per value component.
    pub fn to_csv(&self, headers: &[&str], values: &[Vec<f64>]) -> String {
        let mut out = String::from("theta,phi_az,weight");
        for h in headers {
            out.push(',');
            out.push_str(h);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{:.17e},{:.17e},{:.17e}", self.thetas[i], self.phis[i], self.weights[i]);
            for col in values {
                let _ = write!(out, ",{:.17e}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Field sampled on the grid nodes with homogeneity bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeField<T> {
    pub values: Vec<T>,
    pub degree: i32,
    pub orthogonal_to_l: bool,
}

pub type ScalarField = ConeField<C64>;
pub type VectorField = ConeField<CVec4>;

impl<T: Clone> ConeField<T> {
    pub fn new(values: Vec<T>, degree: i32) -> Self {
        Self { values, degree, orthogonal_to_l: false }
    }
}

impl ScalarField {
    pub fn from_fn<F: Fn(&NullDirection) -> C64 + Sync + Send>(grid: &ConeGrid, degree: i32, f: F) -> Self {
        Self::new(grid.sample(f), degree)
    }

    /// Value at λl for the stored section value at node `i`.
    pub fn at_scaled(&self, i: usize, lambda: f64) -> C64 {
        self.values[i] * lambda.powi(self.degree)
    }
}

impl VectorField {
    /// Vector field flagged as l-orthogonal after checking |l·V| ≤ 1e-12 |V| at every node.
    pub fn transverse(grid: &ConeGrid, values: Vec<CVec4>, degree: i32) -> Result<Self> {
        for (node, v) in grid.nodes().iter().zip(&values) {
            let ldot = v.dot_real(&node.l()).norm();
            if ldot > 1e-12 * v.norm().max(1e-300) && ldot > 1e-300 {
                return Err(Error::PreconditionViolation(format!(
                    "vector field not orthogonal to l: |l·V| = {ldot:e}"
                )));
            }
        }
        Ok(Self { values, degree, orthogonal_to_l: true })
    }

    /// Tangential spatial representative F with n̂·F = 0 at every node.
    pub fn tangent_parts(&self, grid: &ConeGrid) -> Vec<[C64; 3]> {
        grid.nodes().iter().zip(&self.values).map(|(n, v)| v.tangent_rep(n.n_hat())).collect()
    }

    /// Builds the t-frame representative (0, F) from tangential samples.
    pub fn from_tangent(parts: &[[C64; 3]], degree: i32) -> Self {
        let values = parts
            .iter()
            .map(|f| CVec4([C64::new(0.0, 0.0), f[0], f[1], f[2]]))
            .collect();
        Self { values, degree, orthogonal_to_l: true }
    }
}

/// ∫ f(1, n̂) dΩ for a field of degree −2.
pub fn integrate_cone(f: &ScalarField, grid: &ConeGrid) -> Result<C64> {
    if f.degree != -2 {
        return Err(Error::HomogeneityMismatch { expected: -2, found: f.degree });
    }
    Ok(grid.sum(&f.values))
}

/// Invariant integral of a degree −2 function evaluated in a boosted frame:
/// ∫ f(Λl) d²l with f given on the section, using the compensating factor (Λl)⁰^{-2}.
pub fn integrate_boosted<F: Fn([f64; 3]) -> C64 + Sync + Send>(f: F, boost: &[[f64; 4]; 4], grid: &ConeGrid) -> C64 {
    let vals: Vec<C64> = grid.sample(|node| {
        let p = FourVector::transform(boost, &node.l());
        let n = [p[1] / p[0], p[2] / p[0], p[3] / p[0]];
        f(n) / (p[0] * p[0])
    });
    grid.sum(&vals)
}

/// Precomputed real harmonics and surface gradients on the grid nodes.
#[derive(Debug, Clone)]
pub struct Spectral<'g> {
    grid: &'g ConeGrid,
    lmax: usize,
    y: Vec<Vec<f64>>,
    grad: Vec<Vec<[f64; 3]>>,
}

impl<'g> Spectral<'g> {
    pub fn new(grid: &'g ConeGrid, lmax: usize) -> Self {
        let tables: Vec<(Vec<f64>, Vec<[f64; 3]>)> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (t, p) = grid.angles(i);
                real_ylm_with_grad(lmax, t, p)
            })
            .collect();
        let (y, grad) = tables.into_iter().unzip();
        Self { grid, lmax, y, grad }
    }

    pub fn grid(&self) -> &'g ConeGrid {
        self.grid
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn n_coeffs(&self) -> usize {
        lm_count(self.lmax)
    }

    pub fn harmonic(&self, node: usize, k: usize) -> f64 {
        self.y[node][k]
    }

    pub fn harmonic_gradient(&self, node: usize, k: usize) -> [f64; 3] {
        self.grad[node][k]
    }

    /// Coefficients c_k = Σ_i w_i f_i Y_k(n_i).
    pub fn analyze(&self, values: &[C64]) -> Vec<C64> {
        let mut c = vec![C64::new(0.0, 0.0); self.n_coeffs()];
        for (i, (v, w)) in values.iter().zip(self.grid.weights()).enumerate() {
            let vw = v * *w;
            for (ck, yk) in c.iter_mut().zip(&self.y[i]) {
                *ck += vw * *yk;
            }
        }
        c
    }

    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        (0..self.grid.len())
            .map(|i| coeffs.iter().zip(&self.y[i]).map(|(c, y)| c * *y).sum())
            .collect()
    }

    /// Surface gradient ∇_S f at every node from coefficients.
    pub fn gradient_from_coeffs(&self, coeffs: &[C64]) -> Vec<[C64; 3]> {
        (0..self.grid.len())
            .map(|i| {
                let mut g = [C64::new(0.0, 0.0); 3];
                for (c, gy) in coeffs.iter().zip(&self.grad[i]) {
                    for a in 0..3 {
                        g[a] += c * gy[a];
                    }
                }
                g
            })
            .collect()
    }

    /// Spectral evaluation at an arbitrary direction.
    pub fn eval(&self, coeffs: &[C64], n: [f64; 3]) -> C64 {
        let (t, p) = sph::direction_angles(n);
        let y = real_ylm(self.lmax, t, p);
        coeffs.iter().zip(&y).map(|(c, y)| c * *y).sum()
    }

    /// Relative energy carried by the top two degrees of an expansion.
    pub fn tail_fraction(&self, coeffs: &[C64]) -> f64 {
        self.tail_fraction_scaled(coeffs, 0.0)
    }

    /// As [`Spectral::tail_fraction`] with the denominator bounded below by `scale_sq`.
    pub fn tail_fraction_scaled(&self, coeffs: &[C64], scale_sq: f64) -> f64 {
        let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().max(scale_sq);
        if total == 0.0 {
            return 0.0;
        }
        let cut = self.lmax.saturating_sub(1);
        let tail: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| lm_from_index(*k).0 >= cut)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        (tail / total).sqrt()
    }

    fn check_tail(&self, coeffs: &[C64], tol: f64, scale_sq: f64) -> Result<()> {
        let t = self.tail_fraction_scaled(coeffs, scale_sq);
        if t > tol {
            return Err(Error::ResolutionExceeded(format!(
                "spectral tail {t:e} above {tol:e} at lmax {}",
                self.lmax
            )));
        }
        Ok(())
    }

    /// Divergence of a tangent field given by Cartesian components: Σ_a (∇_S F_a)_a.
    pub fn surface_divergence(&self, parts: &[[C64; 3]]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for a in 0..3 {
            let comp: Vec<C64> = parts.iter().map(|f| f[a]).collect();
            let g = self.gradient_from_coeffs(&self.analyze(&comp));
            for (o, gi) in out.iter_mut().zip(&g) {
                *o += gi[a];
            }
        }
        out
    }
}

/// Kinds of tangential derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    FullGradient,
    /// L_ab with 0 ≤ a < b ≤ 3.
    L(usize, usize),
    Divergence,
}

/// Scalar or vector field accepted by [`tangential_derivative`].
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl Field {
    pub fn degree(&self) -> i32 {
        match self {
            Field::Scalar(f) => f.degree,
            Field::Vector(v) => v.degree,
        }
    }
}

/// Default relative tail threshold for spectral derivatives.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Spectral tangential derivatives. Scalars of degree d are extended off the cone
/// as |x̄|^d g(x̂); vectors use the t-frame representative (0, F).
pub fn tangential_derivative(field: &Field, kind: Derivative, spec: &Spectral<'_>) -> Result<Field> {
    match (field, kind) {
        (Field::Scalar(f), Derivative::FullGradient) => gradient(f, spec).map(Field::Vector),
        (Field::Scalar(f), Derivative::L(a, b)) => l_ab(f, a, b, spec).map(Field::Scalar),
        (Field::Vector(v), Derivative::Divergence) => divergence(v, spec).map(Field::Scalar),
        (Field::Vector(v), Derivative::L(a, b)) => {
            let mut comps = Vec::with_capacity(4);
            for c in 0..4 {
                let s = ScalarField::new(v.values.iter().map(|x| x[c]).collect(), v.degree);
                comps.push(l_ab(&s, a, b, spec)?.values);
            }
            let values = (0..spec.grid().len())
                .map(|i| CVec4([comps[0][i], comps[1][i], comps[2][i], comps[3][i]]))
                .collect();
            Ok(Field::Vector(VectorField::new(values, v.degree)))
        }
        _ => Err(Error::InvalidArgument(format!("{kind:?} is not defined for this field type"))),
    }
}

/// Contravariant gradient ∂^a f restricted to the cone, degree lowered by one.
pub fn gradient(f: &ScalarField, spec: &Spectral<'_>) -> Result<VectorField> {
    let c = spec.analyze(&f.values);
    spec.check_tail(&c, TAIL_TOLERANCE, 0.0)?;
    let g = spec.gradient_from_coeffs(&c);
    let d = f.degree as f64;
    let values = spec
        .grid()
        .nodes()
        .iter()
        .zip(&g)
        .zip(&f.values)
        .map(|((node, gi), v)| {
            let n = node.n_hat();
            let mut out = CVec4::zero();
            for a in 0..3 {
                out[a + 1] = -(gi[a] + v * (d * n[a]));
            }
            out
        })
        .collect();
    Ok(VectorField { values, degree: f.degree - 1, orthogonal_to_l: f.degree == 0 })
}

/// Intrinsic cone operator L_ab = l_a ∂_b − l_b ∂_a (lower indices), degree preserved.
pub fn l_ab(f: &ScalarField, a: usize, b: usize, spec: &Spectral<'_>) -> Result<ScalarField> {
    if a > 3 || b > 3 {
        return Err(Error::InvalidArgument(format!("L_{a}{b}: indices must be in 0..4")));
    }
    let c = spec.analyze(&f.values);
    spec.check_tail(&c, TAIL_TOLERANCE, 0.0)?;
    let g = spec.gradient_from_coeffs(&c);
    let d = f.degree as f64;
    let values = spec
        .grid()
        .nodes()
        .iter()
        .zip(&g)
        .zip(&f.values)
        .map(|((node, gi), v)| {
            let n = node.n_hat();
            // covariant ∂_0 = 0, ∂_i = d n_i g + ∇_i g; l_0 = 1, l_i = -n_i
            let lower_l = |k: usize| if k == 0 { 1.0 } else { -n[k - 1] };
            let del = |k: usize| if k == 0 { C64::new(0.0, 0.0) } else { gi[k - 1] + v * (d * n[k - 1]) };
            del(b) * lower_l(a) - del(a) * lower_l(b)
        })
        .collect();
    Ok(ScalarField::new(values, f.degree))
}

/// ∂·V for an l-orthogonal field, computed as the surface divergence of its tangent part.
pub fn divergence(v: &VectorField, spec: &Spectral<'_>) -> Result<ScalarField> {
    let parts = v.tangent_parts(spec.grid());
    let coeffs: Vec<Vec<C64>> = (0..3)
        .map(|a| spec.analyze(&parts.iter().map(|f| f[a]).collect::<Vec<C64>>()))
        .collect();
    let scale_sq: f64 = coeffs.iter().flatten().map(|c| c.norm_sqr()).sum();
    for c in &coeffs {
        spec.check_tail(c, TAIL_TOLERANCE, scale_sq)?;
    }
    Ok(ScalarField::new(spec.surface_divergence(&parts), v.degree - 1))
}

/// Residuals of the two invariant integral identities.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResiduals {
    /// max over the six components of |∫ L_ab f d²l|
    pub l_ab: f64,
    /// |∫ ∂·V d²l|
    pub divergence: f64,
}

pub fn check_invariant_integrals(f: &ScalarField, v: &VectorField, spec: &Spectral<'_>) -> Result<InvariantResiduals> {
    if f.degree != -2 {
        return Err(Error::HomogeneityMismatch { expected: -2, found: f.degree });
    }
    if v.degree != -1 {
        return Err(Error::HomogeneityMismatch { expected: -1, found: v.degree });
    }
    let grid = spec.grid();
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            let lf = l_ab(f, a, b, spec)?;
            worst = worst.max(grid.sum(&lf.values).norm());
        }
    }
    let div = divergence(v, spec)?;
    Ok(InvariantResiduals { l_ab: worst, divergence: grid.sum(&div.values).norm() })
}

/// Finite-difference L_ab oracle for a degree-d function given on the section.
pub fn l_ab_finite_difference<F: Fn([f64; 3]) -> f64>(f: &F, degree: i32, l: [f64; 3], a: usize, b: usize, eps: f64) -> f64 {
    let x = FourVector::null(l);
    let xl = x.lower();
    let mut v = FourVector::default();
    v[b] += xl[a];
    v[a] -= xl[b];
    let ext = |p: FourVector| {
        let r = p.spatial_norm();
        let s = p.spatial();
        f([s[0] / r, s[1] / r, s[2] / r]) * r.powi(degree)
    };
    (ext(x + v * eps) - ext(x - v * eps)) / (2.0 * eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sph::lm_index;

    #[test]
    fn weights_sum_to_four_pi() {
        let g = make_grid(8).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
        assert!(matches!(make_grid(1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn harmonic_orthonormality() {
        let g = make_grid(8).unwrap();
        let s = Spectral::new(&g, 4);
        let k44 = lm_index(4, 4);
        let k20 = lm_index(2, 0);
        let prod: f64 = (0..g.len()).map(|i| g.weights()[i] * s.harmonic(i, k44).powi(2)).sum();
        let y20: f64 = (0..g.len()).map(|i| g.weights()[i] * s.harmonic(i, k20)).sum();
        assert!((prod - 1.0).abs() < 1e-12);
        assert!(y20.abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_wrong_degree() {
        let g = make_grid(4).unwrap();
        let f = ScalarField::from_fn(&g, -1, |_| C64::new(1.0, 0.0));
        assert!(matches!(integrate_cone(&f, &g), Err(Error::HomogeneityMismatch { .. })));
    }

    #[test]
    fn l_ab_of_constant_vanishes() {
        let g = make_grid(8).unwrap();
        let s = Spectral::new(&g, 4);
        let f = ScalarField::from_fn(&g, 0, |_| C64::new(2.5, 0.0));
        for a in 0..4 {
            for b in (a + 1)..4 {
                let lf = l_ab(&f, a, b, &s).unwrap();
                assert!(lf.values.iter().all(|v| v.norm() < 1e-13));
            }
        }
    }
}
