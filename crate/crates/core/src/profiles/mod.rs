//! Radial profiles, the extended symplectic form in three representations,
//! the regular and infrared scalar products and the h-decomposition.

mod current;
mod symplectic;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

pub use current::{CurlCurrent, Gaussian, GaussianCurrent, SumCurrent, SupportClass, TestCurrent};
pub use symplectic::{symplectic_form, SymplecticMethod, SymplecticSettings};

use crate::cone_geometry::{ConeGrid, ScalarField, Spectral, VectorField};
use crate::fock_sim::CovarianceB;
use crate::ir_projection::{project_ir_spectral, GradientClass};
use crate::numerics::minkowski::{CVec4, FourVector};
use crate::numerics::quadrature::{gauss_legendre, log_rule, Rule};
use crate::{Error, Result};

/// Source of V̇̃(ω, l) for real ω and l = (1, n̂).
pub trait Profile: Send + Sync {
    fn vdot(&self, omega: f64, n: [f64; 3]) -> CVec4;
    fn has_tail(&self) -> bool {
        false
    }
}

/// Shared handle to a profile.
#[derive(Clone)]
pub struct RadialProfile {
    source: Arc<dyn Profile>,
    label: String,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("label", &self.label).field("has_tail", &self.has_tail()).finish()
    }
}

impl RadialProfile {
    pub fn new<P: Profile + 'static>(source: P, label: impl Into<String>) -> Self {
        Self { source: Arc::new(source), label: label.into() }
    }

    pub fn from_fn<F>(f: F, has_tail: bool, label: impl Into<String>) -> Self
    where
        F: Fn(f64, [f64; 3]) -> CVec4 + Send + Sync + 'static,
    {
        Self::new(FnProfile { f: Box::new(f), has_tail }, label)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_tail(&self) -> bool {
        self.source.has_tail()
    }

    /// V̇̃(ω, l).
    pub fn vdot(&self, omega: f64, n: [f64; 3]) -> CVec4 {
        self.source.vdot(omega, n)
    }

    /// Ṽ(ω, l) = i V̇̃(ω, l)/ω for ω ≠ 0.
    pub fn v_tilde(&self, omega: f64, n: [f64; 3]) -> CVec4 {
        self.vdot(omega, n).scale(C64::new(0.0, 1.0 / omega))
    }

    /// The zero mode V̇̃(0, l).
    pub fn zero_mode(&self, n: [f64; 3]) -> CVec4 {
        self.vdot(0.0, n)
    }

    /// CSV dump of V̇̃ with columns ω, node index, four components re/im.
    pub fn to_csv(&self, omegas: &[f64], grid: &ConeGrid) -> String {
        let mut out = String::from("omega,node,v0_re,v0_im,v1_re,v1_im,v2_re,v2_im,v3_re,v3_im\n");
        for &w in omegas {
            for (i, node) in grid.nodes().iter().enumerate() {
                let v = self.vdot(w, node.n_hat());
                let _ = write!(out, "{w:.17e},{i}");
                for c in v.0 {
                    let _ = write!(out, ",{:.17e},{:.17e}", c.re, c.im);
                }
                out.push('\n');
            }
        }
        out
    }
}

struct FnProfile {
    f: Box<dyn Fn(f64, [f64; 3]) -> CVec4 + Send + Sync>,
    has_tail: bool,
}

impl Profile for FnProfile {
    fn vdot(&self, omega: f64, n: [f64; 3]) -> CVec4 {
        (self.f)(omega, n)
    }

    fn has_tail(&self) -> bool {
        self.has_tail
    }
}

/// Profile of a test current: Ṽ(ω, l) = Ĵ(ωl), V̇̃ = −iω Ĵ(ωl).
pub struct CurrentProfile<J> {
    pub current: J,
}

impl<J: TestCurrent> Profile for CurrentProfile<J> {
    fn vdot(&self, omega: f64, n: [f64; 3]) -> CVec4 {
        let p = FourVector::null(n).scale(omega);
        self.current.fourier(&p).scale(C64::new(0.0, -omega))
    }
}

pub fn profile_from_current<J: TestCurrent + 'static>(current: J, label: impl Into<String>) -> RadialProfile {
    RadialProfile::new(CurrentProfile { current }, label)
}

/// Rule on [0, ω_max]: a Gauss–Legendre panel on [0, ω_min] followed by
/// log-spaced Gauss–Legendre panels on [ω_min, ω_max].
pub fn omega_rule(omega_min: f64, omega_max: f64, panels_per_decade: usize, per_panel: usize) -> Rule {
    let decades = (omega_max / omega_min).log10();
    let panels = ((decades * panels_per_decade as f64).ceil() as usize).max(1);
    let mut r = gauss_legendre(per_panel).mapped(0.0, omega_min);
    r.append(log_rule(omega_min, omega_max, panels, per_panel));
    r
}

/// Default spectral rule: ω ∈ [0, 40] with ω_min = 1e-6.
pub fn default_omega_rule() -> Rule {
    omega_rule(1e-6, 40.0, 3, 12)
}

/// (F₁, F₂)_reg = −∫₀^∞ conj(F₁)·F₂ ω dω d²l.
pub fn reg_product<F1, F2>(f1: F1, f2: F2, grid: &ConeGrid, rule: &Rule) -> C64
where
    F1: Fn(f64, [f64; 3]) -> CVec4 + Sync,
    F2: Fn(f64, [f64; 3]) -> CVec4 + Sync,
{
    let per_node: Vec<C64> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let n = node.n_hat();
            let mut acc = C64::new(0.0, 0.0);
            for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
                acc -= f1(w, n).cdot(&f2(w, n)) * (w * wt);
            }
            acc
        })
        .collect();
    grid.sum(&per_node)
}

/// (φ₁, φ₂)_{∂²} = −∫ ∂conj(φ₁)·∂φ₂ d²l by quadrature of spectral gradients.
pub fn ir_product(phi1: &ScalarField, phi2: &ScalarField, spec: &Spectral<'_>) -> Result<C64> {
    for f in [phi1, phi2] {
        if f.degree != 0 {
            return Err(Error::HomogeneityMismatch { expected: 0, found: f.degree });
        }
    }
    let g1 = spec.gradient_from_coeffs(&spec.analyze(&phi1.values));
    let g2 = spec.gradient_from_coeffs(&spec.analyze(&phi2.values));
    let vals: Vec<C64> = g1
        .iter()
        .zip(&g2)
        .map(|(a, b)| (0..3).map(|k| a[k].conj() * b[k]).sum())
        .collect();
    Ok(spec.grid().sum(&vals))
}

/// The auxiliary function h̃(ω, l) with h̃(0, l) = 1.
#[derive(Clone)]
pub struct HFunction {
    f: Arc<dyn Fn(f64, [f64; 3]) -> C64 + Send + Sync>,
    separable: Option<Arc<dyn Fn(f64) -> C64 + Send + Sync>>,
    label: String,
}

impl std::fmt::Debug for HFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HFunction").field("label", &self.label).finish()
    }
}

impl HFunction {
    /// h̃(ω, l) = g(ω t·l) for a profile g of one variable.
    pub fn separable<G>(g: G, label: impl Into<String>) -> Self
    where
        G: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        let g = Arc::new(g);
        let g2 = g.clone();
        Self { f: Arc::new(move |w, _n| g2(w)), separable: Some(g), label: label.into() }
    }

    /// h̃(u) = e^{−(a u)²} with u = ω t·l.
    pub fn gaussian(a: f64) -> Self {
        Self::separable(move |u| C64::new((-(a * u) * (a * u)).exp(), 0.0), format!("gaussian(a={a})"))
    }

    /// A direction-dependent h̃ not of the form g(ω t·l).
    pub fn general<F>(f: F, label: impl Into<String>) -> Self
    where
        F: Fn(f64, [f64; 3]) -> C64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), separable: None, label: label.into() }
    }

    pub fn eval(&self, omega: f64, n: [f64; 3]) -> C64 {
        (self.f)(omega, n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The one-variable profile when h̃ is separable.
    pub fn profile(&self) -> Option<&(dyn Fn(f64) -> C64 + Send + Sync)> {
        self.separable.as_deref()
    }

    /// Checks h̃(0, l) = 1 at every grid node.
    pub fn validate(&self, grid: &ConeGrid) -> Result<()> {
        for node in grid.nodes() {
            let v = self.eval(0.0, node.n_hat());
            if (v - 1.0).norm() > 1e-14 {
                return Err(Error::InvalidH(format!("h̃(0, l) = {v} at n̂ = {:?}", node.n_hat())));
            }
        }
        Ok(())
    }
}

/// Output of [`h_decompose`].
#[derive(Debug, Clone)]
pub struct HDecomposition {
    /// p(l) = V̇̃(0, l) on the grid
    pub p: VectorField,
    /// [Φ] with ∂Φ = p
    pub p_class: GradientClass,
    /// R_h from the principal-value form
    pub r_first: VectorField,
    /// R_h from −∫ conj(h̃) Ṽ_h dω
    pub r_second: VectorField,
    /// r_h = P_ir R_h
    pub r_class: GradientClass,
    /// j_h = ½ B^{−½} p + i B^{½} r_h in the ∂² picture
    pub j: GradientClass,
    /// max |Im| of p and R_h relative to their size
    pub imag_p: f64,
    pub imag_r: f64,
    /// max relative deviation between the two R_h forms
    pub r_forms_deviation: f64,
}

/// Ṽ_h(ω, l) = iω⁻¹[V̇̃(ω, l) − V̇̃(0, l) h̃(ω, l)].
pub fn v_h(v: &RadialProfile, h: &HFunction, omega: f64, n: [f64; 3]) -> CVec4 {
    let p = v.zero_mode(n);
    let d = v.vdot(omega, n) - p.scale(h.eval(omega, n));
    d.scale(C64::new(0.0, 1.0 / omega))
}

/// Ṽ_h as a profile-like closure source.
pub fn v_h_fn(v: &RadialProfile, h: &HFunction) -> impl Fn(f64, [f64; 3]) -> CVec4 + Send + Sync + Clone {
    let v = v.clone();
    let h = h.clone();
    move |w, n| v_h(&v, &h, w, n)
}

fn max_imag_fraction(values: &[CVec4]) -> f64 {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    values.iter().flat_map(|v| v.0.iter().map(|c| c.im.abs())).fold(0.0, f64::max) / scale
}

fn real_part(v: &CVec4) -> CVec4 {
    CVec4(v.0.map(|c| C64::new(c.re, 0.0)))
}

pub fn h_decompose(v: &RadialProfile, h: &HFunction, spec: &Spectral<'_>, rule: &Rule, cov: &CovarianceB) -> Result<HDecomposition> {
    let grid = spec.grid();
    h.validate(grid)?;
    let rows: Vec<(CVec4, CVec4, CVec4)> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let n = node.n_hat();
            let p = v.zero_mode(n);
            let mut first = CVec4::zero();
            let mut second = CVec4::zero();
            for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
                for s in [w, -w] {
                    let hv = h.eval(s, n).conj();
                    let vd = v.vdot(s, n);
                    first = first + vd.scale(C64::new(0.0, -wt / s) * hv);
                    let vh = (vd - p.scale(h.eval(s, n))).scale(C64::new(0.0, 1.0 / s));
                    second = second - vh.scale(hv * wt);
                }
            }
            (p, first, second)
        })
        .collect();
    let p_vals: Vec<CVec4> = rows.iter().map(|r| r.0).collect();
    let first: Vec<CVec4> = rows.iter().map(|r| r.1).collect();
    let second: Vec<CVec4> = rows.iter().map(|r| r.2).collect();
    let imag_p = max_imag_fraction(&p_vals);
    let imag_r = max_imag_fraction(&first).max(max_imag_fraction(&second));
    let scale = first.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    let r_forms_deviation = first.iter().zip(&second).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max) / scale;
    let p_field = VectorField { values: p_vals.iter().map(real_part).collect(), degree: -1, orthogonal_to_l: true };
    let r_first = VectorField { values: first.iter().map(real_part).collect(), degree: -1, orthogonal_to_l: true };
    let r_second = VectorField { values: second.iter().map(real_part).collect(), degree: -1, orthogonal_to_l: true };
    let p_class = project_ir_spectral(&p_field, spec)?;
    let r_class = project_ir_spectral(&r_first, spec)?;
    let half_inv = cov.apply_power(&p_class, -0.5).scale(C64::new(0.5, 0.0));
    let half = cov.apply_power(&r_class, 0.5).scale(C64::new(0.0, 1.0));
    let j = GradientClass {
        coeffs: half_inv.coeffs.iter().zip(&half.coeffs).map(|(a, b)| a + b).collect(),
        lmax: p_class.lmax,
    };
    Ok(HDecomposition {
        p: p_field,
        p_class,
        r_first,
        r_second,
        r_class,
        j,
        imag_p,
        imag_r,
        r_forms_deviation,
    })
}

/// Spectral closed form for the Euclidean Gaussian e^{−|x|²_E}c restricted to the cone:
/// Ĵ(ωl) = (π/2) e^{−ω²(1+|n̂|²)/4} c.
pub fn euclidean_gaussian_profile(omega: f64, n: [f64; 3], c: [f64; 4]) -> CVec4 {
    let n2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    let amp = PI / 2.0 * (-omega * omega * (1.0 + n2) / 4.0).exp();
    CVec4(c.map(|x| C64::new(amp * x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_geometry::make_grid;
    use crate::numerics::sph::lm_index;

    #[test]
    fn ir_product_eigenvalues() {
        let grid = make_grid(16).unwrap();
        let spec = Spectral::new(&grid, 8);
        let y = |k: usize| ScalarField::new((0..grid.len()).map(|i| C64::new(spec.harmonic(i, k), 0.0)).collect(), 0);
        let a = y(lm_index(3, -2));
        let b = y(lm_index(2, 1));
        assert!((ir_product(&a, &a, &spec).unwrap() - 12.0).norm() < 1e-11);
        assert!(ir_product(&a, &b, &spec).unwrap().norm() < 1e-11);
        let c = ScalarField::new(vec![C64::new(1.0, 0.0); grid.len()], 0);
        assert!(ir_product(&c, &c, &spec).unwrap().norm() < 1e-14);
    }

    #[test]
    fn invalid_h_rejected() {
        let grid = make_grid(4).unwrap();
        let h = HFunction::separable(|u| C64::new(2.0 * (-u * u).exp(), 0.0), "bad");
        assert!(matches!(h.validate(&grid), Err(Error::InvalidH(_))));
    }

    #[test]
    fn euclidean_gaussian_closed_form() {
        let j = GaussianCurrent::new(FourVector::default(), std::f64::consts::FRAC_1_SQRT_2, [1.0, 0.0, 0.0, 0.0]);
        let n = crate::numerics::minkowski::normalize3([0.2, -0.4, 0.9]);
        for &w in &[0.0, 0.7, 2.3] {
            let p = FourVector::null(n).scale(w);
            let exact = euclidean_gaussian_profile(w, n, [1.0, 0.0, 0.0, 0.0]);
            assert!((j.fourier(&p)[0] - exact[0]).norm() < 1e-14);
        }
    }
}
