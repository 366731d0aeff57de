//! Klein–Gordon packets on the mass hyperboloid and their large-distance
//! behaviour along timelike and spacelike rays.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone_geometry::{make_grid, ConeGrid};
use crate::fock_sim::fit_slope;
use crate::numerics::minkowski::{dot3, orthonormal_frame, FourVector};
use crate::numerics::quadrature::{composite_gl, uniform_composite_gl, Rule};
use crate::{Error, Result};

/// Exponent of the Gaussian model subtracted from the radial integrand.
const MODEL_EXPONENT: f64 = 4.0;

/// f(p) = (1 + c·p̄) e^{−|p̄ − k̄|²/2w²} on the hyperboloid p² = m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketFunction {
    pub mass: f64,
    pub center: [f64; 3],
    pub width: f64,
    pub poly: [f64; 3],
}

impl PacketFunction {
    pub fn new(mass: f64, center: [f64; 3], width: f64, poly: [f64; 3]) -> Result<Self> {
        if !(mass > 0.0 && width > 0.0) {
            return Err(Error::InvalidArgument(format!("packet needs m > 0 and w > 0, got m = {mass}, w = {width}")));
        }
        Ok(Self { mass, center, width, poly })
    }

    pub fn value_spatial(&self, q: [f64; 3]) -> f64 {
        let d2: f64 = (0..3).map(|i| (q[i] - self.center[i]).powi(2)).sum();
        (1.0 + dot3(self.poly, q)) * (-d2 / (2.0 * self.width * self.width)).exp()
    }

    pub fn value(&self, p: &FourVector) -> f64 {
        self.value_spatial(p.spatial())
    }

    /// f(mu) for u on the unit hyperboloid.
    pub fn at_velocity(&self, u: &FourVector) -> f64 {
        self.value(&u.scale(self.mass))
    }

    /// Energy above which f is negligible.
    fn energy_bound(&self) -> f64 {
        let k = dot3(self.center, self.center).sqrt() + 9.5 * self.width;
        (self.mass * self.mass + k * k).sqrt()
    }
}

/// Sum of products Σ α g(p) h(q) of packets with a common mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPacket {
    pub terms: Vec<(f64, PacketFunction, PacketFunction)>,
}

impl TwoPacket {
    pub fn new(terms: Vec<(f64, PacketFunction, PacketFunction)>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidArgument("two-argument packet needs at least one term".into()));
        };
        let m = first.1.mass;
        if terms.iter().any(|(_, g, h)| g.mass != m || h.mass != m) {
            return Err(Error::InvalidArgument("all factors of a two-argument packet need the same mass".into()));
        }
        Ok(Self { terms })
    }

    pub fn factorized(g: PacketFunction) -> Self {
        Self { terms: vec![(1.0, g, g)] }
    }

    pub fn mass(&self) -> f64 {
        self.terms[0].1.mass
    }

    pub fn value(&self, p: &FourVector, q: &FourVector) -> f64 {
        self.terms.iter().map(|(a, g, h)| a * g.value(p) * h.value(q)).sum()
    }
}

fn timelike_split(x: &FourVector) -> Result<(f64, FourVector)> {
    let x2 = x.square();
    if x2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("expected a timelike point, x² = {x2}")));
    }
    let lambda = x[0].signum() * x2.sqrt();
    Ok((lambda, x.scale(1.0 / lambda)))
}

fn unit_velocity(u: &FourVector) -> Result<FourVector> {
    let u2 = u.square();
    if u2 <= 0.0 || u[0] <= 0.0 {
        return Err(Error::InvalidArgument("u must be future timelike".into()));
    }
    Ok(u.scale(1.0 / u2.sqrt()))
}

/// Radial data in the rest frame of u, with w = (m(1+r²), k n̂) and
/// k = m r √(2+r²):
/// G(r) = (2π)^{-3/2} 2m³ r² √(2+r²) ∫ f(Λ_u w) dΩ, so that
/// ∫ f e^{−iλu·p} dμ_m (2π)^{-3/2} = e^{−iλm} ∫₀^∞ G(r) e^{−iλm r²} dr.
struct RestFrameRadial {
    mass: f64,
    rule: Rule,
    values: Vec<f64>,
    g0: f64,
}

fn rest_frame_radial(f: &PacketFunction, u: &FourVector, max_phase: f64, sphere: &ConeGrid) -> Result<RestFrameRadial> {
    let m = f.mass;
    let boost = FourVector::boost_matrix(u);
    let speed = u.spatial_norm();
    let w0_max = f.energy_bound() * (u[0] + speed);
    let r_max = (w0_max / m - 1.0).max(0.0).sqrt().max(3.2);
    let panels = ((max_phase * r_max * r_max / PI).ceil() as usize).max(64);
    let breaks: Vec<f64> = (0..=panels).map(|j| r_max * (j as f64 / panels as f64).sqrt()).collect();
    let rule = composite_gl(&breaks, 12);
    let pref = (2.0 * PI).powf(-1.5) * 2.0 * m.powi(3);
    let shell = |r: f64| -> f64 {
        let k = m * r * (2.0 + r * r).sqrt();
        let w0 = m * (1.0 + r * r);
        sphere
            .nodes()
            .iter()
            .zip(sphere.weights())
            .map(|(node, wt)| {
                let n = node.n_hat();
                let w = FourVector::new(w0, k * n[0], k * n[1], k * n[2]);
                wt * f.value(&FourVector::transform(&boost, &w))
            })
            .sum()
    };
    let values: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|&r| pref * r * r * (2.0 + r * r).sqrt() * shell(r))
        .collect();
    let g0 = pref * 2f64.sqrt() * shell(0.0);
    let scale = values.iter().fold(g0.abs(), |a, v| a.max(v.abs()));
    let edge = values[values.len() - 12..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale > 0.0 && edge > 1e-13 * scale {
        return Err(Error::ResolutionExceeded(format!("packet not negligible at r = {r_max}: {:e}", edge / scale)));
    }
    Ok(RestFrameRadial { mass: m, rule, values, g0 })
}

impl RestFrameRadial {
    /// (2π)^{-3/2} ∫ f(p) e^{−iλ u·p} dμ_m(p).
    ///
    /// The model g₀ r² e^{−a r²} carries the stationary point at r = 0; its
    /// oscillatory integral is taken along the rotated ray r = e^{−iπ/4}ρ in
    /// closed form, and the remainder, which vanishes to fourth order at r = 0,
    /// is integrated on the real axis.
    fn direct(&self, lambda: f64) -> C64 {
        let a = MODEL_EXPONENT;
        let lm = lambda * self.mass;
        let model = self.g0 * PI.sqrt() / (4.0 * C64::new(a, lm).powf(1.5));
        let rest: C64 = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((&r, &w), &g)| {
                let r2 = r * r;
                C64::from_polar(w * (g - self.g0 * r2 * (-a * r2).exp()), -lm * r2)
            })
            .sum();
        C64::from_polar(1.0, -lm) * (model + rest)
    }
}

fn packet_sphere() -> ConeGrid {
    make_grid(78).expect("valid sphere order")
}

/// (2π)^{-3/2} ∫ f(p) e^{−ix·p} dμ_m(p) for spacelike x, evaluated in the
/// frame where x is purely spatial.
fn spacelike_direct(f: &PacketFunction, x: &FourVector) -> Result<C64> {
    let d = (-x.square()).sqrt();
    let xn = x.spatial_norm();
    let xhat = x.spatial().map(|c| c / xn);
    let v = x[0] / xn;
    let gamma = 1.0 / (1.0 - v * v).sqrt();
    let u = FourVector::new(gamma, gamma * v * xhat[0], gamma * v * xhat[1], gamma * v * xhat[2]);
    let boost = FourVector::boost_matrix(&u);
    let inv = FourVector::boost_matrix(&FourVector::new(u[0], -u[1], -u[2], -u[3]));
    let xr = FourVector::transform(&inv, x);
    let e = xr.spatial().map(|c| c / d);
    let (e1, e2) = orthonormal_frame(e);
    let m = f.mass;
    let k_max = f.energy_bound() * (u[0] + u.spatial_norm());
    let k_rule = uniform_composite_gl(0.0, k_max, 32, 8);
    let c_panels = (k_max * d / PI).ceil() as usize + 4;
    let c_rule = uniform_composite_gl(-1.0, 1.0, c_panels, 8);
    let n_phi = 48;
    let parts: Vec<C64> = k_rule
        .nodes
        .par_iter()
        .zip(&k_rule.weights)
        .map(|(&k, &wk)| {
            let w0 = (m * m + k * k).sqrt();
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &wc) in c_rule.nodes.iter().zip(&c_rule.weights) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                let mut ring = 0.0;
                for j in 0..n_phi {
                    let phi = 2.0 * PI * j as f64 / n_phi as f64;
                    let (sp, cp) = phi.sin_cos();
                    let dir: [f64; 3] = std::array::from_fn(|i| c * e[i] + s * (cp * e1[i] + sp * e2[i]));
                    let w = FourVector::new(w0, k * dir[0], k * dir[1], k * dir[2]);
                    ring += f.value(&FourVector::transform(&boost, &w));
                }
                acc += C64::from_polar(wc * ring * 2.0 * PI / n_phi as f64, k * d * c);
            }
            acc * (wk * k * k * m / w0)
        })
        .collect();
    Ok(parts.iter().sum::<C64>() * (2.0 * PI).powf(-1.5))
}

/// One evaluation of a packet expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSample {
    pub lambda: f64,
    pub leading: C64,
    pub direct: C64,
    pub error: f64,
}

impl AsymptoticSample {
    fn new(lambda: f64, leading: C64, direct: C64) -> Self {
        Self { lambda, leading, direct, error: (direct - leading).norm() }
    }
}

/// e^{−i(mλ + sgn(λ)3π/4)} (m/|λ|)^{3/2} f(mu), cut off below x² = 1.
pub fn kg_leading(f: &PacketFunction, u: &FourVector, lambda: f64) -> C64 {
    if lambda.abs() <= 1.0 {
        return C64::new(0.0, 0.0);
    }
    let m = f.mass;
    let phase = -(m * lambda + lambda.signum() * 0.75 * PI);
    C64::from_polar((m / lambda.abs()).powf(1.5) * f.at_velocity(u), phase)
}

/// Leading term and direct value of (2π)^{-3/2} ∫ f(p) e^{−ix·p} dμ_m(p).
/// For spacelike x the leading term is zero.
pub fn kg_packet(f: &PacketFunction, x: &FourVector) -> Result<AsymptoticSample> {
    if x.square() <= 0.0 {
        let direct = spacelike_direct(f, x)?;
        return Ok(AsymptoticSample::new(0.0, C64::new(0.0, 0.0), direct));
    }
    let (lambda, u) = timelike_split(x)?;
    let radial = rest_frame_radial(f, &u, lambda.abs() * f.mass, &packet_sphere())?;
    Ok(AsymptoticSample::new(lambda, kg_leading(f, &u, lambda), radial.direct(lambda)))
}

/// The value at x = 0, used as the scale for spacelike suppression.
pub fn kg_peak(f: &PacketFunction) -> Result<f64> {
    let radial = rest_frame_radial(f, &FourVector::time(), 0.0, &packet_sphere())?;
    Ok(radial.direct(0.0).norm())
}

/// Samples along x = λu with a log–log slope of the error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticLadder {
    pub u: FourVector,
    pub samples: Vec<AsymptoticSample>,
    pub error_slope: f64,
}

fn ladder_slope(samples: &[AsymptoticSample]) -> f64 {
    let xs: Vec<f64> = samples.iter().map(|s| s.lambda.abs().ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.error.max(1e-300).ln()).collect();
    fit_slope(&xs, &ys)
}

/// kg_packet along a ladder of λ with one shared radial table.
pub fn kg_ladder(f: &PacketFunction, u: &FourVector, lambdas: &[f64]) -> Result<AsymptoticLadder> {
    let u = unit_velocity(u)?;
    let max_phase = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs())) * f.mass;
    let radial = rest_frame_radial(f, &u, max_phase, &packet_sphere())?;
    let samples: Vec<AsymptoticSample> = lambdas
        .iter()
        .map(|&l| AsymptoticSample::new(l, kg_leading(f, &u, l), radial.direct(l)))
        .collect();
    let error_slope = ladder_slope(&samples);
    Ok(AsymptoticLadder { u, samples, error_slope })
}

/// Which bilinear combination of packets: e^{−ix·(p+q)} or e^{−ix·(p−q)}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BilinearMode {
    Plus,
    Minus,
}

/// Leading term i sgn(λ) e^{−2imλ}(m/|λ|)³ f(mu,mu) (plus) or (m/|λ|)³ f(mu,mu) (minus).
pub fn bilinear_leading(f2: &TwoPacket, u: &FourVector, lambda: f64, mode: BilinearMode) -> C64 {
    if lambda.abs() <= 1.0 {
        return C64::new(0.0, 0.0);
    }
    let m = f2.mass();
    let mu = u.scale(m);
    let amp = (m / lambda.abs()).powi(3) * f2.value(&mu, &mu);
    match mode {
        BilinearMode::Plus => C64::new(0.0, lambda.signum()) * C64::from_polar(amp, -2.0 * m * lambda),
        BilinearMode::Minus => C64::new(amp, 0.0),
    }
}

struct BilinearTables {
    tables: Vec<(f64, RestFrameRadial, RestFrameRadial)>,
}

impl BilinearTables {
    fn new(f2: &TwoPacket, u: &FourVector, max_phase: f64) -> Result<Self> {
        let sphere = packet_sphere();
        let tables = f2
            .terms
            .iter()
            .map(|(a, g, h)| Ok((*a, rest_frame_radial(g, u, max_phase, &sphere)?, rest_frame_radial(h, u, max_phase, &sphere)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tables })
    }

    /// (2π)^{-3} ∫∫ f(p,q) e^{−ix·(p±q)} dμ dμ along x = λu.
    fn direct(&self, lambda: f64, mode: BilinearMode) -> C64 {
        let second = match mode {
            BilinearMode::Plus => lambda,
            BilinearMode::Minus => -lambda,
        };
        self.tables.iter().map(|(a, g, h)| g.direct(lambda) * h.direct(second) * *a).sum()
    }
}

/// Bilinear packet expansion at a single timelike point.
pub fn bilinear_asymptotics(f2: &TwoPacket, x: &FourVector, mode: BilinearMode) -> Result<AsymptoticSample> {
    let (lambda, u) = timelike_split(x)?;
    let tables = BilinearTables::new(f2, &u, lambda.abs() * f2.mass())?;
    Ok(AsymptoticSample::new(lambda, bilinear_leading(f2, &u, lambda, mode), tables.direct(lambda, mode)))
}

/// Bilinear expansion along a λ ladder.
pub fn bilinear_ladder(f2: &TwoPacket, u: &FourVector, lambdas: &[f64], mode: BilinearMode) -> Result<AsymptoticLadder> {
    let u = unit_velocity(u)?;
    let max_phase = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs())) * f2.mass();
    let tables = BilinearTables::new(f2, &u, max_phase)?;
    let samples: Vec<AsymptoticSample> = lambdas
        .iter()
        .map(|&l| AsymptoticSample::new(l, bilinear_leading(f2, &u, l, mode), tables.direct(l, mode)))
        .collect();
    let error_slope = ladder_slope(&samples);
    Ok(AsymptoticLadder { u, samples, error_slope })
}

/// Mean of the plus-mode direct value over one period π/m starting at λ₀.
pub fn plus_mode_average(f2: &TwoPacket, u: &FourVector, lambda0: f64, samples: usize) -> Result<C64> {
    let u = unit_velocity(u)?;
    let period = PI / f2.mass();
    let tables = BilinearTables::new(f2, &u, (lambda0.abs() + period) * f2.mass())?;
    let sum: C64 = (0..samples)
        .map(|j| tables.direct(lambda0 + period * j as f64 / samples as f64, BilinearMode::Plus))
        .sum();
    Ok(sum / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet() -> PacketFunction {
        PacketFunction::new(1.0, [0.3, -0.1, 0.2], 0.5, [0.2, 0.1, -0.3]).unwrap()
    }

    fn velocity() -> FourVector {
        let v = [0.25, -0.1, 0.15];
        FourVector::new((1.0 + dot3(v, v)).sqrt(), v[0], v[1], v[2])
    }

    #[test]
    fn leading_term_remainder_slope() {
        let ladder = kg_ladder(&packet(), &velocity(), &[20.0, 40.0, 80.0, 160.0]).unwrap();
        assert!(ladder.error_slope <= -2.3, "slope {}", ladder.error_slope);
        assert!(ladder.error_slope >= -2.8, "slope {}", ladder.error_slope);
    }

    #[test]
    fn negative_lambda_is_past_branch() {
        let f = packet();
        let u = velocity();
        let past = kg_packet(&f, &u.scale(-60.0)).unwrap();
        let future = kg_packet(&f, &u.scale(60.0)).unwrap();
        assert!(past.lambda < 0.0);
        assert!((past.direct - future.direct.conj()).norm() < 1e-12);
        assert!((past.leading - future.leading.conj()).norm() < 1e-15);
    }

    #[test]
    fn single_point_matches_ladder() {
        let f = packet();
        let u = velocity();
        let a = kg_packet(&f, &u.scale(40.0)).unwrap();
        let b = kg_ladder(&f, &u, &[40.0, 160.0]).unwrap();
        assert!((a.direct - b.samples[0].direct).norm() < 1e-11);
    }

    #[test]
    fn spacelike_branch_is_suppressed() {
        let f = packet();
        let peak = kg_peak(&f).unwrap();
        let x = FourVector::new(10.0, 30.0, 35.0, -15.0);
        let s = kg_packet(&f, &x.scale(50.0 / (-x.square()).sqrt())).unwrap();
        assert_eq!(s.leading, C64::new(0.0, 0.0));
        assert!(s.direct.norm() < 1e-6 * peak, "{} vs {peak}", s.direct.norm());
    }

    #[test]
    fn packet_off_velocity_has_no_leading_term() {
        let f = PacketFunction::new(1.0, [3.0, 0.0, 0.0], 0.3, [0.0; 3]).unwrap();
        let ladder = kg_ladder(&f, &FourVector::time(), &[20.0, 40.0]).unwrap();
        for s in &ladder.samples {
            assert!(s.leading.norm() < 1e-20);
            assert!(s.direct.norm() < 1e-9, "{}", s.direct.norm());
        }
    }

    #[test]
    fn bilinear_minus_remainder() {
        let f2 = TwoPacket::factorized(packet());
        let ladder = bilinear_ladder(&f2, &velocity(), &[20.0, 40.0, 80.0, 160.0], BilinearMode::Minus).unwrap();
        assert!(ladder.error_slope <= -3.7, "slope {}", ladder.error_slope);
    }

    #[test]
    fn bilinear_factorizes() {
        let g = packet();
        let u = velocity();
        let x = u.scale(35.0);
        let plus = bilinear_asymptotics(&TwoPacket::factorized(g), &x, BilinearMode::Plus).unwrap();
        let single = kg_ladder(&g, &u, &[35.0, 120.0]).unwrap().samples[0].direct;
        assert!((plus.direct - single * single).norm() < 1e-8 * plus.direct.norm().max(1e-300) + 1e-14);
        let lead = kg_leading(&g, &u, 35.0);
        assert!((plus.leading - lead * lead).norm() < 1e-14);
    }

    #[test]
    fn plus_mode_averages_out() {
        let f2 = TwoPacket::factorized(packet());
        let u = velocity();
        let avg = plus_mode_average(&f2, &u, 40.0, 16).unwrap();
        let minus = bilinear_leading(&f2, &u, 40.0, BilinearMode::Minus);
        assert!(avg.norm() < 0.1 * minus.norm(), "{} vs {}", avg.norm(), minus.norm());
    }
}
