//! Asymptotic-limit computations: the packet kernel F, Klein–Gordon packet
//! expansions, spacelike and timelike limit functionals, scaled-limit
//! residuals and the null-asymptotics weight.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::numerics::bessel;
use crate::numerics::minkowski::FourVector;
use crate::numerics::quadrature::{uniform_composite_gl, Rule};
use crate::{Error, Result};

mod packet;
mod scaled;
mod spacelike;

pub use packet::{
    bilinear_asymptotics, bilinear_ladder, bilinear_leading, kg_ladder, kg_leading, kg_packet, kg_peak, plus_mode_average,
    AsymptoticLadder, AsymptoticSample, BilinearMode, PacketFunction, TwoPacket,
};
pub use scaled::{null_factor, null_weight, scaled_limit_residuals, NullReport, NullRung, ScaledReport, ScaledRung};
pub use spacelike::{
    coulomb_c, coulomb_c_gaussian_rest, current_limit_weight, phi_direct, spacelike_phi, v_zero, PHI_NOISE_FLOOR, PhiReport, Shell,
    PhiSettings, SupportRegion, TruncatedCurrent, Window,
};

/// F(w) = (1/2√w²)(Y₁(√w²) − i sgn(w⁰) J₁(√w²)) for timelike w.
pub fn packet_kernel_f(w: &FourVector) -> Result<C64> {
    let w2 = w.square();
    if w2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("packet kernel needs a timelike argument, w² = {w2}")));
    }
    Ok(packet_kernel_f_radial(w2.sqrt(), w[0].signum()))
}

/// F as a function of z = √w² and sgn(w⁰).
pub fn packet_kernel_f_radial(z: f64, sign: f64) -> C64 {
    let (j1, y1) = bessel::bessel_pair(bessel::Order::One, z);
    C64::new(y1, -sign * j1) / (2.0 * z)
}

/// dF/dz at fixed sgn(w⁰).
pub fn packet_kernel_f_radial_derivative(z: f64, sign: f64) -> C64 {
    let (j0, y0) = bessel::bessel_pair(bessel::Order::Zero, z);
    let (j1, y1) = bessel::bessel_pair(bessel::Order::One, z);
    let dj1 = j0 - j1 / z;
    let dy1 = y0 - y1 / z;
    C64::new(dy1, -sign * dj1) / (2.0 * z) - C64::new(y1, -sign * j1) / (2.0 * z * z)
}

/// Leading large-z form (2π)^{-1/2} z^{-3/2} e^{i sgn (z + 3π/4)}.
pub fn packet_kernel_f_asymptotic(w: &FourVector) -> Result<C64> {
    let w2 = w.square();
    if w2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("packet kernel needs a timelike argument, w² = {w2}")));
    }
    let z = w2.sqrt();
    Ok(C64::from_polar((2.0 * PI).powf(-0.5) * z.powf(-1.5), w[0].signum() * (z + 0.75 * PI)))
}

/// Smooth bump d(λ) = C exp(−1/((λ−a)(b−λ))) on (a, b), normalized to ∫d = 1.
#[derive(Debug, Clone, Serialize)]
pub struct BumpFunction {
    pub a: f64,
    pub b: f64,
    norm: f64,
    #[serde(skip)]
    rule: Rule,
}

impl Default for BumpFunction {
    fn default() -> Self {
        Self::new(0.5, 1.5).expect("valid default support")
    }
}

impl BumpFunction {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::InvalidArgument(format!("bump support must satisfy 0 < a < b, got ({a}, {b})")));
        }
        let rule = uniform_composite_gl(a, b, 16, 16);
        let mut out = Self { a, b, norm: 1.0, rule };
        out.norm = out.rule.integrate(|x| out.raw(x));
        Ok(out)
    }

    fn raw(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        (-1.0 / ((x - self.a) * (self.b - x))).exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.raw(x) / self.norm
    }

    /// Quadrature rule on the support.
    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// ∫ d.
    pub fn integral(&self) -> f64 {
        self.rule.integrate(|x| self.value(x))
    }

    /// d̃(ω) = (2π)⁻¹ ∫ e^{iωλ} d(λ) dλ.
    pub fn fourier(&self, omega: f64) -> C64 {
        let panels = (omega.abs() * (self.b - self.a) / PI).ceil() as usize;
        let fine;
        let rule = if panels <= 16 {
            &self.rule
        } else {
            fine = uniform_composite_gl(self.a, self.b, panels, 16);
            &fine
        };
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| C64::from_polar(w * self.value(*x), omega * x))
            .sum::<C64>()
            / (2.0 * PI)
    }

    /// dd̃/dω.
    pub fn fourier_derivative(&self, omega: f64) -> C64 {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(x, w)| C64::new(0.0, *x) * C64::from_polar(w * self.value(*x), omega * x))
            .sum::<C64>()
            / (2.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_matches_asymptotic_form() {
        for sign in [1.0, -1.0] {
            let w = FourVector::new(sign * 50.0, 30.0, 0.0, 0.0);
            let f = packet_kernel_f(&w).unwrap();
            let a = packet_kernel_f_asymptotic(&w).unwrap();
            assert!((f - a).norm() < 0.03 * a.norm());
        }
    }

    #[test]
    fn f_conjugation() {
        let w = FourVector::new(3.0, 1.0, -0.5, 0.7);
        let mut wr = w;
        wr.0[0] = -w[0];
        let (a, b) = (packet_kernel_f(&w).unwrap(), packet_kernel_f(&wr).unwrap());
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn f_rejects_spacelike() {
        assert!(packet_kernel_f(&FourVector::new(1.0, 2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn f_derivative_matches_differences() {
        for z in [0.7, 5.0, 12.0, 30.0] {
            let h = 1e-6;
            let d = (packet_kernel_f_radial(z + h, 1.0) - packet_kernel_f_radial(z - h, 1.0)) / (2.0 * h);
            assert!((d - packet_kernel_f_radial_derivative(z, 1.0)).norm() < 1e-7, "{z}");
        }
    }

    #[test]
    fn bump_normalization() {
        let d = BumpFunction::default();
        assert!((d.integral() - 1.0).abs() < 1e-12);
        assert!((2.0 * PI * d.fourier(0.0) - 1.0).norm() < 1e-12);
        assert_eq!(d.value(0.4), 0.0);
        assert_eq!(d.value(1.6), 0.0);
    }
}
