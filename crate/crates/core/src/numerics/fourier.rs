//! Uniform-grid transforms between the spectral variable ω and the
//! light-front variable s, with W(s) = ∫ e^{-iωs} W̃(ω) dω.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Uniform grid of `n` frequencies ω_k = k·dω, k = -n/2 … n/2 - 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub n: usize,
    pub d_omega: f64,
}

impl UniformGrid {
    pub fn new(n: usize, d_omega: f64) -> Self {
        assert!(n >= 4 && n % 2 == 0, "grid size must be even");
        Self { n, d_omega }
    }

    /// Grid with period `period` in s and maximal frequency close to `omega_max`.
    pub fn for_window(period: f64, omega_max: f64) -> Self {
        let d_omega = 2.0 * std::f64::consts::PI / period;
        let half = (omega_max / d_omega).ceil() as usize;
        Self::new((2 * half).next_power_of_two().max(4), d_omega)
    }

    pub fn d_s(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n as f64 * self.d_omega)
    }

    /// Frequencies in ascending order.
    pub fn omegas(&self) -> Vec<f64> {
        let h = (self.n / 2) as i64;
        (-h..h).map(|k| k as f64 * self.d_omega).collect()
    }

    /// Light-front samples in ascending order.
    pub fn s_values(&self) -> Vec<f64> {
        let h = (self.n / 2) as i64;
        let ds = self.d_s();
        (-h..h).map(|j| j as f64 * ds).collect()
    }

    /// Evaluates W(s_j) = Σ_k dω W̃(ω_k) e^{-iω_k s_j} for spectral samples
    /// given in ascending ω order; output in ascending s order.
    pub fn to_s(&self, spectral: &[C64]) -> Vec<C64> {
        assert_eq!(spectral.len(), self.n);
        let h = self.n / 2;
        let mut buf: Vec<C64> = (0..self.n).map(|k| spectral[(k + h) % self.n]).collect();
        FftPlanner::new().plan_fft_forward(self.n).process(&mut buf);
        (0..self.n).map(|j| buf[(j + h) % self.n] * self.d_omega).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_pair() {
        // W̃(ω) = e^{-ω²/2} ↔ W(s) = √(2π) e^{-s²/2}
        let g = UniformGrid::for_window(40.0, 12.0);
        let spec: Vec<C64> = g.omegas().iter().map(|w| C64::new((-w * w / 2.0).exp(), 0.0)).collect();
        let w = g.to_s(&spec);
        for (s, v) in g.s_values().iter().zip(&w) {
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-s * s / 2.0).exp();
            assert!((v - exact).norm() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn shift_sign() {
        // e^{iωa} in spectrum shifts W to s = a.
        let a = 1.7;
        let g = UniformGrid::for_window(40.0, 12.0);
        let spec: Vec<C64> = g
            .omegas()
            .iter()
            .map(|w| C64::from_polar((-w * w / 2.0).exp(), w * a))
            .collect();
        let w = g.to_s(&spec);
        for (s, v) in g.s_values().iter().zip(&w) {
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-(s - a) * (s - a) / 2.0).exp();
            assert!((v - exact).norm() < 1e-12);
        }
    }
}
