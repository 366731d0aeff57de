use num_complex::Complex64 as C64;

use crate::ir_projection::GradientClass;
use crate::numerics::sph::lm_from_index;
use crate::{Error, Result};

/// Number of explicit terms summed before switching to the integral tail estimate.
const EXPLICIT_TERMS: usize = 100_000;

/// Diagonal covariance on the IR sector with eigenvalues κ (ℓ(ℓ+1))^{-2n}
/// on the real harmonics Y_ℓm, 1 ≤ ℓ ≤ lmax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceB {
    pub kappa: f64,
    pub n: u32,
    pub lmax: usize,
}

pub fn build_covariance(kappa: f64, n: u32, lmax: usize) -> Result<CovarianceB> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("κ must be positive, got {kappa}")));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("covariance exponent n must be at least 1".into()));
    }
    if lmax < 1 {
        return Err(Error::InvalidArgument("covariance needs lmax ≥ 1".into()));
    }
    Ok(CovarianceB { kappa, n, lmax })
}

impl CovarianceB {
    pub fn eigenvalue(&self, l: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        let ll = (l * (l + 1)) as f64;
        self.kappa * ll.powi(-2 * self.n as i32)
    }

    /// Σ (2ℓ+1) λ_ℓ^k over all ℓ ≥ 1: explicit partial sum plus an integral tail.
    fn power_trace(&self, k: i32) -> f64 {
        let mut partial = 0.0;
        for l in (1..=EXPLICIT_TERMS).rev() {
            partial += (2 * l + 1) as f64 * self.eigenvalue(l).powi(k);
        }
        // ∫_{L+1/2}^∞ (2x+1) κ^k (x(x+1))^{-2nk} dx
        let x = EXPLICIT_TERMS as f64 + 0.5;
        let e = 2.0 * self.n as f64 * k as f64;
        let tail = self.kappa.powi(k) * (x * (x + 1.0)).powf(1.0 - e) / (e - 1.0);
        partial + tail
    }

    pub fn trace(&self) -> f64 {
        self.power_trace(1)
    }

    pub fn trace_sq(&self) -> f64 {
        self.power_trace(2)
    }

    /// Σ_{ℓ ≤ lmax} (2ℓ+1) λ_ℓ.
    pub fn partial_trace(&self, lmax: usize) -> f64 {
        (1..=lmax).map(|l| (2 * l + 1) as f64 * self.eigenvalue(l)).sum()
    }

    /// Ratio of the largest to the smallest retained eigenvalue.
    pub fn condition_number(&self) -> f64 {
        self.eigenvalue(1) / self.eigenvalue(self.lmax)
    }

    /// Applies B^s (s = ±½ in practice) to a class in harmonic coefficients.
    pub fn apply_power(&self, class: &GradientClass, s: f64) -> GradientClass {
        let coeffs = class
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let l = lm_from_index(k).0;
                if l == 0 || l > self.lmax {
                    C64::new(0.0, 0.0)
                } else {
                    c * self.eigenvalue(l).powf(s)
                }
            })
            .collect();
        GradientClass { coeffs, lmax: class.lmax }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_trace() {
        let b = build_covariance(1.0, 1, 24).unwrap();
        assert!((b.trace() - 1.0).abs() < 1e-10);
        // partial sum telescopes to 1 − 1/(L+1)²
        assert!((b.partial_trace(24) - (1.0 - 1.0 / 625.0)).abs() < 1e-14);
        let b2 = build_covariance(2.5, 1, 24).unwrap();
        assert!((b2.trace() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_covariance(0.0, 1, 4).is_err());
        assert!(build_covariance(1.0, 0, 4).is_err());
    }
}
