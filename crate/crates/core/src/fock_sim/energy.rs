use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use rayon::prelude::*;

use super::CovarianceB;
use crate::numerics::quadrature::{uniform_composite_gl, Rule};
use crate::profiles::HFunction;
use crate::{Error, Result};

/// Closed-form energy moments of ω_h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMoments {
    pub m0: f64,
    pub m1: f64,
    pub trace: f64,
    pub trace_sq: f64,
    /// ω_h(P⁰)
    pub energy: f64,
    /// ω_h((P⁰)²)
    pub second: f64,
    pub variance: f64,
}

fn moment_rule() -> Rule {
    uniform_composite_gl(0.0, 40.0, 160, 16)
}

/// m₀ = ∫₀^∞ |h̃(u)|² du and m₁ = ∫₀^∞ |h̃(u)|² u du for separable h̃.
pub fn h_moments(h: &HFunction) -> Result<(f64, f64)> {
    let g = h
        .profile()
        .ok_or_else(|| Error::UnsupportedForm(format!("h̃ '{}' is not of the form g(ω t·l)", h.label())))?;
    let r = moment_rule();
    let m0 = r.integrate(|u| g(u).norm_sqr());
    let m1 = r.integrate(|u| g(u).norm_sqr() * u);
    let tail = g(40.0).norm_sqr();
    if tail > 1e-20 {
        return Err(Error::ResolutionExceeded(format!("h̃ not decayed at u = 40: |h̃|² = {tail:e}")));
    }
    Ok((m0, m1))
}

pub fn energy_moments(h: &HFunction, b: &CovarianceB) -> Result<EnergyMoments> {
    let (m0, m1) = h_moments(h)?;
    let trace = b.trace();
    let trace_sq = b.trace_sq();
    Ok(EnergyMoments {
        m0,
        m1,
        trace,
        trace_sq,
        energy: m0 * trace,
        second: m1 * trace + m0 * m0 * (trace * trace + 2.0 * trace_sq),
        variance: m1 * trace + 2.0 * m0 * m0 * trace_sq,
    })
}

/// Monte Carlo estimate of the energy mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub samples: usize,
    pub energy: f64,
    pub energy_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

const CHUNK: usize = 1024;

/// Draws ‖f‖² for f ~ N(0, B): per degree ℓ ≤ `l_mc` the sum over its 2ℓ+1 real
/// modes is λ_ℓ χ²_{2ℓ+1}; the remaining degrees contribute their mean.
fn draw_norms(b: &CovarianceB, samples: usize, seed: u64, l_mc: usize) -> Vec<f64> {
    let dists: Vec<(f64, ChiSquared<f64>)> = (1..=l_mc)
        .map(|l| (b.eigenvalue(l), ChiSquared::new((2 * l + 1) as f64).expect("positive dof")))
        .collect();
    let tail_mean = b.trace() - b.partial_trace(l_mc);
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len)
                .map(|_| {
                    // sum from the smallest eigenvalues up for accuracy
                    let mut s = 0.0;
                    for (lam, d) in dists.iter().rev() {
                        s += lam * d.sample(&mut rng);
                    }
                    s + tail_mean
                })
                .collect()
        })
        .collect();
    parts.concat()
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

pub fn mc_energy_oracle(h: &HFunction, b: &CovarianceB, samples: usize, seed: u64, l_mc: usize) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
    }
    let (m0, m1) = h_moments(h)?;
    let norms = draw_norms(b, samples, seed, l_mc);
    let x: Vec<f64> = norms.iter().map(|s| m0 * s).collect();
    let (ex, sx) = mean_sd(&x);
    let y: Vec<f64> = norms.iter().zip(&x).map(|(s, xi)| m1 * s + (xi - ex) * (xi - ex)).collect();
    let (ey, sy) = mean_sd(&y);
    let n = samples as f64;
    Ok(McEstimate {
        samples,
        energy: ex,
        energy_stderr: sx / n.sqrt(),
        variance: ey,
        variance_stderr: sy / n.sqrt(),
    })
}

/// Least-squares slope of log(stderr) against log(N).
pub fn stderr_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, s)| s.ln()).collect();
    fit_slope(&xs, &ys)
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_sim::build_covariance;

    #[test]
    fn gaussian_h_moments() {
        let (m0, m1) = h_moments(&HFunction::gaussian(1.0)).unwrap();
        assert!((m0 - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-13);
        assert!((m1 - 0.25).abs() < 1e-13);
        let (a0, a1) = h_moments(&HFunction::gaussian(2.0)).unwrap();
        assert!((a0 - m0 / 2.0).abs() < 1e-13);
        assert!((a1 - m1 / 4.0).abs() < 1e-13);
    }

    #[test]
    fn mc_is_deterministic() {
        let b = build_covariance(1.0, 1, 24).unwrap();
        let h = HFunction::gaussian(1.0);
        let a = mc_energy_oracle(&h, &b, 3000, 7, 32).unwrap();
        let c = mc_energy_oracle(&h, &b, 3000, 7, 32).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn non_separable_rejected() {
        let b = build_covariance(1.0, 1, 8).unwrap();
        let h = HFunction::general(|w, n| num_complex::Complex64::new((-(w * (1.0 + n[2])).powi(2)).exp(), 0.0), "aniso");
        assert!(matches!(energy_moments(&h, &b), Err(Error::UnsupportedForm(_))));
    }
}
