//! Real orthonormal spherical harmonics and their surface gradients.
//!
//! Index convention: `lm_index(l, m) = l² + l + m` with `-l ≤ m ≤ l`.
//! For m > 0 the function is √2 P̄_lm cos mφ, for m < 0 it is √2 P̄_l|m| sin |m|φ.

use std::f64::consts::PI;

pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

pub fn lm_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Inverse of [`lm_index`].
pub fn lm_from_index(k: usize) -> (usize, i64) {
    let l = (k as f64).sqrt().floor() as usize;
    let l = if (l + 1) * (l + 1) <= k { l + 1 } else { l };
    (l, k as i64 - (l * l + l) as i64)
}

fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values P̄_lm(cosθ) and dP̄_lm/dθ for 0 ≤ m ≤ l ≤ lmax,
/// stored triangularly.
pub fn legendre_table(lmax: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let n = (lmax + 1) * (lmax + 2) / 2;
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let (s, c) = theta.sin_cos();
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[tri(m - 1, m - 1)];
    }
    for m in 0..lmax {
        p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * c * p[tri(m, m)];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[tri(l, m)] = a * (c * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    let sc = if s.abs() < 1e-12 { 1e-12f64.copysign(s + 0.0) } else { s };
    for l in 1..=lmax {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let lower = if m < l {
                ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf - mf) * (lf + mf)).sqrt() * p[tri(l - 1, m)]
            } else {
                0.0
            };
            dp[tri(l, m)] = (lf * c * p[tri(l, m)] - lower) / sc;
        }
    }
    (p, dp)
}

/// Values of all real harmonics up to `lmax` at (θ, φ).
pub fn real_ylm(lmax: usize, theta: f64, phi: f64) -> Vec<f64> {
    let (p, _) = legendre_table(lmax, theta);
    let mut out = vec![0.0; lm_count(lmax)];
    let r2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        out[lm_index(l, 0)] = p[tri(l, 0)];
        for m in 1..=l {
            let (sm, cm) = (m as f64 * phi).sin_cos();
            out[lm_index(l, m as i64)] = r2 * p[tri(l, m)] * cm;
            out[lm_index(l, -(m as i64))] = r2 * p[tri(l, m)] * sm;
        }
    }
    out
}

/// Values and Cartesian surface gradients ∇_S Y of all real harmonics up to `lmax`.
pub fn real_ylm_with_grad(lmax: usize, theta: f64, phi: f64) -> (Vec<f64>, Vec<[f64; 3]>) {
    let th = theta.clamp(1e-9, PI - 1e-9);
    let (p, dp) = legendre_table(lmax, th);
    let (st, ct) = th.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    let n = lm_count(lmax);
    let mut vals = vec![0.0; n];
    let mut grads = vec![[0.0; 3]; n];
    let r2 = std::f64::consts::SQRT_2;
    let combine = |dth: f64, dph_over_sin: f64| {
        [
            e_theta[0] * dth + e_phi[0] * dph_over_sin,
            e_theta[1] * dth + e_phi[1] * dph_over_sin,
            e_theta[2] * dth + e_phi[2] * dph_over_sin,
        ]
    };
    for l in 0..=lmax {
        let k0 = lm_index(l, 0);
        vals[k0] = p[tri(l, 0)];
        grads[k0] = combine(dp[tri(l, 0)], 0.0);
        for m in 1..=l {
            let mf = m as f64;
            let (sm, cm) = (mf * phi).sin_cos();
            let pv = p[tri(l, m)];
            let dv = dp[tri(l, m)];
            let kp = lm_index(l, m as i64);
            let km = lm_index(l, -(m as i64));
            vals[kp] = r2 * pv * cm;
            vals[km] = r2 * pv * sm;
            grads[kp] = combine(r2 * dv * cm, -r2 * mf * pv * sm / st);
            grads[km] = combine(r2 * dv * sm, r2 * mf * pv * cm / st);
        }
    }
    (vals, grads)
}

pub fn direction_angles(n: [f64; 3]) -> (f64, f64) {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    (theta, phi)
}

pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for l in 0..12 {
            for m in -(l as i64)..=(l as i64) {
                assert_eq!(lm_from_index(lm_index(l, m)), (l, m));
            }
        }
    }

    #[test]
    fn low_order_closed_forms() {
        let (t, p) = (0.7, 1.9);
        let y = real_ylm(2, t, p);
        let n = direction(t, p);
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((y[lm_index(1, 0)] - c1 * n[2]).abs() < 1e-14);
        assert!((y[lm_index(1, 1)] - c1 * n[0]).abs() < 1e-14);
        assert!((y[lm_index(1, -1)] - c1 * n[1]).abs() < 1e-14);
        let c20 = (5.0 / (16.0 * PI)).sqrt();
        assert!((y[lm_index(2, 0)] - c20 * (3.0 * n[2] * n[2] - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let lmax = 6;
        let (t, p) = (1.1, -0.4);
        let (_, g) = real_ylm_with_grad(lmax, t, p);
        let h = 1e-6;
        let yp = real_ylm(lmax, t + h, p);
        let ym = real_ylm(lmax, t - h, p);
        let zp = real_ylm(lmax, t, p + h);
        let zm = real_ylm(lmax, t, p - h);
        let (st, ct) = t.sin_cos();
        let e_theta = [ct * p.cos(), ct * p.sin(), -st];
        let e_phi = [-p.sin(), p.cos(), 0.0];
        for k in 0..lm_count(lmax) {
            let dth = (yp[k] - ym[k]) / (2.0 * h);
            let dph = (zp[k] - zm[k]) / (2.0 * h) / st;
            for i in 0..3 {
                let fd = e_theta[i] * dth + e_phi[i] * dph;
                assert!((fd - g[k][i]).abs() < 1e-7, "k={k}");
            }
        }
    }
}
