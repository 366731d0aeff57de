use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::numerics::minkowski::{CVec4, FourVector};

/// Where a test current is concentrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportClass {
    Spacelike,
    PastCone,
    Generic,
}

/// Closed-form vector test field J(x) with analytic transform
/// Ĵ(p) = (2π)⁻¹ ∫ e^{ip·x} J(x) dx.
pub trait TestCurrent: Send + Sync {
    fn fourier(&self, p: &FourVector) -> CVec4;
    fn value(&self, x: &FourVector) -> [f64; 4];
    fn conserved(&self) -> bool;
    /// `out[a]` is ∂Ĵ/∂p^a. The default uses central differences.
    fn jacobian(&self, p: &FourVector) -> [CVec4; 4] {
        let h = 1e-5;
        std::array::from_fn(|a| {
            let mut e = [0.0; 4];
            e[a] = h;
            let e = FourVector(e);
            (self.fourier(&(*p + e)) - self.fourier(&(*p - e))).scale_re(0.5 / h)
        })
    }
    fn support_class(&self) -> SupportClass {
        SupportClass::Generic
    }
}

/// Euclidean Gaussian e^{-|x-a|²_E / 2σ²}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub center: FourVector,
    pub sigma: f64,
}

impl Gaussian {
    pub fn new(center: FourVector, sigma: f64) -> Self {
        Self { center, sigma }
    }

    pub fn value(&self, x: &FourVector) -> f64 {
        (-(*x - self.center).euclid_sq() / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn fourier(&self, p: &FourVector) -> C64 {
        let s2 = self.sigma * self.sigma;
        let amp = (2.0 * PI * s2).powi(2) / (2.0 * PI) * (-0.5 * s2 * p.euclid_sq()).exp();
        C64::from_polar(amp, p.dot(&self.center))
    }

    /// ∂ĝ/∂p^a.
    pub fn fourier_gradient(&self, p: &FourVector) -> [C64; 4] {
        let g = self.fourier(p);
        let al = self.center.lower();
        let s2 = self.sigma * self.sigma;
        std::array::from_fn(|a| C64::new(-s2 * p[a], al[a]) * g)
    }
}

/// Non-conserved current K(x) = c·g(x) with a constant direction c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCurrent {
    pub profile: Gaussian,
    pub direction: [f64; 4],
}

impl GaussianCurrent {
    pub fn new(center: FourVector, sigma: f64, direction: [f64; 4]) -> Self {
        Self { profile: Gaussian::new(center, sigma), direction }
    }
}

impl TestCurrent for GaussianCurrent {
    fn fourier(&self, p: &FourVector) -> CVec4 {
        let g = self.profile.fourier(p);
        CVec4(self.direction.map(|c| g * c))
    }

    fn value(&self, x: &FourVector) -> [f64; 4] {
        let g = self.profile.value(x);
        self.direction.map(|c| c * g)
    }

    fn conserved(&self) -> bool {
        self.direction.iter().all(|c| *c == 0.0)
    }

    fn jacobian(&self, p: &FourVector) -> [CVec4; 4] {
        let dg = self.profile.fourier_gradient(p);
        std::array::from_fn(|a| CVec4(self.direction.map(|c| dg[a] * c)))
    }
}

/// Conserved, charge-free current J^a = M^{ab} ∂_b g for antisymmetric M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurlCurrent {
    pub profile: Gaussian,
    pub m: [[f64; 4]; 4],
}

impl CurlCurrent {
    /// Builds M from its six independent entries M^{01}, M^{02}, M^{03}, M^{12}, M^{13}, M^{23}.
    pub fn new(center: FourVector, sigma: f64, upper: [f64; 6]) -> Self {
        let mut m = [[0.0; 4]; 4];
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for ((a, b), v) in pairs.iter().zip(upper) {
            m[*a][*b] = v;
            m[*b][*a] = -v;
        }
        Self { profile: Gaussian::new(center, sigma), m }
    }
}

impl TestCurrent for CurlCurrent {
    fn fourier(&self, p: &FourVector) -> CVec4 {
        let g = self.profile.fourier(p);
        let pl = p.lower();
        let mut out = CVec4::zero();
        for a in 0..4 {
            let s: f64 = (0..4).map(|b| self.m[a][b] * pl[b]).sum();
            out[a] = C64::new(0.0, -s) * g;
        }
        out
    }

    fn value(&self, x: &FourVector) -> [f64; 4] {
        let g = self.profile.value(x);
        let d = *x - self.profile.center;
        let s2 = self.profile.sigma * self.profile.sigma;
        let mut out = [0.0; 4];
        for (a, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|b| self.m[a][b] * (-d[b] / s2) * g).sum();
        }
        out
    }

    fn conserved(&self) -> bool {
        true
    }

    fn jacobian(&self, p: &FourVector) -> [CVec4; 4] {
        let g = self.profile.fourier(p);
        let dg = self.profile.fourier_gradient(p);
        let pl = p.lower();
        let metric = [1.0, -1.0, -1.0, -1.0];
        std::array::from_fn(|a| {
            let mut out = CVec4::zero();
            for b in 0..4 {
                let s: f64 = (0..4).map(|c| self.m[b][c] * pl[c]).sum();
                out[b] = C64::new(0.0, -self.m[b][a] * metric[a]) * g + C64::new(0.0, -s) * dg[a];
            }
            out
        })
    }
}

/// Sum of test currents.
pub struct SumCurrent(pub Vec<Box<dyn TestCurrent>>);

impl TestCurrent for SumCurrent {
    fn fourier(&self, p: &FourVector) -> CVec4 {
        self.0.iter().fold(CVec4::zero(), |acc, c| acc + c.fourier(p))
    }

    fn value(&self, x: &FourVector) -> [f64; 4] {
        let mut out = [0.0; 4];
        for c in &self.0 {
            let v = c.value(x);
            for a in 0..4 {
                out[a] += v[a];
            }
        }
        out
    }

    fn conserved(&self) -> bool {
        self.0.iter().all(|c| c.conserved())
    }

    fn jacobian(&self, p: &FourVector) -> [CVec4; 4] {
        let mut out = [CVec4::zero(); 4];
        for c in &self.0 {
            let j = c.jacobian(p);
            for a in 0..4 {
                out[a] = out[a] + j[a];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_hermite_scaled;

    #[test]
    fn gaussian_transform_matches_quadrature() {
        let g = Gaussian::new(FourVector::new(0.3, -0.2, 0.1, 0.5), 0.8);
        let r = gauss_hermite_scaled(24, 0.0, 0.8);
        let p = FourVector::new(0.9, 0.4, -0.7, 0.2);
        // separable: integrate e^{ip·y} over each coordinate with the Gaussian weight
        let mut prod = C64::new(1.0, 0.0);
        let sign = [1.0, -1.0, -1.0, -1.0];
        for a in 0..4 {
            let v: C64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(y, w)| C64::from_polar(*w, sign[a] * p[a] * y))
                .sum();
            prod *= v;
        }
        let direct = prod * C64::from_polar(1.0 / (2.0 * PI), p.dot(&g.center));
        assert!((direct - g.fourier(&p)).norm() < 1e-13);
    }

    struct Numeric<J>(J);

    impl<J: TestCurrent> TestCurrent for Numeric<J> {
        fn fourier(&self, p: &FourVector) -> CVec4 {
            self.0.fourier(p)
        }
        fn value(&self, x: &FourVector) -> [f64; 4] {
            self.0.value(x)
        }
        fn conserved(&self) -> bool {
            self.0.conserved()
        }
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let c = FourVector::new(0.4, -0.3, 0.2, 0.6);
        let p = FourVector::new(0.7, -0.5, 0.3, 0.9);
        let a = GaussianCurrent::new(c, 0.9, [1.0, 0.2, -0.5, 0.3]);
        let b = CurlCurrent::new(c, 0.8, [0.3, 1.0, -0.4, 0.2, 0.7, -1.1]);
        let checks: [(&dyn TestCurrent, &dyn TestCurrent); 2] = [(&a, &Numeric(a)), (&b, &Numeric(b))];
        for (exact, num) in checks {
            let (x, y) = (exact.jacobian(&p), num.jacobian(&p));
            for k in 0..4 {
                assert!((x[k] - y[k]).norm() < 1e-8, "{k}");
            }
        }
    }

    #[test]
    fn curl_current_is_conserved() {
        let j = CurlCurrent::new(FourVector::new(0.0, 0.5, 0.0, 0.0), 1.0, [0.3, 1.0, -0.4, 0.2, 0.7, -1.1]);
        let p = FourVector::new(1.3, 0.2, -0.5, 0.9);
        let jp = j.fourier(&p);
        assert!(jp.dot_real(&p).norm() < 1e-15 * jp.norm().max(1.0));
    }
}
