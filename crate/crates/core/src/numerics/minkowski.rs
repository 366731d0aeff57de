use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

/// Metric diagonal for signature (+,−,−,−).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Real contravariant 4-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self([x0, x1, x2, x3])
    }

    /// The null vector (1, n̂) for a spatial direction `n`.
    pub fn null(n: [f64; 3]) -> Self {
        Self([1.0, n[0], n[1], n[2]])
    }

    pub fn time() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2] - self.0[3] * other.0[3]
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean squared norm Σ (x^a)².
    pub fn euclid_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn spatial_norm(&self) -> f64 {
        (self.0[1] * self.0[1] + self.0[2] * self.0[2] + self.0[3] * self.0[3]).sqrt()
    }

    /// Components with the index lowered.
    pub fn lower(&self) -> Self {
        Self([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn to_complex(&self) -> CVec4 {
        CVec4(self.0.map(|v| C64::new(v, 0.0)))
    }

    /// Pure boost taking the rest frame to the frame where t maps to `u`
    /// (u on the unit hyperboloid). Returns the 4×4 matrix acting on
    /// contravariant components.
    pub fn boost_matrix(u: &FourVector) -> [[f64; 4]; 4] {
        let g = u.0[0];
        let uv = u.spatial();
        let mut m = [[0.0; 4]; 4];
        m[0][0] = g;
        for i in 0..3 {
            m[0][i + 1] = uv[i];
            m[i + 1][0] = uv[i];
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i + 1][j + 1] = delta + uv[i] * uv[j] / (g + 1.0);
            }
        }
        m
    }

    pub fn transform(m: &[[f64; 4]; 4], v: &FourVector) -> FourVector {
        let mut out = [0.0; 4];
        for (a, row) in m.iter().enumerate() {
            out[a] = row.iter().zip(v.0.iter()).map(|(x, y)| x * y).sum();
        }
        FourVector(out)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for FourVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for FourVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Neg for FourVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for FourVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Complex contravariant 4-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec4(pub [C64; 4]);

impl CVec4 {
    pub fn zero() -> Self {
        Self([C64::new(0.0, 0.0); 4])
    }

    /// Bilinear Minkowski product (no conjugation).
    pub fn dot(&self, o: &Self) -> C64 {
        self.0[0] * o.0[0] - self.0[1] * o.0[1] - self.0[2] * o.0[2] - self.0[3] * o.0[3]
    }

    /// Sesquilinear Minkowski product conj(self)·o.
    pub fn cdot(&self, o: &Self) -> C64 {
        self.0[0].conj() * o.0[0]
            - self.0[1].conj() * o.0[1]
            - self.0[2].conj() * o.0[2]
            - self.0[3].conj() * o.0[3]
    }

    pub fn dot_real(&self, v: &FourVector) -> C64 {
        self.0[0] * v.0[0] - self.0[1] * v.0[1] - self.0[2] * v.0[2] - self.0[3] * v.0[3]
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    /// Euclidean norm of the components, used for relative tolerances.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Components with the index lowered (or raised; the metric is its own inverse).
    pub fn lower(&self) -> Self {
        Self([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    /// Tangential representative modulo l = (1, n̂): removes the l-component
    /// so that the time component vanishes.
    pub fn tangent_rep(&self, n: [f64; 3]) -> [C64; 3] {
        let a = self.0[0];
        [self.0[1] - a * n[0], self.0[2] - a * n[1], self.0[3] - a * n[2]]
    }
}

impl Add for CVec4 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for CVec4 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Mul<C64> for CVec4 {
    type Output = Self;
    fn mul(self, s: C64) -> Self {
        self.scale(s)
    }
}

impl Index<usize> for CVec4 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec4 {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = dot3(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `n`.
pub fn orthonormal_frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let trial = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalize3(cross3(trial, n));
    let e2 = cross3(n, e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_vector_is_null() {
        let l = FourVector::null(normalize3([0.3, -0.2, 0.9]));
        assert!(l.square().abs() < 1e-15);
    }

    #[test]
    fn boost_maps_time_axis_to_u() {
        let v = [0.3, -1.2, 0.4];
        let u = FourVector::new((1.0 + dot3(v, v)).sqrt(), v[0], v[1], v[2]);
        let m = FourVector::boost_matrix(&u);
        let t = FourVector::transform(&m, &FourVector::time());
        for a in 0..4 {
            assert!((t[a] - u[a]).abs() < 1e-14);
        }
        let x = FourVector::new(0.7, 0.1, -2.0, 0.5);
        let y = FourVector::transform(&m, &x);
        assert!((x.square() - y.square()).abs() < 1e-13);
    }
}
