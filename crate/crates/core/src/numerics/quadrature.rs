use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine map of a rule on [-1, 1] onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|x| c + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn append(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// Legendre polynomial P_n(x) and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss–Legendre rule with `n` points on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = -(PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Composite Gauss–Legendre rule over consecutive panels given by `breaks`.
pub fn composite_gl(breaks: &[f64], per_panel: usize) -> Rule {
    let base = gauss_legendre(per_panel);
    let mut out = Rule { nodes: Vec::new(), weights: Vec::new() };
    for w in breaks.windows(2) {
        out.append(base.mapped(w[0], w[1]));
    }
    out
}

/// Composite Gauss–Legendre on [a, b] with `panels` equal panels.
pub fn uniform_composite_gl(a: f64, b: f64, panels: usize, per_panel: usize) -> Rule {
    let breaks: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
    composite_gl(&breaks, per_panel)
}

/// Rule for ∫_{lo}^{hi} f(ω) dω obtained by Gauss–Legendre in t = ln ω.
/// The weights already include the Jacobian ω.
pub fn log_rule(lo: f64, hi: f64, panels: usize, per_panel: usize) -> Rule {
    let r = uniform_composite_gl(lo.ln(), hi.ln(), panels, per_panel);
    Rule {
        nodes: r.nodes.iter().map(|t| t.exp()).collect(),
        weights: r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.exp()).collect(),
    }
}

/// Gauss–Hermite rule for ∫ e^{-x²} f(x) dx (weights include e^{-x²}).
pub fn gauss_hermite(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    let mut rule_nodes = vec![0.0; n];
    let mut rule_weights = vec![0.0; n];
    for i in 0..m {
        rule_nodes[i] = -nodes[i];
        rule_weights[i] = weights[i];
        rule_nodes[n - 1 - i] = nodes[i];
        rule_weights[n - 1 - i] = weights[i];
    }
    Rule { nodes: rule_nodes, weights: rule_weights }
}

/// Gauss–Hermite rule for ∫ f(x) e^{-(x-c)²/(2σ²)} dx, weights including the Gaussian.
pub fn gauss_hermite_scaled(n: usize, center: f64, sigma: f64) -> Rule {
    let gh = gauss_hermite(n);
    let s = std::f64::consts::SQRT_2 * sigma;
    Rule {
        nodes: gh.nodes.iter().map(|x| center + s * x).collect(),
        weights: gh.weights.iter().map(|w| w * s).collect(),
    }
}

/// Weights for ∫_{x_j}^{x_{j+1}} of the degree-7 interpolant through eight
/// consecutive unit-spaced nodes, for each position of the interval in the stencil.
fn cumulative_weights() -> [[f64; 8]; 7] {
    let gl = gauss_legendre(8);
    let mut out = [[0.0; 8]; 7];
    for (pos, row) in out.iter_mut().enumerate() {
        let r = gl.mapped(pos as f64, pos as f64 + 1.0);
        for (k, wk) in row.iter_mut().enumerate() {
            *wk = r.integrate(|x| {
                (0..8)
                    .filter(|&j| j != k)
                    .map(|j| (x - j as f64) / (k as f64 - j as f64))
                    .product::<f64>()
            });
        }
    }
    out
}

/// Running integral C_j = ∫_{x_0}^{x_j} f on a uniform grid with spacing `h`,
/// using local degree-7 interpolation (needs at least eight samples).
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 8, "cumulative integration needs at least eight samples");
    let w = cumulative_weights();
    let mut out = vec![0.0; n];
    for j in 0..n - 1 {
        let start = j.saturating_sub(3).min(n - 8);
        let inc: f64 = w[j - start].iter().enumerate().map(|(k, wk)| wk * values[start + k]).sum();
        out[j + 1] = out[j] + inc * h;
    }
    out
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

/// Adaptive Gauss–Kronrod-free Simpson quadrature, used only as a test oracle.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        let r = gauss_legendre(7);
        for k in 0..14 {
            let got = r.integrate(|x| x.powi(k));
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "k={k}");
        }
        assert!((gauss_legendre(40).weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gh_moments() {
        let r = gauss_hermite(20);
        let sp = PI.sqrt();
        assert!((r.integrate(|_| 1.0) - sp).abs() < 1e-13);
        assert!((r.integrate(|x| x * x) - sp / 2.0).abs() < 1e-13);
        assert!((r.integrate(|x| x.powi(4)) - 3.0 * sp / 4.0).abs() < 1e-12);
        let s = gauss_hermite_scaled(16, 1.5, 0.3);
        let norm = (2.0 * PI).sqrt() * 0.3;
        assert!((s.integrate(|_| 1.0) - norm).abs() < 1e-13);
        assert!((s.integrate(|x| x) - 1.5 * norm).abs() < 1e-13);
    }

    #[test]
    fn log_rule_integrates_gaussian() {
        let r = log_rule(1e-8, 12.0, 40, 10);
        let got = r.integrate(|w| (-w * w).exp());
        assert!((got - PI.sqrt() / 2.0).abs() < 1e-8);
    }

    #[test]
    fn cumulative_matches_primitive() {
        let h = 0.01;
        let xs: Vec<f64> = (0..400).map(|i| i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let c = cumulative_integral(&f, h);
        for (x, ci) in xs.iter().zip(&c) {
            assert!((ci - x.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn simpson_oracle() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
