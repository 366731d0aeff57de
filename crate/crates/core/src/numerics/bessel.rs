//! Bessel functions J₀, J₁, Y₀, Y₁ of real positive argument.
//!
//! Three evaluation paths are kept separately callable: power series,
//! integral representation and Hankel asymptotic expansion. The public
//! dispatchers pick series for x ≤ 8, the integral for 8 < x ≤ 25 and the
//! asymptotic expansion above.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::quadrature::{gauss_legendre, Rule};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Supported integer orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Zero,
    One,
}

impl Order {
    fn n(self) -> i32 {
        match self {
            Order::Zero => 0,
            Order::One => 1,
        }
    }
}

pub fn j0(x: f64) -> f64 {
    bessel_j(Order::Zero, x)
}

pub fn j1(x: f64) -> f64 {
    bessel_j(Order::One, x)
}

pub fn y0(x: f64) -> f64 {
    bessel_y(Order::Zero, x)
}

pub fn y1(x: f64) -> f64 {
    bessel_y(Order::One, x)
}

pub fn bessel_j(order: Order, x: f64) -> f64 {
    if x < 0.0 {
        return match order {
            Order::Zero => bessel_j(order, -x),
            Order::One => -bessel_j(order, -x),
        };
    }
    if x <= 8.0 {
        series(order, x).0
    } else if x <= 25.0 {
        integral(order, x).0
    } else {
        hankel(order, x).0
    }
}

pub fn bessel_y(order: Order, x: f64) -> f64 {
    assert!(x > 0.0, "Y_n requires a positive argument");
    if x <= 8.0 {
        series(order, x).1
    } else if x <= 25.0 {
        integral(order, x).1
    } else {
        hankel(order, x).1
    }
}

/// (J_n(x), Y_n(x)) for x > 0 from a single evaluation path.
pub fn bessel_pair(order: Order, x: f64) -> (f64, f64) {
    assert!(x > 0.0, "Y_n requires a positive argument");
    if x <= 8.0 {
        series(order, x)
    } else if x <= 25.0 {
        integral(order, x)
    } else {
        hankel(order, x)
    }
}

/// Ascending power series, returns (J_n, Y_n).
pub fn series(order: Order, x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    match order {
        Order::Zero => {
            let mut term = 1.0;
            let mut j = 1.0;
            let mut h = 0.0;
            let mut ysum = 0.0;
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * kf);
                h += 1.0 / kf;
                j += term;
                ysum -= term * h;
                if term.abs() < 1e-18 * j.abs().max(1e-300) && k > 5 {
                    break;
                }
            }
            (j, 2.0 / PI * (lg * j + ysum))
        }
        Order::One => {
            let half = 0.5 * x;
            let mut term = half;
            let mut j = term;
            let mut h_k = 0.0;
            let mut h_k1 = 1.0;
            let mut ysum = term * (h_k + h_k1);
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * (kf + 1.0));
                h_k += 1.0 / kf;
                h_k1 += 1.0 / (kf + 1.0);
                j += term;
                ysum += term * (h_k + h_k1);
                if term.abs() < 1e-18 * j.abs().max(1e-300) && k > 5 {
                    break;
                }
            }
            (j, 2.0 / PI * lg * j - 2.0 / (PI * x) - ysum / PI)
        }
    }
}

fn gl16() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Composite 16-point rule with `panels` equal panels on [a, b].
fn panels_rule(a: f64, b: f64, panels: usize) -> Rule {
    let base = gl16();
    let mut r = Rule { nodes: Vec::new(), weights: Vec::new() };
    for k in 0..panels {
        let lo = a + (b - a) * k as f64 / panels as f64;
        let hi = a + (b - a) * (k + 1) as f64 / panels as f64;
        r.append(base.mapped(lo, hi));
    }
    r
}

fn angle_rule(x: f64) -> Rule {
    panels_rule(0.0, PI, 8 + (x / 2.0).ceil() as usize)
}

/// Integral representations, returns (J_n, Y_n).
pub fn integral(order: Order, x: f64) -> (f64, f64) {
    let n = order.n() as f64;
    let r = angle_rule(x);
    let j = r.integrate(|t| (n * t - x * t.sin()).cos()) / PI;
    let y_osc = r.integrate(|t| (x * t.sin() - n * t).sin()) / PI;
    let sign = if order.n() % 2 == 0 { 1.0 } else { -1.0 };
    let tmax = (50.0 / x).asinh() + 1.0;
    let tail = panels_rule(0.0, tmax, 12)
        .integrate(|t| ((n * t).exp() + sign * (-n * t).exp()) * (-x * t.sinh()).exp());
    (j, y_osc - tail / PI)
}

/// Hankel asymptotic expansion for large x, returns (J_n, Y_n).
pub fn hankel(order: Order, x: f64) -> (f64, f64) {
    let n = order.n() as f64;
    let mu = 4.0 * n * n;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            a *= (mu - odd * odd) / (kf * 8.0 * x);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n + 0.25) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from standard tables.
    const J0_5: f64 = -0.177_596_771_314_338_3;
    const J1_5: f64 = -0.327_579_137_591_465_2;
    const Y0_5: f64 = -0.308_517_625_249_033_6;
    const Y1_5: f64 = 0.147_863_143_391_226_9;
    const J0_1: f64 = 0.765_197_686_557_966_6;
    const Y0_1: f64 = 0.088_256_964_215_676_96;
    const Y1_1: f64 = -0.781_212_821_300_288_7;

    #[test]
    fn table_values() {
        assert!((j0(5.0) - J0_5).abs() < 1e-14);
        assert!((j1(5.0) - J1_5).abs() < 1e-14);
        assert!((y0(5.0) - Y0_5).abs() < 1e-14);
        assert!((y1(5.0) - Y1_5).abs() < 1e-14);
        assert!((j0(1.0) - J0_1).abs() < 1e-15);
        assert!((y0(1.0) - Y0_1).abs() < 1e-15);
        assert!((y1(1.0) - Y1_1).abs() < 1e-15);
    }

    #[test]
    fn paths_agree() {
        for &x in &[3.0, 8.0, 10.0] {
            for o in [Order::Zero, Order::One] {
                let s = series(o, x);
                let i = integral(o, x);
                assert!((s.0 - i.0).abs() < 1e-11, "J x={x}");
                assert!((s.1 - i.1).abs() < 1e-11, "Y x={x}");
            }
        }
        for &x in &[25.0, 30.0, 40.0] {
            for o in [Order::Zero, Order::One] {
                let i = integral(o, x);
                let h = hankel(o, x);
                assert!((h.0 - i.0).abs() < 1e-12, "J x={x}");
                assert!((h.1 - i.1).abs() < 1e-12, "Y x={x}");
            }
        }
    }

    #[test]
    fn wronskian() {
        for &x in &[0.3, 2.0, 9.5, 17.0, 33.0, 120.0] {
            let w = j1(x) * y0(x) - j0(x) * y1(x);
            assert!((w - 2.0 / (PI * x)).abs() < 1e-12 * (1.0 + 1.0 / x), "x={x}");
        }
    }
}
