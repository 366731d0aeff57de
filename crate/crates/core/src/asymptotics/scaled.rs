//! R-scaled currents: the spacelike scaling Ṽ_{zR}(ω, l) = e^{iωz·l} R Ṽ(Rω, l)
//! and the null weight 1 − 2πd̃(−2Rω l⁰).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::BumpFunction;
use crate::cone_geometry::{Spectral, VectorField};
use crate::ir_projection::project_ir_spectral;
use crate::numerics::minkowski::{CVec4, FourVector};
use crate::numerics::quadrature::Rule;
use crate::profiles::{reg_product, HFunction, TestCurrent};
use crate::Result;

fn v_tilde<J: TestCurrent + ?Sized>(j: &J, omega: f64, n: [f64; 3]) -> CVec4 {
    j.fourier(&FourVector::null(n).scale(omega))
}

fn scaled_rule(rule: &Rule, r: f64) -> Rule {
    Rule { nodes: rule.nodes.iter().map(|s| s / r).collect(), weights: rule.weights.iter().map(|w| w / r).collect() }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// One rung of the spacelike scaling ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ScaledRung {
    pub r: f64,
    pub reg_norm: f64,
    /// ‖P_ir[R_h(V̇_{zR}) + V(0, ·)]‖ for each z
    pub residuals: Vec<f64>,
    /// |(Ṽ₁, Ṽ_{zR})_reg| at the first z
    pub overlap: f64,
    /// largest ‖P_ir[R_h(V̇_{zR}) − R_h(V̇_{z₀R})]‖ over z
    pub z_spread: f64,
    /// largest |Im| of the residual relative to max |V(0)|
    pub imag_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledReport {
    pub zs: Vec<FourVector>,
    pub h: String,
    pub rungs: Vec<ScaledRung>,
    /// max |‖Ṽ_{zR}‖_reg / ‖Ṽ‖_reg − 1| over the ladder
    pub reg_norm_spread: f64,
    pub residuals_decreasing: bool,
    pub overlap_decreasing: bool,
    pub z_converging: bool,
}

/// Residuals of the spacelike limit R_h(V̇_{zR}) → −V(0, ·) over a ladder of R.
///
/// The ω integrals are carried out in s = Rω so the same nodes serve every rung.
pub fn scaled_limit_residuals<J, K>(
    current: &J,
    other: &K,
    zs: &[FourVector],
    ladder: &[f64],
    h: &HFunction,
    spec: &Spectral<'_>,
    rule: &Rule,
) -> Result<ScaledReport>
where
    J: TestCurrent + Sync,
    K: TestCurrent + Sync,
{
    let grid = spec.grid();
    h.validate(grid)?;
    let zs = if zs.is_empty() { vec![FourVector::new(0.0, 0.0, 0.0, 0.0)] } else { zs.to_vec() };
    // Ṽ(±s, l) on every node
    let table: Vec<Vec<(f64, f64, CVec4)>> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let n = node.n_hat();
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .flat_map(|(&s, &w)| [(s, w, v_tilde(current, s, n)), (-s, w, v_tilde(current, -s, n))])
                .collect()
        })
        .collect();
    let v0: Vec<CVec4> = table
        .iter()
        .map(|row| row.iter().fold(CVec4::zero(), |acc, (_, w, v)| acc + v.scale_re(*w)))
        .collect();
    let v0_scale = v0.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let base_norm = reg_product(|w, n| v_tilde(current, w, n), |w, n| v_tilde(current, w, n), grid, rule).re.max(0.0).sqrt();

    let mut rungs = Vec::with_capacity(ladder.len());
    for &r in ladder {
        let z0 = zs[0];
        let scaled = |w: f64, n: [f64; 3]| {
            let phase = C64::from_polar(r, w * z0.dot(&FourVector::null(n)));
            v_tilde(current, r * w, n).scale(phase)
        };
        let srule = scaled_rule(rule, r);
        let reg_norm = reg_product(scaled, scaled, grid, &srule).re.max(0.0).sqrt();
        let overlap = reg_product(|w, n| v_tilde(other, w, n), scaled, grid, &srule).norm();

        let mut fields = Vec::with_capacity(zs.len());
        let mut imag = 0.0f64;
        for z in &zs {
            let res: Vec<CVec4> = grid
                .nodes()
                .iter()
                .zip(&table)
                .zip(&v0)
                .map(|((node, row), v0)| {
                    let n = node.n_hat();
                    let zl = z.dot(&FourVector::null(n));
                    let rh = row.iter().fold(CVec4::zero(), |acc, (s, w, v)| {
                        let f = h.eval(s / r, n).conj() * C64::from_polar(*w, s * zl / r);
                        acc - v.scale(f)
                    });
                    rh + *v0
                })
                .collect();
            for v in &res {
                for c in v.0 {
                    imag = imag.max(c.im.abs() / v0_scale);
                }
            }
            fields.push(res);
        }
        let project = |vals: Vec<CVec4>| {
            let values = vals.iter().map(|v| CVec4(v.0.map(|c| C64::new(c.re, 0.0)))).collect();
            project_ir_spectral(&VectorField { values, degree: -1, orthogonal_to_l: true }, spec)
        };
        let classes = fields.iter().map(|f| project(f.clone())).collect::<Result<Vec<_>>>()?;
        let residuals = classes.iter().map(|c| c.norm()).collect();
        let z_spread = classes.iter().map(|c| c.sub(&classes[0]).norm()).fold(0.0, f64::max);
        rungs.push(ScaledRung { r, reg_norm, residuals, overlap, z_spread, imag_fraction: imag });
    }
    let reg_norm_spread = rungs.iter().map(|g| (g.reg_norm / base_norm - 1.0).abs()).fold(0.0, f64::max);
    let residuals_decreasing =
        (0..zs.len()).all(|k| strictly_decreasing(&rungs.iter().map(|g| g.residuals[k]).collect::<Vec<_>>()));
    let overlap_decreasing = strictly_decreasing(&rungs.iter().map(|g| g.overlap).collect::<Vec<_>>());
    let z_converging = zs.len() < 2 || strictly_decreasing(&rungs.iter().map(|g| g.z_spread).collect::<Vec<_>>());
    Ok(ScaledReport {
        zs,
        h: h.label().to_string(),
        rungs,
        reg_norm_spread,
        residuals_decreasing,
        overlap_decreasing,
        z_converging,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NullRung {
    pub r: f64,
    /// ‖Ṽ^d_R − Ṽ‖_reg = ‖2πd̃(−2Rω) Ṽ‖_reg
    pub deviation: f64,
    /// |1 − 2πd̃(−2Rω_far)| deviation from 1 at the far frequency
    pub far_factor_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullReport {
    pub reg_norm: f64,
    /// |1 − 2πd̃(0)|
    pub factor_at_zero: f64,
    pub omega_far: f64,
    pub rungs: Vec<NullRung>,
    pub decreasing: bool,
}

/// 1 − 2πd̃(−2Rω) at l⁰ = 1.
pub fn null_factor(d: &BumpFunction, r: f64, omega: f64) -> C64 {
    1.0 - 2.0 * PI * d.fourier(-2.0 * r * omega)
}

/// Deviation of the null-weighted profile Ṽ^d_R from Ṽ over a ladder of R.
pub fn null_weight<J: TestCurrent + Sync>(
    current: &J,
    d: &BumpFunction,
    ladder: &[f64],
    grid: &crate::cone_geometry::ConeGrid,
    rule: &Rule,
    omega_far: f64,
) -> NullReport {
    let reg_norm = reg_product(|w, n| v_tilde(current, w, n), |w, n| v_tilde(current, w, n), grid, rule).re.max(0.0).sqrt();
    let rungs: Vec<NullRung> = ladder
        .iter()
        .map(|&r| {
            let factor: Vec<f64> = rule.nodes.iter().map(|&w| (2.0 * PI * d.fourier(-2.0 * r * w)).norm_sqr()).collect();
            let per_node: Vec<C64> = grid
                .nodes()
                .par_iter()
                .map(|node| {
                    let n = node.n_hat();
                    let mut acc = C64::new(0.0, 0.0);
                    for ((&w, &wt), f) in rule.nodes.iter().zip(&rule.weights).zip(&factor) {
                        let v = v_tilde(current, w, n);
                        acc -= v.cdot(&v) * (f * w * wt);
                    }
                    acc
                })
                .collect();
            let deviation = grid.sum(&per_node).re.max(0.0).sqrt();
            NullRung { r, deviation, far_factor_defect: (null_factor(d, r, omega_far) - 1.0).norm() }
        })
        .collect();
    NullReport {
        reg_norm,
        factor_at_zero: null_factor(d, 1.0, 0.0).norm(),
        omega_far,
        decreasing: strictly_decreasing(&rungs.iter().map(|g| g.deviation).collect::<Vec<_>>()),
        rungs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_geometry::make_grid;
    use crate::profiles::{default_omega_rule, CurlCurrent};

    fn currents() -> (CurlCurrent, CurlCurrent) {
        (
            CurlCurrent::new(FourVector::new(0.1, 0.0, 0.2, 0.0), 2.5, [0.3, 1.0, -0.4, 0.2, 0.7, -1.1]),
            CurlCurrent::new(FourVector::new(-0.3, 0.5, 0.0, 0.4), 2.0, [-0.5, 0.2, 0.8, 0.6, -0.3, 0.4]),
        )
    }

    #[test]
    fn scaled_ladder_converges() {
        let (j, k) = currents();
        let grid = make_grid(28).unwrap();
        let spec = Spectral::new(&grid, 14);
        let zs = [FourVector::new(0.0, 0.0, 0.0, 0.0), FourVector::new(3.0, 1.0, 0.0, 0.0)];
        let rep = scaled_limit_residuals(&j, &k, &zs, &[1.0, 4.0, 16.0, 64.0], &HFunction::gaussian(0.7), &spec, &default_omega_rule())
            .unwrap();
        assert!(rep.reg_norm_spread < 1e-10, "{}", rep.reg_norm_spread);
        assert!(rep.residuals_decreasing, "{:?}", rep.rungs);
        assert!(rep.overlap_decreasing, "{:?}", rep.rungs);
        assert!(rep.z_converging, "{:?}", rep.rungs);
        assert!(rep.rungs.iter().all(|g| g.imag_fraction < 1e-12));
    }

    #[test]
    fn null_factor_limits() {
        let d = BumpFunction::default();
        assert!(null_factor(&d, 1.0, 0.0).norm() < 1e-12);
        assert!((null_factor(&d, 4.0, 40.0) - 1.0).norm() < 1e-10);
        assert!((null_factor(&d, 4.0, -40.0) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn null_deviation_decreases() {
        let (j, _) = currents();
        let grid = make_grid(10).unwrap();
        let rep = null_weight(&j, &BumpFunction::default(), &[1.0, 4.0, 16.0, 64.0], &grid, &default_omega_rule(), 40.0);
        assert!(rep.decreasing, "{:?}", rep.rungs);
        assert!(rep.rungs[0].deviation < rep.reg_norm);
        assert!(rep.rungs[1].far_factor_defect < 1e-10);
    }
}
