use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SuiteConfig;
use super::report::CheckRecord;
use crate::asymptotics::{
    bilinear_ladder, kg_ladder, kg_packet, kg_peak, null_weight, scaled_limit_residuals, spacelike_phi, BilinearMode,
    coulomb_c, coulomb_c_gaussian_rest, BumpFunction, PacketFunction, PhiSettings, TruncatedCurrent, TwoPacket, Window,
};
use crate::cone_geometry::{make_grid, ConeGrid, Spectral, VectorField};
use crate::dirac_kernels::{ladder_tables, lambda_ladder_with, projector, BispinorMatrix, ChiFunction, DiracKernel, LadderSetup, OnShellMomentum};
use crate::fock_sim::{
    build_covariance, fit_slope, energy_moments, expectation, mc_energy_oracle, one_particle, represent, vacuum_norms, ModeBasis,
    TruncatedFock,
};
use crate::ir_projection::{
    curl_fraction, field_from_potentials, laplace_inversion_check, project_ir_kernel, project_ir_spectral, KernelForm,
    RotatedRule,
};
use crate::numerics::fourier::UniformGrid;
use crate::numerics::minkowski::{dot3, FourVector};
use crate::numerics::sph::lm_from_index;
use crate::profiles::{
    default_omega_rule, h_decompose, omega_rule, profile_from_current, symplectic_form, CurlCurrent, GaussianCurrent,
    HFunction, RadialProfile, SymplecticMethod, SymplecticSettings, TestCurrent,
};
use crate::radial_gauge::{gauge_commutator_check, gauge_profile, SmearingRho};
use crate::Result;

/// Suite names in report order, with the check each one produces.
pub const SUITES: [(&str, &str); 10] = [
    ("symplectic", "c01_symplectic_cross_representation"),
    ("ir_projection", "c02_ir_projection"),
    ("gauge", "c03_gauge_admissibility"),
    ("fock", "c04_fock_representation"),
    ("energy", "c05_energy_moments"),
    ("stationary_phase", "c06_stationary_phase"),
    ("spacelike", "c07_spacelike_limits"),
    ("null", "c08_null_limit"),
    ("dirac", "c09_dirac_kernels"),
    ("determinism", "c10_determinism"),
];

pub fn check_name(suite: &str) -> Option<&'static str> {
    SUITES.iter().find(|(s, _)| *s == suite).map(|(_, c)| *c)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn random_gaussian_current(rng: &mut ChaCha8Rng) -> GaussianCurrent {
    let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
    let d: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    GaussianCurrent::new(FourVector(c), rng.random_range(0.6..1.0), d)
}

pub fn reference_currents() -> [GaussianCurrent; 3] {
    [
        GaussianCurrent::new(FourVector::new(0.2, 0.3, -0.1, 0.4), 0.8, [1.0, 0.3, -0.2, 0.5]),
        GaussianCurrent::new(FourVector::new(-0.3, 0.1, 0.5, -0.2), 0.9, [0.4, -0.6, 0.1, 0.2]),
        GaussianCurrent::new(FourVector::new(0.0, -0.4, 0.2, 0.1), 0.7, [-0.3, 0.2, 0.9, -0.4]),
    ]
}

/// Wide conserved currents whose R_h stays band-limited at modest ℓ.
pub fn wide_curl_pair() -> (CurlCurrent, CurlCurrent) {
    (
        CurlCurrent::new(FourVector::new(0.1, 0.0, 0.2, 0.0), 2.5, [0.3, 1.0, -0.4, 0.2, 0.7, -1.1]),
        CurlCurrent::new(FourVector::new(-0.3, 0.5, 0.0, 0.4), 2.5, [-0.5, 0.2, 0.8, 0.6, -0.3, 0.4]),
    )
}

fn pairwise_spread(v1: &RadialProfile, v2: &RadialProfile, grid: &ConeGrid, s: &SymplecticSettings) -> Result<(f64, f64)> {
    let vals = SymplecticMethod::ALL.iter().map(|m| symplectic_form(v1, v2, *m, grid, s)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            worst = worst.max(rel_diff(vals[i], vals[j]));
        }
    }
    Ok((vals[2], worst))
}

/// Cone order for pairs with slow tails, whose profiles are costly to sample.
const TAIL_GRID: usize = 8;

pub fn symplectic(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let grid = make_grid(cfg.grid.order)?;
    let settings = SymplecticSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gauss = 0.0f64;
    for _ in 0..10 {
        let (a, b) = (random_gaussian_current(&mut rng), random_gaussian_current(&mut rng));
        let (_, d) = pairwise_spread(&profile_from_current(a, "a"), &profile_from_current(b, "b"), &grid, &settings)?;
        gauss = gauss.max(d);
    }
    let rho = SmearingRho::default();
    let tail_grid = make_grid(TAIL_GRID)?;
    let tail_settings = SymplecticSettings { fft: UniformGrid::new(512, 2.0 * PI / 64.0), ..Default::default() };
    let mut tail = 0.0f64;
    let [k1, k2, k3] = reference_currents();
    let k4 = random_gaussian_current(&mut rng);
    for (a, b) in [(k1, k2), (k2, k3), (k3, k1), (k4, k1)] {
        let (_, d) = pairwise_spread(&gauge_profile(a, rho, "a"), &gauge_profile(b, rho, "b"), &tail_grid, &tail_settings)?;
        tail = tail.max(d);
    }
    let mut r = CheckRecord::new("c01_symplectic_cross_representation", "oracle");
    r.at_most("gaussian_pairs_max_rel", gauss, 1e-8).at_most("tail_pairs_max_rel", tail, 1e-6);
    Ok(r)
}

pub fn ir_projection(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let grid = make_grid(cfg.grid.order)?;
    let spec = Spectral::new(&grid, cfg.grid.lmax);
    let band = cfg.grid.lmax.saturating_sub(3).max(1);
    let rule = RotatedRule::new(48, 48);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1f);
    let coeffs = |rng: &mut ChaCha8Rng| -> Vec<C64> {
        (0..spec.n_coeffs())
            .map(|k| {
                let l = lm_from_index(k).0;
                if l == 0 || l > band {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(rng.random_range(-1.0..1.0), 0.0)
                }
            })
            .collect()
    };
    let (mut route, mut laplace, mut annihilation) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let (phi, psi) = (coeffs(&mut rng), coeffs(&mut rng));
        let f = field_from_potentials(&phi, &psi, &spec);
        let a = project_ir_spectral(&f, &spec)?;
        let b = project_ir_kernel(&f, &spec, KernelForm::Log, &rule)?;
        route = route.max(a.sub(&b).norm() / a.norm());
        laplace = laplace.max(laplace_inversion_check(&f, &spec, &rule)? / a.norm());
        let zero = vec![C64::new(0.0, 0.0); spec.n_coeffs()];
        let pure = field_from_potentials(&zero, &psi, &spec);
        let scale = field_norm(&pure, &grid);
        annihilation = annihilation.max(project_ir_spectral(&pure, &spec)?.norm() / scale);
    }
    let mut r = CheckRecord::new("c02_ir_projection", "oracle");
    r.at_most("log_vs_spectral_rel", route, 1e-7)
        .at_most("laplace_residual", laplace, 1e-8)
        .at_most("pure_psi_annihilation", annihilation, 1e-8);
    Ok(r)
}

fn field_norm(f: &VectorField, grid: &ConeGrid) -> f64 {
    let parts = f.tangent_parts(grid);
    let v: Vec<f64> = parts.iter().map(|p| p.iter().map(|c| c.norm_sqr()).sum()).collect();
    grid.sum_real(&v).sqrt()
}

/// Resolution for the curl fraction of V_K(0, ·), which is not band-limited.
const CURL_GRID: usize = 24;
const CURL_LMAX: usize = 12;

pub fn gauge(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let grid = make_grid(cfg.grid.order)?;
    let curl_grid = make_grid(CURL_GRID)?;
    let spec = Spectral::new(&curl_grid, CURL_LMAX);
    let rho = SmearingRho::default();
    let currents = reference_currents();
    let (mut transverse, mut curl) = (0.0f64, 0.0f64);
    for k in currents {
        let v = gauge_profile(k, rho, "K");
        for node in grid.nodes() {
            let n = node.n_hat();
            let l = FourVector::null(n);
            for w in [-2.0, -0.4, 0.3, 1.1, 3.0] {
                let vd = v.vdot(w, n);
                transverse = transverse.max(vd.dot_real(&l).norm() / vd.norm().max(1e-3));
            }
        }
        let zero = VectorField { values: curl_grid.sample(|nd| v.zero_mode(nd.n_hat())), degree: -1, orthogonal_to_l: true };
        curl = curl.max(curl_fraction(&zero, &spec)?);
    }
    let mut r = CheckRecord::new("c03_gauge_admissibility", "result");
    r.at_most("transversality", transverse, 1e-8).at_most("zero_mode_curl_fraction", curl, 1e-7);
    let levels: Vec<u32> = cfg.ladder(&cfg.ladders.refine).iter().map(|x| *x as u32).collect();
    commutator_values(&currents[0], &currents[1], cfg.grid.order, &levels, &mut r)?;
    Ok(r)
}

/// {V_K₁, V_K₂} against its double-integral form over refinement levels.
pub fn commutator_values(
    k1: &GaussianCurrent,
    k2: &GaussianCurrent,
    order: usize,
    levels: &[u32],
    r: &mut CheckRecord,
) -> Result<()> {
    let grid = make_grid(order)?;
    let check = gauge_commutator_check(k1, k2, &SmearingRho::default(), &grid, &SymplecticSettings::default(), levels)?;
    let default_level = check.levels.iter().find(|l| l.level == 1).unwrap_or(&check.levels[0]).residual;
    r.at_most("commutator_residual_default", default_level, 1e-3)
        .value("commutator_lhs", check.lhs)
        .value("commutator_residual_final", check.final_residual())
        .flag("commutator_monotone", check.monotone);
    for l in &check.levels {
        r.value(&format!("commutator_residual_level{}", l.level), l.residual)
            .value(&format!("commutator_rhs_level{}", l.level), l.rhs);
    }
    Ok(())
}

/// Resolution of the Fock suite: R_h of the wide currents needs ℓ ≤ 12.
const FOCK_GRID: usize = 24;
const FOCK_LMAX: usize = 12;

pub fn fock(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let grid = make_grid(FOCK_GRID)?;
    let spec = Spectral::new(&grid, FOCK_LMAX);
    let rule = omega_rule(cfg.omega.min, cfg.omega.max, cfg.omega.panels_per_decade, cfg.omega.per_panel);
    let settings = SymplecticSettings { omega: rule.clone(), ..Default::default() };
    let h = HFunction::gaussian(1.0);
    let cov = build_covariance(1.0, 1, FOCK_LMAX)?;
    let (j1, j2) = wide_curl_pair();
    let j3 = CurlCurrent::new(FourVector::new(0.4, -0.2, 0.1, 0.3), 2.5, [0.9, -0.4, 0.1, -0.6, 0.2, 0.5]);
    let [k1, k2, _] = reference_currents();
    let rho = SmearingRho::default();
    let gaussian = [profile_from_current(j1, "J1"), profile_from_current(j2, "J2"), profile_from_current(j3, "J3")];
    let tails = [gauge_profile(k1, rho, "K1"), gauge_profile(k2, rho, "K2")];
    let fock = TruncatedFock::new(cfg.fock.modes, cfg.fock.n_max)?;
    let vac = fock.vacuum();

    let mut vectors = Vec::new();
    let mut decomps = Vec::new();
    for v in gaussian.iter().chain(&tails) {
        let d = h_decompose(v, &h, &spec, &rule, &cov)?;
        vectors.push(one_particle(v, &h, &d, &grid, &rule));
        decomps.push(d);
    }
    let basis = ModeBasis::span(&vectors, cfg.fock.modes)?;
    let mut ops = Vec::new();
    let mut truncation = 0.0f64;
    for x in &vectors {
        let (op, resid) = represent(x, &basis, &fock, 1e-10)?;
        truncation = truncation.max(resid);
        ops.push(op);
    }
    let profiles: Vec<&RadialProfile> = gaussian.iter().chain(&tails).collect();
    let comm = |i: usize, j: usize| -> Result<f64> {
        let s = symplectic_form(profiles[i], profiles[j], SymplecticMethod::SpectralPv, &grid, &settings)?;
        Ok(fock.commutator_residual(&ops[i], &ops[j], C64::new(0.0, s)) / s.abs().max(1e-300))
    };
    let gauss_comm = comm(0, 1)?.max(comm(1, 2)?).max(comm(0, 2)?);
    let tail_comm = comm(3, 4)?.max(comm(0, 3)?);
    let self_comm = fock.commutator_residual(&ops[0], &ops[0], C64::new(0.0, 0.0));
    let mut vacuum = 0.0f64;
    let mut first = 0.0f64;
    for ((x, d), op) in vectors.iter().zip(&decomps).zip(&ops) {
        let second: f64 = op.matvec(&vac).iter().map(|c| c.norm_sqr()).sum();
        let three = vacuum_norms(x, d, &cov).total();
        vacuum = vacuum.max(rel_diff(second, three));
        first = first.max(expectation(op, &vac).norm());
    }
    let mut r = CheckRecord::new("c04_fock_representation", "result");
    r.at_most("commutator_gaussian_rel", gauss_comm, 1e-8)
        .at_most("commutator_tail_rel", tail_comm, 1e-6)
        .at_most("commutator_self", self_comm, 0.0)
        .at_most("vacuum_second_moment_rel", vacuum, 1e-9)
        .at_most("vacuum_first_moment", first, 1e-14)
        .value("basis_truncation", truncation)
        .value("modes", basis.len() as f64);
    Ok(r)
}

pub fn energy(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let cov = build_covariance(1.0, 1, cfg.grid.lmax)?;
    let h = HFunction::gaussian(1.0);
    let e = energy_moments(&h, &cov)?;
    let mc = mc_energy_oracle(&h, &cov, cfg.mc.samples, cfg.seed, 200)?;
    let mut r = CheckRecord::new("c05_energy_moments", "oracle");
    r.at_most("trace_residual", (e.trace - 1.0).abs(), 1e-10)
        .at_most("energy_closed_form", (e.energy - (PI / 8.0).sqrt()).abs(), 1e-10)
        .at_most("mc_energy_z", (mc.energy - e.energy).abs() / mc.energy_stderr, 3.0)
        .at_most("mc_variance_z", (mc.variance - e.variance).abs() / mc.variance_stderr, 3.0)
        .value("energy", e.energy)
        .value("variance", e.variance)
        .value("mc_energy", mc.energy)
        .value("mc_variance", mc.variance);
    Ok(r)
}

pub fn reference_packets() -> Result<[PacketFunction; 3]> {
    Ok([
        PacketFunction::new(1.0, [0.3, -0.1, 0.2], 0.5, [0.2, 0.1, -0.3])?,
        PacketFunction::new(1.0, [-0.2, 0.4, 0.1], 0.4, [0.0, -0.2, 0.1])?,
        PacketFunction::new(1.5, [0.1, 0.1, -0.3], 0.6, [0.3, 0.0, 0.0])?,
    ])
}

fn velocity(v: [f64; 3]) -> FourVector {
    FourVector::new((1.0 + dot3(v, v)).sqrt(), v[0], v[1], v[2])
}

pub fn stationary_phase(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let packets = reference_packets()?;
    let u = velocity([0.25, -0.1, 0.15]);
    let ladder: Vec<f64> = cfg.ladder(&cfg.ladders.kg);
    let mut worst_slope = f64::NEG_INFINITY;
    let mut suppression = 0.0f64;
    let mut r = CheckRecord::new("c06_stationary_phase", "result");
    for (i, f) in packets.iter().enumerate() {
        let m = f.mass;
        let lambdas: Vec<f64> = ladder.iter().map(|ml| ml / m).collect();
        let rep = kg_ladder(f, &u, &lambdas)?;
        for (g, ml) in rep.samples.iter().zip(&ladder) {
            r.value(&format!("packet{i}_error_mlambda{ml}"), g.error);
        }
        r.value(&format!("packet{i}_error_slope"), rep.error_slope);
        worst_slope = worst_slope.max(rep.error_slope);
        let peak = kg_peak(f)?;
        let x = FourVector::new(10.0, 30.0, 35.0, -15.0);
        let s = kg_packet(f, &x.scale(50.0 / (-x.square()).sqrt()))?;
        suppression = suppression.max(s.direct.norm() / peak);
    }
    let minus_rep = bilinear_ladder(&TwoPacket::factorized(packets[0]), &u, &ladder, BilinearMode::Minus)?;
    for (g, ml) in minus_rep.samples.iter().zip(&ladder) {
        r.value(&format!("minus_error_lambda{ml}"), g.error);
    }
    let minus = minus_rep.error_slope;
    r.at_most("kg_error_slope_worst", worst_slope, -2.3)
        .at_most("spacelike_suppression", suppression, 1e-6)
        .at_most("minus_mode_slope", minus, -3.7);
    Ok(r)
}

/// Resolution of the scaled-limit residuals (the z-shifted residual needs ℓ ≤ 14).
const SCALED_GRID: usize = 28;
const SCALED_LMAX: usize = 14;

/// Two-route Φ agreement for the spacelike-supported current.
pub fn phi_values(r: &mut CheckRecord) -> Result<()> {
    let phi = spacelike_phi(&TruncatedCurrent::spacelike_default(), &PhiSettings::default())?;
    r.at_most("phi_route_difference", phi.difference, 1e-4)
        .value("phi_norm", phi.direct_norm)
        .value("phi_truncation_residual", phi.truncation_residual)
        .value("phi_tail_fraction", phi.tail_fraction);
    Ok(())
}

/// Residuals of R_h(V̇_{zR}) + V(0, ·) over the scaled ladder for z = 0 and z = (3,1,0,0).
pub fn scaled_values(ladder: &[f64], r: &mut CheckRecord) -> Result<()> {
    let grid = make_grid(SCALED_GRID)?;
    let spec = Spectral::new(&grid, SCALED_LMAX);
    let (j, k) = wide_curl_pair();
    let zs = [FourVector::new(0.0, 0.0, 0.0, 0.0), FourVector::new(3.0, 1.0, 0.0, 0.0)];
    let rep = scaled_limit_residuals(&j, &k, &zs, ladder, &HFunction::gaussian(0.7), &spec, &default_omega_rule())?;
    r.at_most("reg_norm_spread", rep.reg_norm_spread, 1e-10)
        .at_most("residual_imag_fraction", rep.rungs.iter().map(|g| g.imag_fraction).fold(0.0, f64::max), 1e-12)
        .flag("residuals_decreasing", rep.residuals_decreasing)
        .flag("z_curves_converging", rep.z_converging)
        .flag("overlap_decreasing", rep.overlap_decreasing);
    for g in &rep.rungs {
        for (zi, v) in g.residuals.iter().enumerate() {
            r.value(&format!("residual_z{zi}_r{}", g.r), *v);
        }
        r.value(&format!("overlap_r{}", g.r), g.overlap).value(&format!("z_spread_r{}", g.r), g.z_spread);
    }
    let xs: Vec<f64> = rep.rungs.iter().map(|g| g.r.ln()).collect();
    for zi in 0..zs.len() {
        let ys: Vec<f64> = rep.rungs.iter().map(|g| g.residuals[zi].max(f64::MIN_POSITIVE).ln()).collect();
        r.value(&format!("residual_z{zi}_slope"), fit_slope(&xs, &ys));
    }
    Ok(())
}

pub fn spacelike(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let mut r = CheckRecord::new("c07_spacelike_limits", "result");
    phi_values(&mut r)?;
    scaled_values(&cfg.ladder(&cfg.ladders.scaled), &mut r)?;
    Ok(r)
}

/// C(p) for a Gaussian current: 4D quadrature against the radial reduction at rest,
/// and boost covariance C(Λp)[J∘Λ⁻¹] = ΛC(p)[J].
pub fn coulomb(_cfg: &SuiteConfig) -> Result<CheckRecord> {
    let current = GaussianCurrent::new(FourVector::new(0.4, 1.5, -0.8, 0.6), 0.5, [1.0, 0.3, -0.2, 0.5]);
    let m = 1.3;
    let window = Window { center: current.profile.center, radius: 5.0 };
    let rest = FourVector::new(m, 0.0, 0.0, 0.0);
    let quad = coulomb_c(&rest, |x| current.value(x), &window)?;
    let reduced = coulomb_c_gaussian_rest(&current, m);
    let scale = reduced.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let reduction = (0..4).map(|a| (quad[a] - reduced[a]).abs()).fold(0.0, f64::max) / scale;
    let u = velocity([0.3, -0.2, 0.4]);
    let lam = FourVector::boost_matrix(&u);
    let inv = FourVector::boost_matrix(&FourVector::new(u[0], -u[1], -u[2], -u[3]));
    let boosted = |x: &FourVector| {
        let j = current.value(&FourVector::transform(&inv, x));
        FourVector::transform(&lam, &FourVector(j)).0
    };
    let bwindow = Window { center: FourVector::transform(&lam, &window.center), radius: window.radius };
    let c_boost = coulomb_c(&FourVector::transform(&lam, &rest), boosted, &bwindow)?;
    let expected = FourVector::transform(&lam, &FourVector(quad));
    let covariance = (0..4).map(|a| (c_boost[a] - expected[a]).abs()).fold(0.0, f64::max) / scale;
    let mut r = CheckRecord::new("asym_coulomb", "oracle");
    r.at_most("rest_reduction_rel", reduction, 1e-6).at_most("boost_covariance_rel", covariance, 1e-6);
    for a in 0..4 {
        r.value(&format!("c{a}"), quad[a]);
    }
    Ok(r)
}

pub fn null(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let grid = make_grid(10)?;
    let (j, _) = wide_curl_pair();
    let ladder = cfg.ladder(&cfg.ladders.null);
    let rep = null_weight(&j, &BumpFunction::default(), &ladder, &grid, &default_omega_rule(), 40.0);
    let far = rep.rungs.iter().find(|g| g.r >= 4.0).map_or(f64::NAN, |g| g.far_factor_defect);
    let mut r = CheckRecord::new("c08_null_limit", "result");
    r.at_most("zero_frequency_factor", rep.factor_at_zero, 4.0 * f64::EPSILON)
        .at_most("far_factor_defect", far, 1e-10)
        .flag("deviation_decreasing", rep.decreasing);
    for g in &rep.rungs {
        r.value(&format!("deviation_r{}", g.r), g.deviation);
    }
    Ok(r)
}

fn dirac_configs() -> Result<Vec<(ChiFunction, Vec<OnShellMomentum>)>> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let r1 = OnShellMomentum::new([0.2, -0.3, 0.4], 1.0, 1.0)?;
    let r2 = OnShellMomentum::new([-0.5, 0.1, 0.2], 1.0, 1.0)?;
    let r3 = OnShellMomentum::new([0.1, 0.4, -0.2], 1.0, -1.0)?;
    Ok(vec![
        (ChiFunction::new([one, zero, C64::new(0.3, 0.1), zero], r1.q, 0.12, [0.0; 4]), vec![r1]),
        (ChiFunction::new([zero, one, zero, C64::new(-0.2, 0.4)], r2.q, 0.12, [0.1, 0.0, 0.0, 0.0]), vec![r2]),
        (ChiFunction::new([C64::new(0.5, -0.5), zero, one, zero], r3.q.scale(-1.0), 0.12, [0.0; 4]), vec![r3]),
    ])
}

/// Cone resolution of the Λ ladder; only the low-ℓ part enters the B^½ P_ir piece.
const DIRAC_GRID: usize = 16;
const DIRAC_LMAX: usize = 8;
/// m̄ of the ladder, away from the mass of the χ̂ supports.
const LADDER_MBAR: f64 = 2.0;

pub fn dirac(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let mut algebra = 0.0f64;
    for q in [[0.3, -1.2, 0.7], [0.0, 0.0, 0.0], [2.0, 1.0, -3.0]] {
        let p = OnShellMomentum::new(q, 1.3, 1.0)?;
        let pp = projector(1.0, &p.q, 1.3)?;
        let pm = projector(-1.0, &p.q, 1.3)?;
        algebra = algebra
            .max(((pp + pm) - BispinorMatrix::identity()).max_abs())
            .max((pp * pp - pp).max_abs())
            .max((pm * pm - pm).max_abs())
            .max((pp * pm).max_abs())
            .max((pp.trace() - 2.0).norm());
    }
    let kernel = DiracKernel::new(SmearingRho::default(), 1.0, 1.0);
    let phase_grid = make_grid(8)?;
    let generic = ChiFunction::new(
        [C64::new(1.0, 0.2), C64::new(-0.3, 0.5), C64::new(0.4, 0.0), C64::new(0.1, -0.7)],
        FourVector::new(1.2, 0.3, -0.4, 0.5),
        0.3,
        [0.2, -0.1, 0.3, 0.05],
    );
    let r0 = OnShellMomentum::new([0.2, -0.3, 0.4], 1.0, 1.0)?;
    let mut phase = 0.0f64;
    for node in phase_grid.nodes() {
        let n = node.n_hat();
        let g = kernel.phase_gradient(&generic, n, &r0);
        let v = kernel.vdot(&generic, 0.0, n, &r0);
        let scale = v.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        let d = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| (g[a][b] - v[a][b]).norm()).fold(0.0, f64::max);
        phase = phase.max(d / scale);
    }
    let mut r = CheckRecord::new("c09_dirac_kernels", "result");
    r.at_most("projector_algebra", algebra, 1e-13).at_most("phase_gradient_rel", phase, 1e-6);
    dirac_ladder_values(&cfg.ladder(&cfg.ladders.dirac), &[0, 1, 2], &mut r)?;
    Ok(r)
}

/// Number of built-in (χ, r) configurations for the Λ ladder.
pub const DIRAC_CONFIGS: usize = 3;

/// Λ-ladder norms for the selected (χ, r) configurations.
pub fn dirac_ladder_values(lambdas: &[f64], configs: &[usize], r: &mut CheckRecord) -> Result<()> {
    let kernel = DiracKernel::new(SmearingRho::default(), 1.0, 1.0);
    let grid = make_grid(DIRAC_GRID)?;
    let spec = Spectral::new(&grid, DIRAC_LMAX);
    let cov = build_covariance(1.0, 1, DIRAC_LMAX)?;
    let omega = omega_rule(1e-4, 8.0, 2, 8);
    let h = HFunction::gaussian(1.0);
    let bump = BumpFunction::default();
    let tables = ladder_tables(LADDER_MBAR, &bump, lambdas, (0.25, 4.0));
    let all = dirac_configs()?;
    for &i in configs {
        let (chi, rs) = all.get(i).ok_or_else(|| crate::Error::Usage(format!("no χ configuration {i}")))?;
        let setup = LadderSetup {
            kernel: &kernel,
            chi,
            r: rs,
            mbar: LADDER_MBAR,
            bump: &bump,
            h: &h,
            grid: &grid,
            omega: &omega,
            ir: Some((&spec, &cov)),
        };
        let rep = lambda_ladder_with(&setup, &tables)?;
        let tail = rep.rungs.iter().filter_map(|g| g.ir_tail).fold(0.0, f64::max);
        for g in &rep.rungs {
            r.value(&format!("config{i}_ir_norm_lambda{}", g.lambda), g.ir_norm.unwrap_or(f64::NAN))
                .value(&format!("config{i}_v1_norm_lambda{}", g.lambda), g.r_h_v1_norm)
                .value(&format!("config{i}_v2_norm_lambda{}", g.lambda), g.v2_h_norm);
        }
        r.flag(&format!("config{i}_v2_decreasing"), rep.v2_decreasing)
            .flag(&format!("config{i}_v1_decreasing"), rep.v1_decreasing)
            .flag(&format!("config{i}_ir_decreasing"), rep.ir_decreasing.unwrap_or(false))
            .value(&format!("config{i}_v2_slope"), rep.v2_slope)
            .value(&format!("config{i}_v1_slope"), rep.v1_slope)
            .value(&format!("config{i}_ir_spectral_tail"), tail);
    }
    Ok(())
}

/// Re-runs the seeded suites and compares serialized records byte for byte.
pub fn determinism(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let mut small = cfg.clone();
    small.mc.samples = cfg.mc.samples.min(20_000);
    let runs: Vec<String> = (0..2)
        .map(|_| -> Result<String> {
            let a = energy(&small)?;
            let b = ir_projection(&small)?;
            let c = null(&small)?;
            Ok(serde_json::to_string(&(a, b, c)).expect("records serialize"))
        })
        .collect::<Result<_>>()?;
    let mut r = CheckRecord::new("c10_determinism", "contract");
    r.flag("byte_identical", runs[0] == runs[1]);
    Ok(r)
}

pub fn run_one(suite: &str, cfg: &SuiteConfig) -> Result<CheckRecord> {
    match suite {
        "symplectic" => symplectic(cfg),
        "ir_projection" => ir_projection(cfg),
        "gauge" => gauge(cfg),
        "fock" => fock(cfg),
        "energy" => energy(cfg),
        "stationary_phase" => stationary_phase(cfg),
        "spacelike" => spacelike(cfg),
        "null" => null(cfg),
        "dirac" => dirac(cfg),
        "determinism" => determinism(cfg),
        other => Err(crate::Error::Usage(format!("unknown suite '{other}'"))),
    }
}
