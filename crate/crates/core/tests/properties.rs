use conelab::asymptotics::{null_factor, BumpFunction};
use conelab::cone_geometry::{make_grid, Spectral};
use conelab::dirac_kernels::{projector, BispinorMatrix, OnShellMomentum};
use conelab::fock_sim::TruncatedFock;
use conelab::harness::{diff_reports, parse_ladder, CheckRecord, DiffTolerance, SuiteConfig, SuiteReport, SCHEMA_VERSION};
use conelab::numerics::minkowski::FourVector;
use conelab::numerics::sph::lm_from_index;
use conelab::profiles::{profile_from_current, symplectic_form, GaussianCurrent, SymplecticMethod, SymplecticSettings};
use conelab::C64;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::LazyLock;

static GRID6: LazyLock<conelab::cone_geometry::ConeGrid> = LazyLock::new(|| make_grid(6).unwrap());

fn current() -> impl Strategy<Value = GaussianCurrent> {
    (prop::array::uniform4(-0.5..0.5f64), 0.6..1.0f64, prop::array::uniform4(-1.0..1.0f64))
        .prop_map(|(c, s, d)| GaussianCurrent::new(FourVector(c), s, d))
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symplectic_form_is_antisymmetric(a in current(), b in current()) {
        let (v1, v2) = (profile_from_current(a, "a"), profile_from_current(b, "b"));
        let s = SymplecticSettings::default();
        let x = symplectic_form(&v1, &v2, SymplecticMethod::SpectralPv, &GRID6, &s).unwrap();
        let y = symplectic_form(&v2, &v1, SymplecticMethod::SpectralPv, &GRID6, &s).unwrap();
        let z = symplectic_form(&v1, &v1, SymplecticMethod::SpectralPv, &GRID6, &s).unwrap();
        prop_assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0));
        prop_assert!(z.abs() <= 1e-12);
    }

    #[test]
    fn field_operators_obey_ccr_below_cutoff(c1 in cvec(3), c2 in cvec(3)) {
        let fock = TruncatedFock::new(3, 4).unwrap();
        let (a, b) = (fock.field_operator(&c1), fock.field_operator(&c2));
        let inner: C64 = c1.iter().zip(&c2).map(|(x, y)| x.conj() * y).sum();
        let resid = fock.commutator_residual(&a, &b, C64::new(0.0, 2.0 * inner.im));
        prop_assert!(resid < 1e-12, "{resid}");
    }

    #[test]
    fn harmonic_roundtrip_on_band(coeffs in cvec(25)) {
        let spec = Spectral::new(&GRID6, 3);
        let c: Vec<C64> = (0..spec.n_coeffs()).map(|k| if lm_from_index(k).0 <= 3 { coeffs[k % 25] } else { C64::new(0.0, 0.0) }).collect();
        let back = spec.analyze(&spec.synthesize(&c));
        let err = c.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn minkowski_product_is_boost_invariant(
        v in prop::array::uniform3(-0.8..0.8f64),
        x in prop::array::uniform4(-3.0..3.0f64),
        y in prop::array::uniform4(-3.0..3.0f64),
    ) {
        let u = FourVector::new((1.0 + v.iter().map(|a| a * a).sum::<f64>()).sqrt(), v[0], v[1], v[2]);
        let m = FourVector::boost_matrix(&u);
        let (x, y) = (FourVector(x), FourVector(y));
        let d = FourVector::transform(&m, &x).dot(&FourVector::transform(&m, &y)) - x.dot(&y);
        prop_assert!(d.abs() < 1e-10 * (1.0 + x.dot(&y).abs()));
    }

    #[test]
    fn projectors_are_complementary_idempotents(q in prop::array::uniform3(-3.0..3.0f64), m in 0.3..3.0f64) {
        let p = OnShellMomentum::new(q, m, 1.0).unwrap();
        let pp = projector(1.0, &p.q, m).unwrap();
        let pm = projector(-1.0, &p.q, m).unwrap();
        let scale = 1.0 + p.q.0.iter().map(|c| c.abs()).fold(0.0, f64::max) / m;
        prop_assert!(((pp + pm) - BispinorMatrix::identity()).max_abs() < 1e-13 * scale);
        prop_assert!((pp * pp - pp).max_abs() < 1e-13 * scale * scale);
        prop_assert!((pp * pm).max_abs() < 1e-13 * scale * scale);
    }

    #[test]
    fn null_factor_vanishes_at_zero_frequency(a in 0.1..2.0f64, w in 0.2..3.0f64, r in 0.5..50.0f64) {
        let d = BumpFunction::new(a, a + w).unwrap();
        prop_assert!(null_factor(&d, r, 0.0).norm() < 1e-13);
    }

    #[test]
    fn comma_ladders_roundtrip(steps in prop::collection::vec(0.001..100.0f64, 1..20), start in 0.0..10.0f64) {
        let mut v = vec![start];
        for s in steps {
            v.push(v.last().unwrap() + s);
        }
        let text = v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_ladder(&text).unwrap(), v);
    }

    #[test]
    fn ladder_parser_never_panics(s in ".{0,40}") {
        let _ = parse_ladder(&s);
    }

    #[test]
    fn config_toml_roundtrip(seed in any::<u64>(), order in 8usize..32, samples in 100usize..1_000_000, bound in 0.0..1.0f64) {
        let mut c = SuiteConfig { seed, ..SuiteConfig::default() };
        c.grid.order = order;
        c.grid.lmax = order / 2;
        c.mc.samples = samples;
        c.tolerances.insert("c01_symplectic_cross_representation.tail_pairs_max_rel".into(), bound);
        prop_assert_eq!(SuiteConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn reports_roundtrip_and_self_diff_is_empty(vals in prop::collection::vec(-1e6..1e6f64, 1..8), flag in any::<bool>()) {
        let mut c = CheckRecord::new("demo", "plumbing");
        for (i, v) in vals.iter().enumerate() {
            c.value(&format!("v{i}"), *v);
        }
        c.at_most("err", vals[0].abs(), 1e3).flag("ok", flag);
        let c = c.finish(&BTreeMap::new());
        let r = SuiteReport { schema_version: SCHEMA_VERSION, seed: 1, suites: vec!["demo".into()], passed: c.passed, checks: vec![c] };
        let back = SuiteReport::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert!(diff_reports(&r, &back, &DiffTolerance::default()).is_empty());
    }
}
