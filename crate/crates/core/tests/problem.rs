use std::f64::consts::PI;

use ngb::forms::{CoefficientForm, Parametric};
use ngb::pde_oracle::{self, FdConfig};
use ngb::problem::{self, ProblemSpec};
use ngb::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{build, draw, term};

fn param(f: &CoefficientForm) -> &Parametric {
    f.parametric("form").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn envelopes_dominate_samples(d in draw(), seed in any::<u64>()) {
        let spec = build(&d);
        let t = 1.0;
        let hc = problem::extract_constants(&spec, t).unwrap();
        let (b, a, h, g) = (param(&spec.b), param(&spec.a), param(&spec.h), param(&spec.g));
        let (bx, a1, a2) = (b.dx(), a.dx(), a.dx().dx());
        let s = spec.sigma;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let r = rng.random_range(0.0..=t);
            let x = rng.random_range(0.0..=spec.zeta);
            let av = a.eval(0.0, x);
            let bv = b.eval(r, x);
            prop_assert!(hc.c_a_d <= av && av <= hc.c_a_u);
            prop_assert!(bx.eval(r, x).abs() <= hc.c_lip);
            let ratio = bv / (av * av);
            prop_assert!(hc.mu_l <= ratio && ratio <= hc.mu_u, "ratio {} not in [{}, {}]", ratio, hc.mu_l, hc.mu_u);
            let dx = bx.eval(r, x) / (s * av) - bv * a1.eval(0.0, x) / (s * av * av) - 0.5 * s * a2.eval(0.0, x);
            prop_assert!(dx.abs() <= hc.c_d, "D_x {} above {}", dx, hc.c_d);
            prop_assert!(h.dx().eval(r, x).abs() <= hc.c_h);
            prop_assert!(g.dx().eval(0.0, x).abs() <= hc.c_g);
        }
    }

    #[test]
    fn envelopes_grow_with_horizon(d in draw(), t1 in 0.01f64..3.0, f in 1.0f64..4.0) {
        let spec = build(&d);
        let a = problem::extract_constants(&spec, t1).unwrap();
        let b = problem::extract_constants(&spec, t1 * f).unwrap();
        prop_assert!(b.c_lip >= a.c_lip && b.c_d >= a.c_d && b.c_h >= a.c_h);
        prop_assert!(b.mu_u >= a.mu_u && b.mu_l <= a.mu_l);
        prop_assert_eq!((a.c_a_d, a.c_a_u, a.c_g), (b.c_a_d, b.c_a_u, b.c_g));
    }

    #[test]
    fn homogenisation_round_trip(n0 in -1.0f64..1.0, n1 in -1.0f64..1.0, m0 in -1.0f64..1.0, f in -1.0f64..1.0) {
        let zeta = 1.0;
        let n = CoefficientForm::terms(vec![term(n0, 0, 0.0, 0.0, 0.0), term(n1, 0, 0.0, 0.0, 2.0)]);
        let m = CoefficientForm::constant(m0);
        let slope0 = n0 + n1;
        let g = CoefficientForm::terms(vec![
            term(slope0, 1, 0.0, 0.0, 0.0),
            term((m0 - slope0) / (2.0 * zeta), 2, 0.0, 0.0, 0.0),
            term(f, 0, PI, 0.0, 0.0),
        ]);
        let spec = ProblemSpec::new(
            zeta,
            0.8,
            1.0,
            [
                CoefficientForm::terms(vec![term(0.4, 0, 0.0, 0.0, 1.0)]),
                CoefficientForm::terms(vec![term(1.0, 0, 0.0, 0.0, 0.0), term(0.2, 1, 0.0, 0.0, 0.0)]),
                CoefficientForm::constant(0.0),
                g,
                n,
                m,
            ],
            vec![],
        )
        .unwrap();
        problem::validate(&spec).unwrap().into_result().unwrap();
        let homog = problem::homogenize(&spec).unwrap();
        prop_assert!(homog.has_homogeneous_boundary());
        let lift = problem::boundary_lift(&spec).unwrap();
        let cfg = FdConfig { cells: 80, steps: 80, theta: 0.5 };
        let direct = pde_oracle::solve_with_error(&spec, 1.0, cfg).unwrap();
        let shifted = pde_oracle::solve_with_error(&homog, 1.0, cfg).unwrap();
        for k in 0..=cfg.steps {
            let t = direct.coarse.ts[k];
            let eps = direct.eps_value.max(shifted.eps_value);
            for (i, &x) in direct.coarse.xs.iter().enumerate() {
                let back = shifted.coarse.values[k][i] - lift.eval(t, x);
                let diff = (direct.coarse.values[k][i] - back).abs();
                prop_assert!(diff <= 2.0 * eps + 1e-12, "t={} x={} diff {} eps {}", t, x, diff, eps);
            }
        }
    }
}

#[test]
fn validation_rejects_bad_problems() {
    let good = ngb::instances::heat();
    let mut bad = good.clone();
    bad.a = CoefficientForm::terms(vec![term(1.0, 0, 0.0, 0.0, 0.0), term(-2.0, 1, 0.0, 0.0, 0.0)]);
    assert!(matches!(problem::validate(&bad).and_then(|r| r.into_result()), Err(Error::NonEllipticDiffusion { .. })));
    let mut bad = good.clone();
    bad.g = CoefficientForm::terms(vec![term(1.0, 1, 0.0, 0.0, 0.0)]);
    assert!(matches!(problem::validate(&bad).and_then(|r| r.into_result()), Err(Error::IncompatibleInitialSlope { .. })));
    let mut text = good.to_json();
    text = text.replacen("\"zeta\"", "\"surplus\": 1, \"zeta\"", 1);
    assert!(ProblemSpec::from_json(&text).is_err());
}

#[test]
fn json_round_trip() {
    for spec in [ngb::instances::heat(), ngb::instances::variable()] {
        let back = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }
}

#[test]
fn shipped_problem_files_load() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");
    assert_eq!(ProblemSpec::load(format!("{dir}/heat.json")).unwrap(), ngb::instances::heat());
    assert_eq!(ProblemSpec::load(format!("{dir}/variable.json")).unwrap(), ngb::instances::variable());
}
