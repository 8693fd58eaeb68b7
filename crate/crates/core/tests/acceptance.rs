//! One test per acceptance criterion, each printing a single PASS/FAIL line.

use std::f64::consts::PI;

use ngb::forms::{CoefficientForm, Parametric};
use ngb::gradient_bound::{self, GradientBound};
use ngb::instances;
use ngb::pde_oracle::{self, ExplicitBound, FdConfig};
use ngb::problem::{self, ProblemSpec};
use ngb::sde_oracle::{self, LevelSet, Reflection, SimOptions};
use ngb::spectral::{self, Direction, EigenSystem, HittingProblem, Truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, passed: bool, detail: String) -> bool {
    println!("CRITERION {n:>2} {} {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

fn hitting_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.05 * i as f64).collect()
}

fn criterion_01_zero_drift_eigenvalues() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let sigma = rng.random_range(0.1..3.0);
        let len = rng.random_range(0.1..5.0);
        for dir in [Direction::Down, Direction::Up] {
            let mut es = EigenSystem::branch(dir, 0.0, sigma, len).unwrap();
            es.extend(50).unwrap();
            for (i, &lam) in es.lambdas.iter().enumerate() {
                let m = (2 * i + 1) as f64;
                let exact = m * m * sigma * sigma * PI * PI / (8.0 * len * len);
                worst = worst.max((lam - exact).abs() / exact);
            }
        }
    }
    report(1, worst <= 1e-12, format!("max relative error {worst:.3e} (limit 1e-12)"))
}

fn criterion_02_root_residuals() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut down, mut up, mut hyper): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let k: f64 = 10f64.powf(rng.random_range(-1.5..1.5));
        for n in 1..=50 {
            if n > 1 || k >= 1.0 {
                let r = spectral::solve_alpha_down(n, k).unwrap();
                down = down.max((r.tan() - k * r.value()).abs());
            }
            let r = spectral::solve_alpha_up(n, k).unwrap();
            up = up.max((r.tan() + k * r.value()).abs());
        }
        if k < 1.0 {
            let (sigma, len) = (1.0, 1.0);
            let mu = sigma * sigma / (k * len);
            let v = spectral::solve_v(mu, sigma, len).unwrap();
            hyper = hyper.max(spectral::residual_v(&v, mu, sigma, len).abs());
        }
    }
    let passed = down < 1e-10 && up < 1e-10 && hyper < 1e-12;
    report(2, passed, format!("down {down:.3e}, up {up:.3e} (limit 1e-10); v {hyper:.3e} (limit 1e-12)"))
}

fn criterion_03_sign_lemma() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    let mut example = String::new();
    for _ in 0..1000 {
        let mu = rng.random_range(0.01..5.0);
        let sigma = rng.random_range(0.1..3.0);
        let zeta = rng.random_range(0.5..2.0);
        let y = rng.random_range(0.0..zeta);
        let mut es = EigenSystem::branch(Direction::Down, mu, sigma, zeta - y).unwrap();
        es.extend(20).unwrap();
        let mut bad = false;
        for &lam in &es.lambdas {
            let s = mu - 2.0 * lam * (zeta - y);
            if s > worst {
                worst = s;
                example = format!("mu={mu:.3} sigma={sigma:.3} L={:.3} ratio={:.3}", zeta - y, es.ratio);
            }
            bad |= s > 1e-12;
        }
        failures += bad as usize;
    }
    report(3, failures == 0, format!("{failures}/1000 draws violate; max {worst:.3e} at {example}"))
}

fn criterion_04_series_vs_monte_carlo() -> bool {
    let grid = hitting_grid();
    let mut lines = Vec::new();
    let mut passed = true;
    for (i, mu) in [0.0, 1.0, -1.0].into_iter().enumerate() {
        let spec = instances::constant_drift(mu, 1.0, 1.0);
        let opts = SimOptions { reflection: Reflection::Mirror, stop_on: Some(LevelSet::Zero), ..Default::default() };
        let ens = sde_oracle::simulate_with(&spec, 1.0, 1.0, 100_000, 1e-4, 400 + i as u64, opts).unwrap();
        let emp = sde_oracle::hitting_survival_empirical(&ens, LevelSet::Zero, &grid);
        let hp = HittingProblem::new(mu, 1.0, 1.0, 1.0, 0.0).unwrap();
        let mut worst: f64 = 0.0;
        for p in &emp {
            let series = spectral::survival(&hp, p.s, 1e-12).unwrap().value;
            worst = worst.max((series - p.survival).abs() / (3.0 * p.half_width));
        }
        passed &= worst <= 1.0;
        lines.push(format!("mu={mu}: max |err|/(3 hw) {worst:.3}"));
        if mu == 0.0 {
            let series = spectral::survival(&hp, 1.0, 1e-12).unwrap().value;
            let p = emp.last().unwrap();
            let spot = (series - 0.3708).abs() < 5e-5 && (series - p.survival).abs() <= 3.0 * p.half_width;
            passed &= spot;
            lines.push(format!("spot s=1 series {series:.4} empirical {:.4} +- {:.4}", p.survival, p.half_width));
        }
    }
    report(4, passed, lines.join("; "))
}

fn domination(spec: &ProblemSpec) -> pde_oracle::DominationReport {
    let hc = problem::extract_constants(spec, 1.0).unwrap();
    let est = pde_oracle::solve_with_error(spec, 1.0, FdConfig { cells: 200, steps: 200, theta: 0.5 }).unwrap();
    let mut eval = ExplicitBound::new(&hc, gradient_bound::DEFAULT_TOL).unwrap();
    pde_oracle::domination_report(&est, &mut eval).unwrap()
}

fn criterion_05_domination() -> bool {
    let heat = domination(&instances::heat());
    let var = domination(&instances::variable());
    let hc = problem::extract_constants(&instances::heat(), 1.0).unwrap();
    let spot = gradient_bound::pointwise_bound(&hc, 1.0, 0.5, gradient_bound::DEFAULT_TOL).unwrap().value;
    let exact = instances::heat_exact_dx(1.0, 0.5).abs();
    let passed = heat.passed() && var.passed() && (spot - 0.9149).abs() < 5e-4 && (exact - 0.0226).abs() < 5e-5;
    report(
        5,
        passed,
        format!(
            "heat: {} violations over {} nodes, worst margin {:.3e}; variable: {} violations, worst margin {:.3e}; spot bound {spot:.4} vs exact {exact:.4}",
            heat.violations.len(),
            heat.nodes,
            heat.worst.margin,
            var.violations.len(),
            var.worst.margin
        ),
    )
}

fn criterion_06_feynman_kac() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        for i in 0..5 {
            let t = rng.random_range(0.05..1.0);
            let x = rng.random_range(0.0..1.0);
            let c = pde_oracle::feynman_kac_check(&spec, t, x, FdConfig::default(), 100_000, t / 2000.0, 600 + i).unwrap();
            passed &= c.passed;
            worst = worst.max(c.discrepancy / c.allowance);
            println!("  {name} t={t:.3} x={x:.3} fd={:.6} mc={:.6} se={:.2e} eps={:.2e}", c.fd_value, c.mc.value, c.mc.stderr, c.fd_error);
        }
    }
    report(6, passed, format!("max |V_FD - MC| / (3 se + eps_FD) = {worst:.3}"))
}

fn criterion_07_flow_collapse() -> bool {
    let mut lines = Vec::new();
    let mut passed = true;
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        let r = sde_oracle::flow_collapse_check(&spec, 1.0, 0.5, 1e-4, 10_000, 1e-3, 700).unwrap();
        passed &= r.passing_fraction >= 0.99;
        lines.push(format!(
            "{name}: {:.4} passing ({} Gronwall, {} collapse failures, {} pairs hit)",
            r.passing_fraction, r.gronwall_failures, r.collapse_failures, r.hit_pairs
        ));
    }
    report(7, passed, lines.join("; "))
}

fn criterion_08_comparison() -> bool {
    let spec = instances::variable();
    let initial = sde_oracle::initial_comparison_check(&spec, 1.0, 0.6, 0.4, 10_000, 1e-3, 800).unwrap();
    let mut plus = spec.clone();
    plus.b = CoefficientForm::Parametric(spec.b.parametric("b").unwrap().add(&Parametric::constant(1.0)));
    let drift = sde_oracle::drift_comparison_check(&spec, &plus, 1.0, 0.5, 10_000, 1e-3, 801).unwrap();
    report(
        8,
        initial.passed() && drift.passed(),
        format!(
            "initial: ordered {:.5}, worst {:.2e}; drift: ordered {:.5}, worst {:.2e} (tolerance {:.2e})",
            initial.ordered_fraction, initial.worst_violation, drift.ordered_fraction, drift.worst_violation, drift.tolerance
        ),
    )
}

fn criterion_09_asymptotic() -> bool {
    let hc = problem::extract_constants(&instances::heat(), 1.0).unwrap();
    let v = gradient_bound::asymptotic_bounded(&hc).unwrap();
    let target = -PI * PI / 8.0;
    let margin_ok = v.bounded && (v.margin_q0 - target).abs() < 1e-12 && (v.margin_q1 - target).abs() < 1e-12;
    let big_t = 100.0 / v.margin_q0.abs();
    let mut gb = GradientBound::new(&hc).unwrap();
    let q_t = gb.q0(big_t, Truncation::Tolerance(gradient_bound::DEFAULT_TOL)).unwrap().value;
    let q_2t = gb.q0(2.0 * big_t, Truncation::Tolerance(gradient_bound::DEFAULT_TOL)).unwrap().value;
    let rel = (q_2t - q_t).abs() / q_t;
    report(
        9,
        margin_ok && rel < 0.05,
        format!("verdict bounded={}, margin {:.12}; T={big_t:.2}, Q(T)={q_t:.3e}, Q(2T)={q_2t:.3e}, relative change {rel:.3}", v.bounded, v.margin_q0),
    )
}

fn criterion_10_truncation_integrity() -> bool {
    let mut checked = 0;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for mu in [0.0, 1.0, -1.0] {
        let hp = HittingProblem::new(mu, 1.0, 1.0, 1.0, 0.0).unwrap();
        for s in hitting_grid() {
            let a = spectral::survival(&hp, s, 1e-12).unwrap();
            let b = spectral::survival_with(&hp, s, Truncation::Terms(2 * a.terms_used)).unwrap();
            let change = (b.value - a.value).abs();
            checked += 1;
            bad += (change > a.tail_bound) as usize;
            worst = worst.max(change / a.tail_bound);
        }
    }
    for spec in [instances::heat(), instances::variable()] {
        let hc = problem::extract_constants(&spec, 1.0).unwrap();
        let mut gb = GradientBound::new(&hc).unwrap();
        for k in 1..=200 {
            let t = k as f64 / 200.0;
            for side0 in [true, false] {
                let tol = Truncation::Tolerance(gradient_bound::DEFAULT_TOL);
                let a = if side0 { gb.q0(t, tol) } else { gb.q1(t, tol) }.unwrap();
                let doubled = Truncation::Terms(2 * a.terms_used);
                let b = if side0 { gb.q0(t, doubled) } else { gb.q1(t, doubled) }.unwrap();
                let change = (b.value - a.value).abs();
                checked += 1;
                bad += (change > a.tail) as usize;
                if a.tail > 0.0 {
                    worst = worst.max(change / a.tail);
                }
            }
        }
    }
    report(10, bad == 0, format!("{bad}/{checked} evaluations change by more than their tail; max change/tail {worst:.3}"))
}

fn main() {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_zero_drift_eigenvalues,
        criterion_02_root_residuals,
        criterion_03_sign_lemma,
        criterion_04_series_vs_monte_carlo,
        criterion_05_domination,
        criterion_06_feynman_kac,
        criterion_07_flow_collapse,
        criterion_08_comparison,
        criterion_09_asymptotic,
        criterion_10_truncation_integrity,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
