//! Command-line front end. Exit codes: 0 success, 1 internal error, 2 invalid
//! problem, 3 a verification check failed.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::forms::{CoefficientForm, Parametric};
use crate::gradient_bound::{self, Branch, GradientBound};
use crate::pde_oracle::{self, ExplicitBound, FdConfig};
use crate::problem::{self, ProblemSpec};
use crate::sde_oracle::{self, LevelSet, Reflection, SimOptions};
use crate::spectral::{self, HittingProblem, Truncation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ngb", version, about = "Explicit gradient bounds for 1-D Neumann parabolic problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pointwise bound on |V_x| over an x-grid at one or more times.
    Bound {
        #[arg(long)]
        problem: PathBuf,
        /// Evaluation time; repeatable. Defaults to the problem horizon.
        #[arg(long = "t")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 101)]
        x_grid: usize,
        #[arg(long, default_value_t = gradient_bound::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Survival probability of a hitting time for drifted reflected Brownian motion.
    Hitting {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        zeta: f64,
        /// Start point.
        #[arg(long)]
        x: f64,
        /// Target boundary, 0 or zeta.
        #[arg(long)]
        y: f64,
        /// Time points; repeatable. Without it a uniform grid on (0, s-max] is used.
        #[arg(long = "s")]
        s: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        s_grid: usize,
        #[arg(long, default_value_t = 1.0)]
        s_max: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Long-time behaviour of the bound.
    Asymptotic {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference solve and node-by-node comparison with the bound.
    VerifyPde {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 200)]
        cells: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = gradient_bound::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = "verify_pde.csv")]
        out: PathBuf,
    },
    /// Monte Carlo checks on the reflected diffusion.
    VerifyMc {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Check::All)]
        check: Check,
        /// Start point for the hitting, flow and comparison checks. Defaults to zeta/2.
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Fk,
    Hitting,
    Flow,
    Comparison,
    All,
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonEllipticDiffusion { .. }
        | Error::IncompatibleInitialSlope { .. }
        | Error::DerivativeUnavailable(_)
        | Error::InvalidParameter(_)
        | Error::RegimeMismatch { .. }
        | Error::InvalidTime(_)
        | Error::UnstableParameters { .. }
        | Error::InvalidStep { .. }
        | Error::DriftNotOrdered { .. }
        | Error::Config(_) => EXIT_INVALID,
        Error::DominationViolation { .. } | Error::CollapseViolation { .. } | Error::OrderingViolation { .. } => {
            EXIT_VERIFICATION
        }
        _ => EXIT_INTERNAL,
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Loads, validates and homogenises a problem file.
pub fn load_problem(path: &Path) -> Result<ProblemSpec> {
    let spec = ProblemSpec::load(path)?;
    problem::validate(&spec)?.into_result()?;
    if spec.has_homogeneous_boundary() {
        Ok(spec)
    } else {
        problem::homogenize(&spec)
    }
}

fn uniform(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Result of a successful invocation: whether every verification passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Passed => EXIT_OK,
            Outcome::Failed => EXIT_VERIFICATION,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Bound { problem, times, x_grid, tol, out } => bound(&problem, times, x_grid, tol, out.as_deref()),
        Command::Hitting { mu, sigma, zeta, x, y, s, s_grid, s_max, tol, out } => {
            let grid = if s.is_empty() { (1..=s_grid).map(|i| s_max * i as f64 / s_grid as f64).collect() } else { s };
            hitting(mu, sigma, zeta, x, y, &grid, tol, out.as_deref())
        }
        Command::Asymptotic { problem, out } => asymptotic(&problem, out.as_deref()),
        Command::VerifyPde { problem, cells, steps, theta, tol, out } => {
            verify_pde(&problem, FdConfig { cells, steps, theta }, tol, &out)
        }
        Command::VerifyMc { problem, paths, dt, seed, check, x, out_dir } => {
            verify_mc(&problem, McArgs { paths, dt, seed, check, x }, &out_dir)
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("--{name} must be positive, got {v}")))
    }
}

fn bound(path: &Path, times: Vec<f64>, x_grid: usize, tol: f64, out: Option<&Path>) -> Result<Outcome> {
    positive("tol", tol)?;
    if x_grid < 2 {
        return Err(Error::InvalidParameter("--x-grid must be at least 2".into()));
    }
    let spec = load_problem(path)?;
    let times = if times.is_empty() { vec![spec.horizon_t] } else { times };
    let xs = uniform(x_grid, 0.0, spec.zeta);
    let mut rows = Vec::new();
    for &t in &times {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        let hc = problem::extract_constants(&spec, t.max(f64::MIN_POSITIVE))?;
        let mut gb = GradientBound::new(&hc)?;
        let profile = gb.profile(t, Truncation::Tolerance(tol))?;
        for &x in &xs {
            let r = profile.at(x)?;
            let branch = match r.branch {
                Branch::Q0 => "Q0",
                Branch::Q1 => "Q1",
            };
            rows.push(vec![num(t), num(x), num(r.value), branch.into(), num(r.q0), num(r.q1), num(r.tail_added)]);
        }
    }
    write_csv(out, &["t", "x", "bound", "branch", "q0", "q1", "tail"], &rows)?;
    Ok(Outcome::Passed)
}

#[allow(clippy::too_many_arguments)]
fn hitting(mu: f64, sigma: f64, zeta: f64, x: f64, y: f64, grid: &[f64], tol: f64, out: Option<&Path>) -> Result<Outcome> {
    positive("tol", tol)?;
    let hp = HittingProblem::new(mu, sigma, zeta, x, y)?;
    let mut rows = Vec::new();
    for &s in grid {
        let r = spectral::survival(&hp, s, tol)?;
        rows.push(vec![num(s), num(r.value), num(r.tail_bound), r.terms_used.to_string()]);
    }
    write_csv(out, &["s", "survival", "tail_bound", "terms_used"], &rows)?;
    Ok(Outcome::Passed)
}

fn asymptotic(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let spec = load_problem(path)?;
    let hc = problem::extract_constants(&spec, spec.horizon_t)?;
    let v = gradient_bound::asymptotic_bounded(&hc)?;
    let summary = json!({
        "bounded": v.bounded,
        "margin_q0": v.margin_q0,
        "margin_q1": v.margin_q1,
        "lambda1_q0": v.lambda1_q0,
        "lambda1_q1": v.lambda1_q1,
        "condition": v.condition,
    });
    println!("MARGIN_Q0={}", num(v.margin_q0));
    println!("MARGIN_Q1={}", num(v.margin_q1));
    println!("VERDICT={}", if v.bounded { "bounded" } else { "unbounded" });
    if let Some(p) = out {
        write_json(p, &summary)?;
    }
    Ok(Outcome::Passed)
}

fn verify_pde(path: &Path, cfg: FdConfig, tol: f64, out: &Path) -> Result<Outcome> {
    positive("tol", tol)?;
    let spec = load_problem(path)?;
    let hc = problem::extract_constants(&spec, spec.horizon_t)?;
    let est = pde_oracle::solve_with_error(&spec, spec.horizon_t, cfg)?;
    let mut eval = ExplicitBound::new(&hc, tol)?;
    let report = pde_oracle::domination_report(&est, &mut eval)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![num(r.t), num(r.x), num(r.gradient), num(r.bound), num(r.slack), num(r.margin)])
        .collect();
    write_csv(Some(out), &["t", "x", "dvdx", "bound", "eps_fd", "margin"], &rows)?;
    let summary = json!({
        "nodes": report.nodes,
        "violations": report.violations.len(),
        "worst_margin": report.worst.margin,
        "worst_t": report.worst.t,
        "worst_x": report.worst.x,
        "cells": cfg.cells,
        "steps": cfg.steps,
        "theta": cfg.theta,
        "passed": report.passed(),
    });
    write_json(&out.with_extension("json"), &summary)?;
    println!("WORST_MARGIN={}", num(report.worst.margin));
    println!("{} verify-pde violations={}", if report.passed() { "PASS" } else { "FAIL" }, report.violations.len());
    Ok(if report.passed() { Outcome::Passed } else { Outcome::Failed })
}

struct McArgs {
    paths: usize,
    dt: f64,
    seed: u64,
    check: Check,
    x: Option<f64>,
}

struct CheckLine {
    name: &'static str,
    passed: bool,
    margin: f64,
}

fn verify_mc(path: &Path, args: McArgs, dir: &Path) -> Result<Outcome> {
    positive("dt", args.dt)?;
    if args.paths == 0 {
        return Err(Error::InvalidParameter("--paths must be positive".into()));
    }
    let spec = load_problem(path)?;
    let x = args.x.unwrap_or(0.5 * spec.zeta);
    if !(x > 0.0 && x < spec.zeta) {
        return Err(Error::InvalidParameter(format!("--x must lie in (0, {})", spec.zeta)));
    }
    std::fs::create_dir_all(dir)?;
    let want = |c: Check| args.check == Check::All || args.check == c;
    let mut lines = Vec::new();
    if want(Check::Fk) {
        lines.push(mc_fk(&spec, &args, dir)?);
    }
    if want(Check::Hitting) {
        lines.push(mc_hitting(&spec, &args, x, dir)?);
    }
    if want(Check::Flow) {
        lines.push(mc_flow(&spec, &args, x, dir)?);
    }
    if want(Check::Comparison) {
        lines.extend(mc_comparison(&spec, &args, x, dir)?);
    }
    let mut summary = serde_json::Map::new();
    for l in &lines {
        summary.insert(l.name.into(), json!({ "passed": l.passed, "margin": l.margin }));
        println!("{} {} margin={}", if l.passed { "PASS" } else { "FAIL" }, l.name, num(l.margin));
    }
    let worst = lines.iter().map(|l| l.margin).fold(f64::INFINITY, f64::min);
    summary.insert("worst_margin".into(), json!(worst));
    summary.insert("seed".into(), json!(args.seed));
    summary.insert("paths".into(), json!(args.paths));
    summary.insert("dt".into(), json!(args.dt));
    write_json(&dir.join("mc_summary.json"), &serde_json::Value::Object(summary))?;
    println!("WORST_MARGIN={}", num(worst));
    Ok(if lines.iter().all(|l| l.passed) { Outcome::Passed } else { Outcome::Failed })
}

fn mc_fk(spec: &ProblemSpec, args: &McArgs, dir: &Path) -> Result<CheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    let mut margin = f64::INFINITY;
    for i in 0..5 {
        let t = spec.horizon_t * (0.05 + 0.95 * rng.random::<f64>());
        let x = spec.zeta * rng.random::<f64>();
        let dt = args.dt.min(t / 10.0);
        let c = pde_oracle::feynman_kac_check(spec, t, x, FdConfig::default(), args.paths, dt, args.seed.wrapping_add(i))?;
        margin = margin.min(c.allowance - c.discrepancy);
        rows.push(vec![
            num(t),
            num(x),
            num(c.fd_value),
            num(c.fd_error),
            num(c.mc.value),
            num(c.mc.stderr),
            num(c.allowance - c.discrepancy),
        ]);
    }
    write_csv(Some(&dir.join("mc_fk.csv")), &["t", "x", "v_fd", "eps_fd", "v_mc", "stderr", "margin"], &rows)?;
    Ok(CheckLine { name: "fk", passed: margin >= 0.0, margin })
}

fn mc_hitting(spec: &ProblemSpec, args: &McArgs, x: f64, dir: &Path) -> Result<CheckLine> {
    let t = spec.horizon_t;
    let hc = problem::extract_constants(spec, t)?;
    let opts = SimOptions { reflection: Reflection::Mirror, stop_on: Some(LevelSet::Boundary), ..Default::default() };
    let ens = sde_oracle::simulate_with(spec, t, x, args.paths, args.dt.min(t / 10.0), args.seed, opts)?;
    let grid: Vec<f64> = (1..=20).map(|i| t * i as f64 / 20.0).collect();
    let emp = sde_oracle::hitting_survival_empirical(&ens, LevelSet::Boundary, &grid);
    let up = HittingProblem::new(hc.mu_u, hc.sigma, hc.zeta, x, 0.0)?;
    let low = HittingProblem::new(hc.mu_l, hc.sigma, hc.zeta, x, hc.zeta)?;
    let scale = hc.c_a_d * hc.c_a_d;
    let mut rows = Vec::new();
    let mut margin = f64::INFINITY;
    for p in &emp {
        let b0 = spectral::survival(&up, scale * p.s, 1e-12)?.value;
        let b1 = spectral::survival(&low, scale * p.s, 1e-12)?.value;
        let m = b0.min(b1) - p.lower;
        margin = margin.min(m);
        rows.push(vec![num(p.s), num(p.survival), num(p.lower), num(p.upper), num(b0), num(b1), num(m)]);
    }
    write_csv(
        Some(&dir.join("mc_hitting.csv")),
        &["s", "survival", "ci_lower", "ci_upper", "bound_zero", "bound_zeta", "margin"],
        &rows,
    )?;
    Ok(CheckLine { name: "hitting", passed: margin >= 0.0, margin })
}

fn mc_flow(spec: &ProblemSpec, args: &McArgs, x: f64, dir: &Path) -> Result<CheckLine> {
    let t = spec.horizon_t;
    let eps = 1e-4 * spec.zeta;
    let r = sde_oracle::flow_collapse_check(spec, t, x, eps, args.paths, args.dt.min(t / 10.0), args.seed)?;
    let rows = vec![vec![
        r.pairs.to_string(),
        num(r.epsilon),
        num(r.collapse_threshold),
        num(r.gronwall_rate),
        r.gronwall_failures.to_string(),
        r.collapse_failures.to_string(),
        num(r.passing_fraction),
    ]];
    write_csv(
        Some(&dir.join("mc_flow.csv")),
        &["pairs", "epsilon", "collapse_threshold", "gronwall_rate", "gronwall_failures", "collapse_failures", "passing_fraction"],
        &rows,
    )?;
    let margin = r.passing_fraction - 0.99;
    Ok(CheckLine { name: "flow", passed: margin >= 0.0, margin })
}

fn mc_comparison(spec: &ProblemSpec, args: &McArgs, x: f64, dir: &Path) -> Result<Vec<CheckLine>> {
    let t = spec.horizon_t;
    let dt = args.dt.min(t / 10.0);
    let lower_x = 0.5 * x;
    let initial = sde_oracle::initial_comparison_check(spec, t, x, lower_x, args.paths, dt, args.seed)?;
    let mut plus = spec.clone();
    let shifted = spec.b.parametric("b")?.add(&Parametric::constant(1.0));
    plus.b = CoefficientForm::Parametric(shifted);
    let drift = sde_oracle::drift_comparison_check(spec, &plus, t, x, args.paths, dt, args.seed)?;
    let rows: Vec<Vec<String>> = [("initial", &initial), ("drift", &drift)]
        .iter()
        .map(|(name, r)| {
            vec![
                name.to_string(),
                r.checked.to_string(),
                r.violations.to_string(),
                num(r.worst_violation),
                num(r.tolerance),
                num(r.ordered_fraction),
            ]
        })
        .collect();
    write_csv(
        Some(&dir.join("mc_comparison.csv")),
        &["kind", "checked", "violations", "worst_violation", "tolerance", "ordered_fraction"],
        &rows,
    )?;
    let line = |name, r: &sde_oracle::OrderingReport| CheckLine {
        name,
        passed: r.passed(),
        margin: (r.ordered_fraction - 0.99).min(r.tolerance - r.worst_violation),
    };
    Ok(vec![line("comparison_initial", &initial), line("comparison_drift", &drift)])
}
