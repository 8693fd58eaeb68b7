//! Reflected diffusion on `[0, zeta]`:
//!
//! ```text
//! dX_s = b(t - s, X_s) ds + sigma a(X_s) dW_s + dL_s - dU_s
//! ```
//!
//! simulated by an Euler step followed by projection onto the interval. The
//! projection distance is the local-time increment. Every path draws from its own
//! ChaCha stream selected by `(seed, path index)`, so results do not depend on
//! how paths are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{CoefficientForm, Parametric};
use crate::problem::{self, ProblemSpec};

/// 95% two-sided normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Independent stream for one path.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Coefficient with a fast path for constants.
#[derive(Clone, Copy)]
enum Coef<'a> {
    Const(f64),
    Form(&'a CoefficientForm),
}

impl<'a> Coef<'a> {
    fn new(f: &'a CoefficientForm) -> Self {
        match f {
            CoefficientForm::Parametric(p) if !p.depends_on_t() && !p.depends_on_x() => Coef::Const(p.eval(0.0, 0.0)),
            _ => Coef::Form(f),
        }
    }

    #[inline]
    fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Coef::Const(c) => *c,
            Coef::Form(f) => f.eval(t, x),
        }
    }
}

/// Which boundary hitting times to track.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSet {
    Zero,
    Zeta,
    Boundary,
}

/// How an Euler step that leaves `[0, zeta]` is brought back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reflection {
    /// Clip to the nearest endpoint; local time is the clipped distance.
    #[default]
    Projection,
    /// Fold the overshoot back inside; local time is twice the overshoot.
    Mirror,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    pub reflection: Reflection,
    /// Within-step Brownian-bridge crossing test.
    pub bridge: bool,
    /// Keep full trajectories.
    pub record: bool,
    /// Stop a path once it has hit this set.
    pub stop_on: Option<LevelSet>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { reflection: Reflection::Projection, bridge: true, record: false, stop_on: None }
    }
}

/// Monte Carlo output. Hitting times are `f64::INFINITY` when not reached.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    pub seed: u64,
    pub horizon: f64,
    pub x0: f64,
    pub dt: f64,
    pub steps: usize,
    pub zeta: f64,
    pub final_state: Vec<f64>,
    pub local_time_l: Vec<f64>,
    pub local_time_u: Vec<f64>,
    pub tau_zero: Vec<f64>,
    pub tau_zeta: Vec<f64>,
    pub tau_boundary: Vec<f64>,
    /// Left-point integral of `h(t - s, X_s)`.
    pub driver_integral: Vec<f64>,
    /// Trajectories on the step grid when recorded.
    pub paths: Option<Vec<Vec<f64>>>,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.final_state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.final_state.is_empty()
    }

    pub fn hitting_times(&self, set: LevelSet) -> &[f64] {
        match set {
            LevelSet::Zero => &self.tau_zero,
            LevelSet::Zeta => &self.tau_zeta,
            LevelSet::Boundary => &self.tau_boundary,
        }
    }
}

struct PathOut {
    x: f64,
    l: f64,
    u: f64,
    tau0: f64,
    tau1: f64,
    drv: f64,
    path: Option<Vec<f64>>,
}

/// The step grid `n = round(t/dt)`, `dt' = t/n`, after checking `dt` is admissible.
fn step_grid(spec: &ProblemSpec, t: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    if !(dt > 0.0) || dt > t / 10.0 {
        return Err(Error::InvalidStep { dt, limit: t / 10.0 });
    }
    let amax = (0..=256)
        .map(|i| spec.diffusion(spec.zeta * i as f64 / 256.0).abs())
        .fold(0.0, f64::max);
    let vol = spec.sigma * amax;
    let limit = (spec.zeta / 4.0).powi(2) / (vol * vol);
    if dt > limit {
        return Err(Error::InvalidStep { dt, limit });
    }
    let n = (t / dt).round().max(1.0) as usize;
    Ok((n, t / n as f64))
}

/// Probability that a Brownian bridge from `a` to `b` (both beyond the level) crosses it.
#[inline]
fn crossing(a: f64, b: f64, var: f64) -> f64 {
    let e = 2.0 * a * b / var;
    if e > 40.0 {
        0.0
    } else {
        (-e).exp()
    }
}

/// Simulates `paths` reflected paths from `x` over `[0, t]`.
pub fn simulate(spec: &ProblemSpec, t: f64, x: f64, paths: usize, dt: f64, seed: u64) -> Result<PathEnsemble> {
    simulate_with(spec, t, x, paths, dt, seed, SimOptions::default())
}

pub fn simulate_with(
    spec: &ProblemSpec,
    t: f64,
    x: f64,
    paths: usize,
    dt: f64,
    seed: u64,
    opts: SimOptions,
) -> Result<PathEnsemble> {
    let zeta = spec.zeta;
    if !(0.0..=zeta).contains(&x) {
        return Err(Error::InvalidParameter(format!("start {x} outside [0, {zeta}]")));
    }
    let (steps, dt) = step_grid(spec, t, dt)?;
    let sq = dt.sqrt();
    let sigma = spec.sigma;
    let (b, a, h) = (Coef::new(&spec.b), Coef::new(&spec.a), Coef::new(&spec.h));
    let need_h = !spec.h.is_zero();

    let run = |i: usize| -> PathOut {
        let mut rng = path_rng(seed, i as u64);
        let mut cur = x;
        let (mut l, mut u, mut drv) = (0.0, 0.0, 0.0);
        let mut tau0 = if x == 0.0 { 0.0 } else { f64::INFINITY };
        let mut tau1 = if x == zeta { 0.0 } else { f64::INFINITY };
        let mut path = opts.record.then(|| {
            let mut p = Vec::with_capacity(steps + 1);
            p.push(x);
            p
        });
        for k in 0..steps {
            if let Some(set) = opts.stop_on {
                let done = match set {
                    LevelSet::Zero => tau0.is_finite(),
                    LevelSet::Zeta => tau1.is_finite(),
                    LevelSet::Boundary => tau0.is_finite() || tau1.is_finite(),
                };
                if done {
                    break;
                }
            }
            let s = k as f64 * dt;
            let r = t - s;
            if need_h {
                drv += h.eval(r, cur) * dt;
            }
            let vol = sigma * a.eval(0.0, cur);
            let z: f64 = rng.sample(StandardNormal);
            let mut next = cur + b.eval(r, cur) * dt + vol * sq * z;
            let w: f64 = if opts.bridge { rng.random() } else { 1.0 };
            let mid = s + 0.5 * dt;
            if tau0.is_infinite() && (next <= 0.0 || (opts.bridge && w < crossing(cur, next, vol * vol * dt))) {
                tau0 = mid;
            }
            if tau1.is_infinite()
                && (next >= zeta || (opts.bridge && w < crossing(zeta - cur, zeta - next, vol * vol * dt)))
            {
                tau1 = mid;
            }
            match opts.reflection {
                Reflection::Projection => {
                    if next < 0.0 {
                        l -= next;
                        next = 0.0;
                    } else if next > zeta {
                        u += next - zeta;
                        next = zeta;
                    }
                }
                Reflection::Mirror => {
                    while !(0.0..=zeta).contains(&next) {
                        if next < 0.0 {
                            l -= 2.0 * next;
                            next = -next;
                        } else {
                            u += 2.0 * (next - zeta);
                            next = 2.0 * zeta - next;
                        }
                    }
                }
            }
            cur = next;
            if let Some(p) = path.as_mut() {
                p.push(cur);
            }
        }
        PathOut { x: cur, l, u, tau0, tau1, drv, path }
    };

    let outs: Vec<PathOut> = (0..paths).into_par_iter().map(run).collect();
    let mut ens = PathEnsemble {
        seed,
        horizon: t,
        x0: x,
        dt,
        steps,
        zeta,
        final_state: Vec::with_capacity(paths),
        local_time_l: Vec::with_capacity(paths),
        local_time_u: Vec::with_capacity(paths),
        tau_zero: Vec::with_capacity(paths),
        tau_zeta: Vec::with_capacity(paths),
        tau_boundary: Vec::with_capacity(paths),
        driver_integral: Vec::with_capacity(paths),
        paths: opts.record.then(Vec::new),
    };
    for o in outs {
        ens.final_state.push(o.x);
        ens.local_time_l.push(o.l);
        ens.local_time_u.push(o.u);
        ens.tau_zero.push(o.tau0);
        ens.tau_zeta.push(o.tau1);
        ens.tau_boundary.push(o.tau0.min(o.tau1));
        ens.driver_integral.push(o.drv);
        if let (Some(all), Some(p)) = (ens.paths.as_mut(), o.path) {
            all.push(p);
        }
    }
    Ok(ens)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurvivalPoint {
    pub s: f64,
    pub survival: f64,
    /// Half-width of the 95% Wilson interval.
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of paths with `tau >= s` for each `s`.
pub fn hitting_survival_empirical(ens: &PathEnsemble, set: LevelSet, s_grid: &[f64]) -> Vec<SurvivalPoint> {
    let taus = ens.hitting_times(set);
    let n = taus.len();
    s_grid
        .iter()
        .map(|&s| {
            let k = taus.iter().filter(|&&tau| tau >= s).count();
            let (lower, upper) = wilson(k, n);
            SurvivalPoint { s, survival: k as f64 / n as f64, half_width: 0.5 * (upper - lower), lower, upper }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub paths: usize,
}

/// `E[g(X_t) + int_0^t h(t - s, X_s) ds]` by Monte Carlo, using the mirror step.
pub fn feynman_kac_estimate(spec: &ProblemSpec, t: f64, x: f64, paths: usize, dt: f64, seed: u64) -> Result<Estimate> {
    if !spec.has_homogeneous_boundary() {
        return Err(Error::InvalidParameter("boundary data must be homogenised first".into()));
    }
    let ens = simulate_with(spec, t, x, paths, dt, seed, SimOptions { reflection: Reflection::Mirror, bridge: false, record: false, stop_on: None })?;
    let vals: Vec<f64> =
        ens.final_state.iter().zip(&ens.driver_integral).map(|(&xt, &d)| spec.g.eval(0.0, xt) + d).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = if vals.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(Estimate { value: mean, stderr: (var / n).sqrt(), paths })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut z = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            (z, 2.0 / ((1.0 - z * z) * dp * dp))
        })
        .collect()
}

/// The scale map `R(x) = (1/sigma) int_0^x dz / a(z)` and its inverse, tabulated
/// with cubic Hermite interpolation (both derivatives are known exactly).
#[derive(Clone, Debug)]
pub struct ScaleMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    sigma: f64,
    a: Parametric,
}

impl ScaleMap {
    pub fn new(spec: &ProblemSpec, intervals: usize) -> Result<Self> {
        let a = spec.a.parametric("a")?.clone();
        let gl = gauss_legendre(20);
        let n = intervals.max(1);
        let xs: Vec<f64> = (0..=n).map(|i| spec.zeta * i as f64 / n as f64).collect();
        let mut ys = vec![0.0; n + 1];
        for i in 0..n {
            let (lo, hi) = (xs[i], xs[i + 1]);
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let q: f64 = gl.iter().map(|(z, w)| w / a.eval(0.0, c + r * z)).sum::<f64>() * r;
            ys[i + 1] = ys[i] + q / spec.sigma;
        }
        Ok(ScaleMap { xs, ys, sigma: spec.sigma, a })
    }

    fn dr(&self, x: f64) -> f64 {
        1.0 / (self.sigma * self.a.eval(0.0, x))
    }

    pub fn top(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> f64 {
        let h = x1 - x0;
        let s = (x - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * h * d1
    }

    pub fn forward(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let i = ((x / self.xs[n]) * n as f64).floor().clamp(0.0, (n - 1) as f64) as usize;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        Self::hermite(x0, x1, self.ys[i], self.ys[i + 1], self.dr(x0), self.dr(x1), x)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let n = self.xs.len() - 1;
        let i = (self.ys.partition_point(|v| *v <= y).max(1) - 1).min(n - 1);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let d0 = self.sigma * self.a.eval(0.0, x0);
        let d1 = self.sigma * self.a.eval(0.0, x1);
        Self::hermite(y0, y1, x0, x1, d0, d1, y).clamp(x0, x1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowReport {
    pub pairs: usize,
    pub epsilon: f64,
    pub collapse_threshold: f64,
    pub gronwall_rate: f64,
    pub gronwall_failures: usize,
    pub collapse_failures: usize,
    /// Pairs failing either check.
    pub failing: usize,
    pub passing_fraction: f64,
    /// Largest observed `ratio / exp(rate s) - 1` before the first hit.
    pub worst_gronwall_excess: f64,
    /// Pairs whose base path touched the boundary.
    pub hit_pairs: usize,
    /// Minimum over steps of `X^{x+eps} - X^x`.
    pub min_separation: f64,
}

/// Relative slack on the Gronwall envelope.
pub const GRONWALL_SLACK: f64 = 1e-6;

/// Coupled paths from `x` and `x + eps` driven by the same noise, in the coordinates
/// `Y = R(X)` where the noise is additive. Checks the exponential envelope before the
/// first boundary contact and collapse of the pair after the base path touches the boundary.
pub fn flow_collapse_check(
    spec: &ProblemSpec,
    t: f64,
    x: f64,
    eps: f64,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<FlowReport> {
    let zeta = spec.zeta;
    if !(x > 0.0 && x + eps < zeta && eps > 0.0) {
        return Err(Error::InvalidParameter("flow check needs 0 < x < x + eps < zeta".into()));
    }
    let (steps, dt) = step_grid(spec, t, dt)?;
    let hc = problem::extract_constants(spec, t)?;
    let rate = hc.growth();
    let map = ScaleMap::new(spec, 4096)?;
    let top = map.top();
    let a = spec.a.parametric("a")?;
    let a1 = a.dx();
    let sigma = spec.sigma;
    let b = Coef::new(&spec.b);
    let drift = |r: f64, xv: f64| b.eval(r, xv) / (sigma * a.eval(0.0, xv)) - 0.5 * sigma * a1.eval(0.0, xv);
    let sq = dt.sqrt();
    let delta = 10.0 * eps * sq * sigma;
    let (y0a, y0b) = (map.forward(x), map.forward(x + eps));
    let dy0 = y0b - y0a;

    struct PairOut {
        gron_ok: bool,
        collapse_ok: bool,
        excess: f64,
        hit: bool,
        min_sep: f64,
    }

    let run = |i: usize| -> PairOut {
        let mut rng = path_rng(seed, i as u64);
        let (mut ya, mut yb) = (y0a, y0b);
        let (mut xa, mut xb) = (x, x + eps);
        let mut touched = false;
        let mut base_hit = false;
        let mut gron_ok = true;
        let mut excess: f64 = f64::NEG_INFINITY;
        let mut collapsed = false;
        let mut collapse_ok = true;
        let mut min_sep = f64::INFINITY;
        for k in 0..steps {
            let r = t - k as f64 * dt;
            let z: f64 = rng.sample(StandardNormal);
            let na = ya + drift(r, xa) * dt + sq * z;
            let nb = yb + drift(r, xb) * dt + sq * z;
            let out_a = na < 0.0 || na > top;
            let out_b = nb < 0.0 || nb > top;
            ya = na.clamp(0.0, top);
            yb = nb.clamp(0.0, top);
            xa = map.inverse(ya);
            xb = map.inverse(yb);
            let s = (k + 1) as f64 * dt;
            min_sep = min_sep.min(xb - xa);
            if !touched && !(out_a || out_b) {
                let ratio = (yb - ya) / dy0;
                let env = (rate * s).exp();
                excess = excess.max(ratio / env - 1.0);
                if ratio > env * (1.0 + GRONWALL_SLACK) {
                    gron_ok = false;
                }
            }
            touched |= out_a || out_b;
            base_hit |= out_a;
            if base_hit {
                let sep = (xb - xa).abs();
                if sep <= delta {
                    collapsed = true;
                } else if collapsed {
                    collapse_ok = false;
                }
            }
        }
        if base_hit && !collapsed {
            collapse_ok = false;
        }
        PairOut { gron_ok, collapse_ok, excess, hit: base_hit, min_sep }
    };

    let outs: Vec<PairOut> = (0..paths).into_par_iter().map(run).collect();
    let gronwall_failures = outs.iter().filter(|o| !o.gron_ok).count();
    let collapse_failures = outs.iter().filter(|o| !o.collapse_ok).count();
    let failing = outs.iter().filter(|o| !(o.gron_ok && o.collapse_ok)).count();
    Ok(FlowReport {
        pairs: paths,
        epsilon: eps,
        collapse_threshold: delta,
        gronwall_rate: rate,
        gronwall_failures,
        collapse_failures,
        failing,
        passing_fraction: 1.0 - failing as f64 / paths.max(1) as f64,
        worst_gronwall_excess: outs.iter().map(|o| o.excess).fold(f64::NEG_INFINITY, f64::max),
        hit_pairs: outs.iter().filter(|o| o.hit).count(),
        min_separation: outs.iter().map(|o| o.min_sep).fold(f64::INFINITY, f64::min),
    })
}

impl FlowReport {
    pub fn into_result(self) -> Result<FlowReport> {
        if self.failing as f64 > 0.01 * self.pairs as f64 {
            Err(Error::CollapseViolation { failing: self.failing, pairs: self.pairs })
        } else {
            Ok(self)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingReport {
    pub pairs: usize,
    pub checked: usize,
    /// (path, step) pairs where the upper path is strictly below the lower one.
    pub violations: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub ordered_fraction: f64,
    /// Steps with the two paths strictly apart.
    pub strict: usize,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.ordered_fraction >= 0.99 && self.worst_violation <= self.tolerance
    }

    pub fn into_result(self) -> Result<OrderingReport> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::OrderingViolation {
                detail: format!(
                    "ordered fraction {:.6}, worst violation {:.3e} (tolerance {:.3e})",
                    self.ordered_fraction, self.worst_violation, self.tolerance
                ),
            })
        }
    }
}

/// Euler-projection pairs `(upper, lower)` sharing noise; counts ordering breaks.
#[allow(clippy::too_many_arguments)]
fn coupled_ordering(
    upper: &ProblemSpec,
    lower: &ProblemSpec,
    t: f64,
    x_upper: f64,
    x_lower: f64,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<OrderingReport> {
    let zeta = upper.zeta;
    if !(0.0..=zeta).contains(&x_upper) || !(0.0..=zeta).contains(&x_lower) {
        return Err(Error::InvalidParameter("start points must lie in [0, zeta]".into()));
    }
    let (steps, dt) = step_grid(upper, t, dt)?;
    let sq = dt.sqrt();
    let sigma = upper.sigma;
    let (bu, bl) = (Coef::new(&upper.b), Coef::new(&lower.b));
    let a = Coef::new(&upper.a);
    let tol = 10.0 * sq * sigma;

    let run = |i: usize| -> (usize, usize, f64) {
        let mut rng = path_rng(seed, i as u64);
        let (mut xu, mut xl) = (x_upper, x_lower);
        let (mut bad, mut strict, mut worst) = (0usize, 0usize, 0.0f64);
        for k in 0..steps {
            let r = t - k as f64 * dt;
            let z: f64 = rng.sample(StandardNormal);
            xu = (xu + bu.eval(r, xu) * dt + sigma * a.eval(0.0, xu) * sq * z).clamp(0.0, zeta);
            xl = (xl + bl.eval(r, xl) * dt + sigma * a.eval(0.0, xl) * sq * z).clamp(0.0, zeta);
            if xu < xl {
                bad += 1;
                worst = worst.max(xl - xu);
            } else if xu > xl {
                strict += 1;
            }
        }
        (bad, strict, worst)
    };
    let outs: Vec<(usize, usize, f64)> = (0..paths).into_par_iter().map(run).collect();
    let violations: usize = outs.iter().map(|o| o.0).sum();
    let strict: usize = outs.iter().map(|o| o.1).sum();
    let worst = outs.iter().map(|o| o.2).fold(0.0, f64::max);
    let checked = paths * steps;
    Ok(OrderingReport {
        pairs: paths,
        checked,
        violations,
        worst_violation: worst,
        tolerance: tol,
        ordered_fraction: 1.0 - violations as f64 / checked.max(1) as f64,
        strict,
    })
}

/// Ordering in the initial point: paths from `x1 >= x2` under common noise.
pub fn initial_comparison_check(
    spec: &ProblemSpec,
    t: f64,
    x1: f64,
    x2: f64,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<OrderingReport> {
    if x1 < x2 {
        return Err(Error::InvalidParameter("need x1 >= x2".into()));
    }
    coupled_ordering(spec, spec, t, x1, x2, paths, dt, seed)
}

/// Ordering in the drift: `spec_plus` has drift `b1 >= b` (checked on a dense grid).
pub fn drift_comparison_check(
    spec: &ProblemSpec,
    spec_plus: &ProblemSpec,
    t: f64,
    x: f64,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<OrderingReport> {
    if spec.zeta != spec_plus.zeta || spec.sigma != spec_plus.sigma || spec.a != spec_plus.a {
        return Err(Error::InvalidParameter("compared problems must share zeta, sigma and a".into()));
    }
    let n = 256;
    for j in 0..=n {
        let r = t * j as f64 / n as f64;
        for i in 0..=n {
            let xv = spec.zeta * i as f64 / n as f64;
            if spec_plus.b.eval(r, xv) < spec.b.eval(r, xv) {
                return Err(Error::DriftNotOrdered { t: r, x: xv });
            }
        }
    }
    coupled_ordering(spec_plus, spec, t, x, x, paths, dt, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn states_stay_inside_and_local_time_is_one_sided() {
        let spec = instances::constant_drift(10.0, 0.3, 1.0);
        let ens = simulate_with(&spec, 1.0, 0.5, 200, 1e-3, 7, SimOptions { record: true, ..Default::default() }).unwrap();
        for p in ens.paths.as_ref().unwrap() {
            assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&ens.local_time_u) > 1.0);
        assert!(mean(&ens.local_time_l) < 1e-12);
        assert!(ens.tau_boundary.iter().all(|&t| t <= 1.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = instances::variable();
        let a = simulate(&spec, 0.5, 0.3, 64, 1e-2, 11).unwrap();
        let b = simulate(&spec, 0.5, 0.3, 64, 1e-2, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate(&spec, 0.5, 0.3, 64, 1e-2, 12).unwrap();
        assert_ne!(a.final_state, c.final_state);
    }

    #[test]
    fn nearly_deterministic_when_noise_vanishes() {
        let spec = instances::constant_drift(0.0, 1e-12, 1.0);
        let ens = simulate(&spec, 1.0, 0.4, 16, 1e-2, 3).unwrap();
        assert!(ens.final_state.iter().all(|v| (v - 0.4).abs() < 1e-10));
        assert!(ens.local_time_l.iter().chain(&ens.local_time_u).all(|v| *v == 0.0));
    }

    #[test]
    fn step_limits() {
        let spec = instances::heat();
        assert!(matches!(simulate(&spec, 1.0, 0.5, 4, 0.2, 1), Err(Error::InvalidStep { .. })));
    }

    #[test]
    fn constant_payoff_is_exact() {
        let mut spec = instances::heat();
        spec.g = CoefficientForm::constant(2.5);
        let e = feynman_kac_estimate(&spec, 0.7, 0.2, 100, 1e-2, 5).unwrap();
        assert_eq!((e.value, e.stderr), (2.5, 0.0));
        let mut spec = instances::heat();
        spec.g = CoefficientForm::constant(0.0);
        spec.h = CoefficientForm::constant(1.0);
        let e = feynman_kac_estimate(&spec, 0.7, 0.2, 100, 1e-2, 5).unwrap();
        assert!((e.value - 0.7).abs() < 1e-12 && e.stderr < 1e-12);
    }

    #[test]
    fn scale_map_round_trip() {
        let spec = instances::variable();
        let m = ScaleMap::new(&spec, 512).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((m.inverse(m.forward(x)) - x).abs() < 1e-12);
        }
        let heat = ScaleMap::new(&instances::heat(), 64).unwrap();
        assert!((heat.forward(0.37) - 0.37).abs() < 1e-14);
    }

    #[test]
    fn wilson_is_nondegenerate() {
        let (lo, hi) = wilson(0, 1000);
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0);
    }
}
