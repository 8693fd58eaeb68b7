//! Finite differences for
//!
//! ```text
//! V_t = b V_x + (sigma^2/2) a^2 V_xx + h,   V_x(t,0) = n(t),   V_x(t,zeta) = m(t),   V(0,x) = g(x)
//! ```
//!
//! on a uniform grid, theta-weighted in time, with the Neumann data imposed through
//! ghost nodes. Gradients come from central differences inside and second-order
//! one-sided stencils at the two ends.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradient_bound::GradientBound;
use crate::problem::{HypothesisConstants, ProblemSpec};
use crate::sde_oracle::{self, Estimate};
use crate::spectral::Truncation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdConfig {
    pub cells: usize,
    pub steps: usize,
    pub theta: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { cells: 200, steps: 200, theta: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `values[k][i]` at `(ts[k], xs[i])`.
    pub values: Vec<Vec<f64>>,
    pub gradients: Vec<Vec<f64>>,
    pub theta: f64,
}

impl GridSolution {
    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    /// Cubic Lagrange interpolation of level `k` at `x`.
    pub fn value_at(&self, k: usize, x: f64) -> f64 {
        let v = &self.values[k];
        let m = self.xs.len() - 1;
        let h = self.dx();
        let i = ((x - self.xs[0]) / h).floor() as isize;
        let start = (i - 1).clamp(0, m as isize - 3) as usize;
        let mut out = 0.0;
        for j in start..start + 4 {
            let mut w = 1.0;
            for l in start..start + 4 {
                if l != j {
                    w *= (x - self.xs[l]) / (self.xs[j] - self.xs[l]);
                }
            }
            out += w * v[j];
        }
        out
    }
}

/// Tridiagonal solve; `lower[0]` and `upper[n-1]` are ignored.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut den = diag[0];
    if den.abs() < 1e-300 {
        return Err(Error::SingularSystem { row: 0 });
    }
    c[0] = upper[0] / den;
    d[0] = rhs[0] / den;
    for i in 1..n {
        den = diag[i] - lower[i] * c[i - 1];
        if den.abs() < 1e-300 || !den.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        c[i] = if i + 1 < n { upper[i] / den } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Spatial operator at one time: tridiagonal bands plus the forcing from the
/// boundary slopes and `h`.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    source: Vec<f64>,
}

fn operator(spec: &ProblemSpec, xs: &[f64], diff: &[f64], t: f64) -> Operator {
    let m = xs.len() - 1;
    let h = xs[1] - xs[0];
    let mut op = Operator { lower: vec![0.0; m + 1], diag: vec![0.0; m + 1], upper: vec![0.0; m + 1], source: vec![0.0; m + 1] };
    for i in 0..=m {
        let beta = spec.b.eval(t, xs[i]);
        let l = -beta / (2.0 * h) + diff[i] / (h * h);
        let u = beta / (2.0 * h) + diff[i] / (h * h);
        op.diag[i] = -2.0 * diff[i] / (h * h);
        op.source[i] = spec.h.eval(t, xs[i]);
        if i == 0 {
            op.upper[i] = l + u;
            op.source[i] -= 2.0 * h * spec.n.eval(t, 0.0) * l;
        } else if i == m {
            op.lower[i] = l + u;
            op.source[i] += 2.0 * h * spec.m.eval(t, xs[m]) * u;
        } else {
            op.lower[i] = l;
            op.upper[i] = u;
        }
    }
    op
}

fn gradients(v: &[f64], h: f64) -> Vec<f64> {
    let m = v.len() - 1;
    (0..=m)
        .map(|i| {
            if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i == m {
                (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Solves on `[0, horizon] x [0, zeta]` with `cells` intervals in space and `steps` in time.
pub fn solve(spec: &ProblemSpec, horizon: f64, cells: usize, steps: usize, theta: f64) -> Result<GridSolution> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidTime(horizon));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta {theta} outside [0, 1]")));
    }
    if cells < 4 || steps < 1 {
        return Err(Error::InvalidParameter("need at least 4 cells and 1 step".into()));
    }
    let h = spec.zeta / cells as f64;
    let dt = horizon / steps as f64;
    let mut xs: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
    xs[cells] = spec.zeta;
    let mut ts: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    ts[steps] = horizon;
    let diff: Vec<f64> = xs.iter().map(|&x| 0.5 * (spec.sigma * spec.diffusion(x)).powi(2)).collect();
    if theta < 0.5 {
        let dmax = diff.iter().fold(0.0f64, |a, &d| a.max(d));
        let cfl = 2.0 * (1.0 - 2.0 * theta) * dmax * dt / (h * h);
        if cfl > 1.0 {
            return Err(Error::UnstableParameters { cfl });
        }
    }
    let mut cur: Vec<f64> = xs.iter().map(|&x| spec.g.eval(0.0, x)).collect();
    let mut values = Vec::with_capacity(steps + 1);
    let mut grads = Vec::with_capacity(steps + 1);
    grads.push(gradients(&cur, h));
    values.push(cur.clone());
    let mut op_now = operator(spec, &xs, &diff, 0.0);
    let n = cells + 1;
    let mut rhs = vec![0.0; n];
    let (mut lo, mut di, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in 0..steps {
        let op_next = operator(spec, &xs, &diff, ts[k + 1]);
        for i in 0..n {
            let mut av = op_now.diag[i] * cur[i];
            if i > 0 {
                av += op_now.lower[i] * cur[i - 1];
            }
            if i + 1 < n {
                av += op_now.upper[i] * cur[i + 1];
            }
            rhs[i] = cur[i] + (1.0 - theta) * dt * (av + op_now.source[i]) + theta * dt * op_next.source[i];
            lo[i] = -theta * dt * op_next.lower[i];
            di[i] = 1.0 - theta * dt * op_next.diag[i];
            up[i] = -theta * dt * op_next.upper[i];
        }
        cur = if theta == 0.0 { rhs.clone() } else { thomas(&lo, &di, &up, &rhs)? };
        grads.push(gradients(&cur, h));
        values.push(cur.clone());
        op_now = op_next;
    }
    Ok(GridSolution { xs, ts, values, gradients: grads, theta })
}

/// Coarse solution with Richardson error estimates `C (dx^2 + dt^2)`.
///
/// `C` is twice the coefficient observed over every node with `t > 0`, so
/// `eps = 2 (4/3) max_{k >= 1, i} |coarse - fine|`.
#[derive(Clone, Debug, PartialEq)]
pub struct FdEstimate {
    pub coarse: GridSolution,
    pub eps_gradient: f64,
    pub eps_value: f64,
}

/// Solves on the given grid and on the grid refined twice in both directions.
pub fn solve_with_error(spec: &ProblemSpec, horizon: f64, cfg: FdConfig) -> Result<FdEstimate> {
    let coarse = solve(spec, horizon, cfg.cells, cfg.steps, cfg.theta)?;
    let fine = solve(spec, horizon, 2 * cfg.cells, 2 * cfg.steps, cfg.theta)?;
    let richardson = |c: &[Vec<f64>], f: &[Vec<f64>]| {
        let diff = (1..=cfg.steps)
            .flat_map(|k| c[k].iter().enumerate().map(move |(i, v)| (v - f[2 * k][2 * i]).abs()))
            .fold(0.0, f64::max);
        2.0 * (4.0 / 3.0) * diff
    };
    let eps_gradient = richardson(&coarse.gradients, &fine.gradients);
    let eps_value = richardson(&coarse.values, &fine.values);
    Ok(FdEstimate { coarse, eps_gradient, eps_value })
}

/// Supplies an upper bound on `|V_x(t, x)|` for a row of nodes.
pub trait BoundEvaluator {
    fn bounds(&mut self, t: f64, xs: &[f64]) -> Result<Vec<f64>>;
}

/// The explicit bound with constants frozen over the whole horizon.
pub struct ExplicitBound {
    bound: GradientBound,
    tol: f64,
}

impl ExplicitBound {
    pub fn new(hc: &HypothesisConstants, tol: f64) -> Result<Self> {
        Ok(ExplicitBound { bound: GradientBound::new(hc)?, tol })
    }
}

impl BoundEvaluator for ExplicitBound {
    fn bounds(&mut self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        let profile = self.bound.profile(t, Truncation::Tolerance(self.tol))?;
        xs.iter().map(|&x| profile.at(x).map(|r| r.value)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NodeCheck {
    pub t: f64,
    pub x: f64,
    pub gradient: f64,
    pub bound: f64,
    pub slack: f64,
    /// `bound + slack - |gradient|`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub nodes: usize,
    pub worst: NodeCheck,
    pub violations: Vec<NodeCheck>,
    #[serde(skip)]
    pub rows: Vec<NodeCheck>,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<DominationReport> {
        match self.violations.first() {
            None => Ok(self),
            Some(v) => Err(Error::DominationViolation { t: v.t, x: v.x, gradient: v.gradient, bound: v.bound, slack: v.slack }),
        }
    }
}

/// Compares `|V_x|` with the bound at every node with `t > 0`.
pub fn domination_report(est: &FdEstimate, evaluator: &mut dyn BoundEvaluator) -> Result<DominationReport> {
    let grid = &est.coarse;
    let mut rows = Vec::with_capacity((grid.ts.len() - 1) * grid.xs.len());
    for k in 1..grid.ts.len() {
        let t = grid.ts[k];
        let bounds = evaluator.bounds(t, &grid.xs)?;
        for (i, &x) in grid.xs.iter().enumerate() {
            let gradient = grid.gradients[k][i];
            let slack = est.eps_gradient;
            rows.push(NodeCheck { t, x, gradient, bound: bounds[i], slack, margin: bounds[i] + slack - gradient.abs() });
        }
    }
    let worst = *rows
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let violations = rows.iter().filter(|r| r.margin < 0.0).copied().collect();
    Ok(DominationReport { nodes: rows.len(), worst, violations, rows })
}

/// As [`domination_report`], failing on the first violated node.
pub fn verify_domination(
    spec: &ProblemSpec,
    hc: &HypothesisConstants,
    horizon: f64,
    cfg: FdConfig,
    tol: f64,
) -> Result<DominationReport> {
    let est = solve_with_error(spec, horizon, cfg)?;
    let mut eval = ExplicitBound::new(hc, tol)?;
    domination_report(&est, &mut eval)?.into_result()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeynmanKacCheck {
    pub t: f64,
    pub x: f64,
    pub fd_value: f64,
    pub fd_error: f64,
    pub mc: Estimate,
    pub discrepancy: f64,
    /// `3 stderr + fd_error`.
    pub allowance: f64,
    pub passed: bool,
}

/// Compares the grid value at `(t, x)` with a Monte Carlo estimate of the
/// stochastic representation.
#[allow(clippy::too_many_arguments)]
pub fn feynman_kac_check(
    spec: &ProblemSpec,
    t: f64,
    x: f64,
    cfg: FdConfig,
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<FeynmanKacCheck> {
    let est = solve_with_error(spec, t, cfg)?;
    let last = cfg.steps;
    let fd_value = est.coarse.value_at(last, x);
    let fd_error = est.eps_value;
    let mc = sde_oracle::feynman_kac_estimate(spec, t, x, paths, dt, seed)?;
    let discrepancy = (fd_value - mc.value).abs();
    let allowance = 3.0 * mc.stderr + fd_error;
    Ok(FeynmanKacCheck { t, x, fd_value, fd_error, mc, discrepancy, allowance, passed: discrepancy <= allowance })
}
