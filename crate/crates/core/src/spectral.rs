//! First-passage laws of reflected Brownian motion with drift on `[0, zeta]`.
//!
//! For `dS = mu ds + sigma dW` reflected at one end of the interval and started at `x`,
//! the survival function of the hitting time of a level `y` has the expansion
//!
//! ```text
//! P(tau >= s) = sum_n c_n(x) exp(-lambda_n s)
//! ```
//!
//! Eigenvalues come from `tan(alpha) = k alpha` (target below the start, reflection at
//! `zeta`) or `tan(alpha) = -k alpha` (target above, reflection at `0`) with
//! `k = sigma^2 / (mu L)`. Negative drifts are mirrored onto positive ones.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// `|k - 1|` below this is treated as the critical ratio.
pub const RATIO_EQ_WINDOW: f64 = 1e-9;
/// Bisection iteration cap.
pub const MAX_BISECTION: usize = 200;
/// Survival series term cap.
pub const MAX_TERMS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Target below the start, reflection at `zeta`.
    Down,
    /// Target above the start, reflection at `0`.
    Up,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        }
    }
}

/// A root `alpha = quarter_turns * pi/2 + offset` kept in split form so that
/// `tan(alpha)` can be evaluated without cancellation next to its poles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub quarter_turns: u64,
    pub offset: f64,
}

impl Root {
    pub fn value(&self) -> f64 {
        self.quarter_turns as f64 * FRAC_PI_2 + self.offset
    }

    pub fn tan(&self) -> f64 {
        if self.quarter_turns % 2 == 1 {
            -1.0 / self.offset.tan()
        } else {
            self.offset.tan()
        }
    }
}

/// Root of `(sigma^2 / 2L) ln((mu+v)/(mu-v)) = v`, with `gap = mu - v` stored separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperbolicRoot {
    pub v: f64,
    pub gap: f64,
}

fn check_ratio(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("ratio must be positive and finite, got {k}")))
    }
}

/// Bisection for a function positive at `lo` and negative at `hi` (endpoint values are
/// not evaluated). Runs until the midpoint no longer moves.
fn bisect(mut lo: f64, mut hi: f64, what: &'static str, f: impl Fn(f64) -> f64) -> Result<f64> {
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence { what, iterations: MAX_BISECTION })
}

/// `tan(a)/a - 1`, accurate for small `a`.
fn tan_ratio_minus_one(a: f64) -> f64 {
    if a < 0.05 {
        let a2 = a * a;
        a2 * (1.0 / 3.0
            + a2 * (2.0 / 15.0
                + a2 * (17.0 / 315.0 + a2 * (62.0 / 2835.0 + a2 * (1382.0 / 155925.0 + a2 * 21844.0 / 6081075.0)))))
    } else {
        a.tan() / a - 1.0
    }
}

/// `n`-th root of `tan(alpha) = k alpha` in `[(n-1) pi, (n-1) pi + pi/2)`.
pub fn solve_alpha_down(n: usize, k: f64) -> Result<Root> {
    if n == 0 {
        return Err(Error::InvalidParameter("root index starts at 1".into()));
    }
    check_ratio(k)?;
    if n == 1 {
        if k <= 1.0 {
            return Err(Error::NoRootInBracket { n, k });
        }
        if k < 2.0 {
            // tan(a)/a - 1 increases from 0 to infinity on (0, pi/2)
            let km1 = k - 1.0;
            let a = bisect(0.0, FRAC_PI_2, "alpha", |a| km1 - tan_ratio_minus_one(a))?;
            return Ok(Root { quarter_turns: 0, offset: a });
        }
    }
    let q = 2 * n as u64 - 1;
    let base = q as f64 * FRAC_PI_2;
    // alpha = base - g; tan(alpha) = cot(g)
    let g = bisect(0.0, FRAC_PI_2, "alpha", |g| g.cos() - k * (base - g) * g.sin())?;
    Ok(Root { quarter_turns: q, offset: -g })
}

/// `n`-th root of `tan(alpha) = -k alpha` in `(pi/2 + (n-1) pi, n pi]`.
pub fn solve_alpha_up(n: usize, k: f64) -> Result<Root> {
    if n == 0 {
        return Err(Error::InvalidParameter("root index starts at 1".into()));
    }
    check_ratio(k)?;
    let q = 2 * n as u64 - 1;
    let base = q as f64 * FRAC_PI_2;
    // alpha = base + g; tan(alpha) = -cot(g)
    let g = bisect(0.0, FRAC_PI_2, "alpha", |g| g.cos() - k * (base + g) * g.sin())?;
    Ok(Root { quarter_turns: q, offset: g })
}

/// Root `v` in `(0, mu)` of `(sigma^2 / 2L) ln((mu+v)/(mu-v)) = v`; requires `sigma^2/(mu L) < 1`.
pub fn solve_v(mu: f64, sigma: f64, length: f64) -> Result<HyperbolicRoot> {
    if !(mu > 0.0 && sigma > 0.0 && length > 0.0) {
        return Err(Error::InvalidParameter("mu, sigma and L must be positive".into()));
    }
    let k = sigma * sigma / (mu * length);
    if !(k < 1.0 - RATIO_EQ_WINDOW) {
        return Err(Error::RegimeMismatch { ratio: k });
    }
    // with r = v/mu the equation reads k atanh(r) = r
    let (v, gap) = if k >= 0.5 {
        let r = bisect(0.0, 1.0, "v", |r| {
            let q = if r < 1e-6 { 1.0 + r * r / 3.0 } else { r.atanh() / r };
            1.0 - k * q
        })?;
        (mu * r, mu * (1.0 - r))
    } else {
        // q = 1 - r = exp(-u) resolves r close to 1
        let u = bisect(0.0, 2.0 / k + 10.0, "v", |u| {
            let q = (-u).exp();
            (1.0 - q) - 0.5 * k * (u + (2.0 - q).ln())
        })?;
        let q = (-u).exp();
        (mu * (1.0 - q), mu * q)
    };
    Ok(HyperbolicRoot { v, gap })
}

/// Residual of the down-branch root equation.
pub fn residual_down(r: &Root, k: f64) -> f64 {
    r.tan() - k * r.value()
}

/// Residual of the up-branch root equation.
pub fn residual_up(r: &Root, k: f64) -> f64 {
    r.tan() + k * r.value()
}

pub fn residual_v(root: &HyperbolicRoot, mu: f64, sigma: f64, length: f64) -> f64 {
    sigma * sigma / (2.0 * length) * ((mu + root.v) / root.gap).ln() - root.v
}

/// Hitting problem for reflected Brownian motion with drift, stored with
/// non-negative drift (negative drifts are mirrored at construction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HittingProblem {
    pub mu: f64,
    pub sigma: f64,
    pub zeta: f64,
    pub x: f64,
    pub y: f64,
    pub direction: Direction,
    /// Whether `(x, y, mu)` were mapped to `(zeta - x, zeta - y, -mu)`.
    pub mirrored: bool,
}

impl HittingProblem {
    pub fn new(mu: f64, sigma: f64, zeta: f64, x: f64, y: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && zeta > 0.0 && zeta.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidParameter("sigma, zeta must be positive and mu finite".into()));
        }
        if !((0.0..=zeta).contains(&x) && (0.0..=zeta).contains(&y)) {
            return Err(Error::InvalidParameter(format!("x = {x} and y = {y} must lie in [0, {zeta}]")));
        }
        let direction = if y < x || (y == x && y < zeta) { Direction::Down } else { Direction::Up };
        let hp = HittingProblem { mu, sigma, zeta, x, y, direction, mirrored: false };
        Ok(if mu < 0.0 {
            HittingProblem {
                mu: -mu,
                x: zeta - x,
                y: zeta - y,
                direction: direction.flipped(),
                mirrored: true,
                ..hp
            }
        } else {
            hp
        })
    }

    /// Distance between the reflecting end and the target.
    pub fn length(&self) -> f64 {
        match self.direction {
            Direction::Down => self.zeta - self.y,
            Direction::Up => self.y,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.x == self.y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RatioLt1,
    RatioEq1,
    RatioGt1,
    MuZero,
    UpBranch,
}

/// Eigenvalues of one branch, extendable on demand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSystem {
    pub regime: Regime,
    pub direction: Direction,
    pub mu: f64,
    pub sigma: f64,
    pub length: f64,
    /// `sigma^2 / (mu L)`; infinite for zero drift.
    pub ratio: f64,
    /// Trigonometric roots; `None` for a first eigenvalue that is not of that form.
    pub alphas: Vec<Option<Root>>,
    pub lambdas: Vec<f64>,
    pub v: Option<HyperbolicRoot>,
}

impl EigenSystem {
    /// Empty system for a branch with drift `mu >= 0`.
    pub fn branch(direction: Direction, mu: f64, sigma: f64, length: f64) -> Result<Self> {
        if !(mu >= 0.0 && sigma > 0.0 && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "branch needs mu >= 0, sigma > 0, L > 0 (got {mu}, {sigma}, {length})"
            )));
        }
        let ratio = sigma * sigma / (mu * length);
        let regime = if mu == 0.0 || !ratio.is_finite() {
            Regime::MuZero
        } else if direction == Direction::Up {
            Regime::UpBranch
        } else if (ratio - 1.0).abs() < RATIO_EQ_WINDOW {
            Regime::RatioEq1
        } else if ratio < 1.0 {
            Regime::RatioLt1
        } else {
            Regime::RatioGt1
        };
        let ratio = if regime == Regime::MuZero { f64::INFINITY } else { ratio };
        let v = if regime == Regime::RatioLt1 { Some(solve_v(mu, sigma, length)?) } else { None };
        let mu = if regime == Regime::MuZero { 0.0 } else { mu };
        Ok(EigenSystem { regime, direction, mu, sigma, length, ratio, alphas: Vec::new(), lambdas: Vec::new(), v })
    }

    pub fn for_problem(hp: &HittingProblem, count: usize) -> Result<Self> {
        let mut es = EigenSystem::branch(hp.direction, hp.mu, hp.sigma, hp.length())?;
        es.extend(count)?;
        Ok(es)
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn drift_part(&self) -> f64 {
        self.mu * self.mu / (2.0 * self.sigma * self.sigma)
    }

    fn lambda_of(&self, a: f64) -> f64 {
        a * a * self.sigma * self.sigma / (2.0 * self.length * self.length) + self.drift_part()
    }

    /// Grows the system to `count` terms.
    pub fn extend(&mut self, count: usize) -> Result<()> {
        while self.lambdas.len() < count {
            let n = self.lambdas.len() + 1;
            let (root, lambda) = match (self.regime, n) {
                (Regime::MuZero, _) => {
                    let q = 2 * n as u64 - 1;
                    let m = q as f64;
                    let lam = m * m * self.sigma * self.sigma * PI * PI / (8.0 * self.length * self.length);
                    (Some(Root { quarter_turns: q, offset: 0.0 }), lam)
                }
                (Regime::RatioLt1, 1) => {
                    let v = self.v.expect("hyperbolic root present");
                    (None, v.gap * (2.0 * self.mu - v.gap) / (2.0 * self.sigma * self.sigma))
                }
                (Regime::RatioEq1, 1) => (Some(Root { quarter_turns: 0, offset: 0.0 }), self.drift_part()),
                (Regime::UpBranch, _) => {
                    let r = solve_alpha_up(n, self.ratio)?;
                    (Some(r), self.lambda_of(r.value()))
                }
                _ => {
                    let r = solve_alpha_down(n, self.ratio)?;
                    (Some(r), self.lambda_of(r.value()))
                }
            };
            self.alphas.push(root);
            self.lambdas.push(lambda);
        }
        Ok(())
    }

    pub fn alpha(&self, n: usize) -> Option<f64> {
        self.alphas.get(n - 1).copied().flatten().map(|r| r.value())
    }

    /// The factor `c_alpha` of the first-coefficient bound when the ratio is at least one.
    pub fn c_alpha(&self) -> Option<f64> {
        match self.regime {
            Regime::MuZero => Some(1.0),
            Regime::RatioEq1 => Some(1.5),
            Regime::RatioGt1 => {
                let a = self.alphas.first().copied().flatten()?.value();
                let k = self.ratio;
                Some(a * a / (a * a - (k - 1.0) / (k * k)))
            }
            _ => None,
        }
    }

    /// Offsets `(lo, hi)` with `alpha_n` in `[pi (n - 1 + lo), pi (n - 1 + hi)]` for all `n > big_n >= 1`.
    pub fn tail_offsets(&self, big_n: usize) -> (f64, f64) {
        let nn = big_n.max(1) as f64;
        match self.regime {
            Regime::MuZero => (0.5, 0.5),
            Regime::UpBranch => (0.5, (0.5 + 1.0 / (self.ratio * PI * PI * (nn + 0.5))).min(1.0)),
            _ => ((0.5 - 1.0 / (self.ratio * PI * PI * nn)).max(0.0), 0.5),
        }
    }

    /// Lower bound for `lambda_n`, `n > big_n`, written as `A (j + lo)^2 + drift part` with `j = n - 1`.
    pub fn lambda_floor(&self, big_n: usize) -> (f64, f64, f64) {
        let (lo, _) = self.tail_offsets(big_n);
        let a = self.sigma * self.sigma * PI * PI / (2.0 * self.length * self.length);
        (a, lo, self.drift_part())
    }
}

/// Eigen system with `count` terms for a hitting problem.
pub fn eigen_system(hp: &HittingProblem, count: usize) -> Result<EigenSystem> {
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one eigenvalue".into()));
    }
    EigenSystem::for_problem(hp, count)
}

/// `c_n(x)` of the survival expansion.
pub fn coefficient_c(hp: &HittingProblem, es: &EigenSystem, n: usize) -> Result<f64> {
    if n == 0 || n > es.len() {
        return Err(Error::IndexOutOfRange { index: n, len: es.len() });
    }
    if hp.is_degenerate() {
        return Ok(0.0);
    }
    let d = hp.x - hp.y;
    let s2 = hp.sigma * hp.sigma;
    let l = es.length;
    let e = (-es.mu * d / s2).exp();
    let k = es.ratio;
    Ok(match (es.regime, n) {
        (Regime::MuZero, _) => {
            let a = es.alpha(n).unwrap();
            let sgn = if es.direction == Direction::Down { 1.0 } else { -1.0 };
            sgn * 2.0 / a * (a * d / l).sin()
        }
        (Regime::RatioLt1, 1) => {
            let v = es.v.unwrap();
            let denom = s2 * es.mu - v.gap * (2.0 * es.mu - v.gap) * l;
            2.0 * e * (v.v * d / s2).sinh() * s2 * v.v / denom
        }
        (Regime::RatioEq1, 1) => 3.0 * d / l * e,
        (Regime::UpBranch, _) => {
            let a = es.alpha(n).unwrap();
            -2.0 * a / (a * a + (k + 1.0) / (k * k)) * e * (a * d / l).sin()
        }
        _ => {
            let a = es.alpha(n).unwrap();
            2.0 * a / (a * a - (k - 1.0) / (k * k)) * e * (a * d / l).sin()
        }
    })
}

/// Bound on `|c_n(x)|` valid for the given index.
pub fn coefficient_bound(hp: &HittingProblem, es: &EigenSystem, n: usize) -> f64 {
    let d = (hp.x - hp.y).abs();
    let s2 = hp.sigma * hp.sigma;
    let l = es.length;
    let base = 2.0 * d / l * (-es.mu * (hp.x - hp.y) / s2).exp();
    match es.regime {
        Regime::RatioLt1 if n == 1 => {
            let v = es.v.unwrap();
            let denom = s2 * es.mu - v.gap * (2.0 * es.mu - v.gap) * l;
            base * (v.v * l / s2).sinh() * s2 * v.v / denom
        }
        Regime::RatioLt1 | Regime::UpBranch => base,
        _ => base * es.c_alpha().unwrap_or(1.0).max(1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Survival {
    /// Partial sum clamped to `[0, 1]`.
    pub value: f64,
    /// Partial sum as computed.
    pub raw: f64,
    /// Bound on the omitted terms.
    pub tail_bound: f64,
    pub terms_used: usize,
    pub clamped: bool,
}

/// How many terms a series evaluation may use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Add terms until the certified tail drops below the tolerance.
    Tolerance(f64),
    /// Use exactly this many terms.
    Terms(usize),
}

/// Bound on `sum_{n > N} |c_n| exp(-lambda_n s)`.
fn survival_tail(hp: &HittingProblem, es: &EigenSystem, big_n: usize, s: f64) -> f64 {
    let (a, lo, drift) = es.lambda_floor(big_n);
    let b = coefficient_bound(hp, es, 2);
    let u0 = big_n as f64 + lo;
    let at = a * s;
    b * (-drift * s).exp() * (-at * u0 * u0).exp() * (1.0 + 1.0 / (2.0 * at * u0))
}

/// `P(tau >= s)` from the spectral series.
pub fn survival(hp: &HittingProblem, s: f64, tol: f64) -> Result<Survival> {
    survival_with(hp, s, Truncation::Tolerance(tol))
}

pub fn survival_with(hp: &HittingProblem, s: f64, trunc: Truncation) -> Result<Survival> {
    if !(s > 0.0) {
        return Err(Error::InvalidTime(s));
    }
    if hp.is_degenerate() {
        return Ok(Survival { value: 0.0, raw: 0.0, tail_bound: 0.0, terms_used: 0, clamped: false });
    }
    let mut es = EigenSystem::branch(hp.direction, hp.mu, hp.sigma, hp.length())?;
    let mut sum = 0.0;
    let mut n = 0;
    let tail = loop {
        n += 1;
        es.extend(n)?;
        sum += coefficient_c(hp, &es, n)? * (-es.lambdas[n - 1] * s).exp();
        let tail = survival_tail(hp, &es, n, s);
        match trunc {
            Truncation::Terms(cap) if n >= cap.max(1) => break tail,
            Truncation::Tolerance(tol) if tail < tol => break tail,
            _ if n >= MAX_TERMS => return Err(Error::NonConvergence { what: "survival series", iterations: n }),
            _ => {}
        }
    };
    let value = sum.clamp(0.0, 1.0);
    Ok(Survival { value, raw: sum, tail_bound: tail, terms_used: n, clamped: value != sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_down_examples() {
        let r = solve_alpha_down(1, 2.0).unwrap();
        assert!((r.value() - 1.165561185207211).abs() < 1e-12);
        let r = solve_alpha_down(2, 1e12).unwrap();
        assert!((r.value() - 1.5 * PI).abs() < 1e-6);
        assert!(matches!(solve_alpha_down(1, 0.5), Err(Error::NoRootInBracket { .. })));
    }

    #[test]
    fn alpha_up_examples() {
        let r = solve_alpha_up(1, 1.0).unwrap();
        assert!((r.value() - 2.028757838110434).abs() < 1e-12);
        let r = solve_alpha_up(1, 1e12).unwrap();
        assert!(r.value() > FRAC_PI_2 && r.value() <= PI);
        let r = solve_alpha_up(3, 1.0).unwrap();
        assert!((r.value() - 8.0).abs() < 0.5 && residual_up(&r, 1.0).abs() < 1e-10);
    }

    #[test]
    fn alpha_down_near_critical_ratio() {
        for k in [1.0 + 1e-9, 1.0 + 1e-6, 1.01, 1.9999] {
            let r = solve_alpha_down(1, k).unwrap();
            assert!(residual_down(&r, k).abs() < 1e-12, "k = {k}");
            let a = r.value();
            assert!((a * a / (3.0 * (k - 1.0)) - 1.0).abs() < 2.0 * (k - 1.0) + 1e-7);
        }
    }

    #[test]
    fn v_examples() {
        let r = solve_v(2.0, 1.0, 1.0).unwrap();
        assert!((r.v - 1.9150080481545375).abs() < 1e-12);
        assert!(residual_v(&r, 2.0, 1.0, 1.0).abs() < 1e-12);
        assert!(matches!(solve_v(2.0, 2f64.sqrt(), 1.0), Err(Error::RegimeMismatch { .. })));
        let r = solve_v(10.0, 1.0, 1.0).unwrap();
        assert!(r.v > 9.99 && r.v < 10.0);
        assert!(residual_v(&r, 10.0, 1.0, 1.0).abs() < 1e-12);
        let r = solve_v(200.0, 1.0, 1.0).unwrap();
        let q = r.gap / 200.0;
        assert!(q > 0.0 && (q / (2.0 * (-400f64).exp()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mirroring() {
        let hp = HittingProblem::new(-1.0, 1.0, 1.0, 0.75, 0.25).unwrap();
        let twin = HittingProblem::new(1.0, 1.0, 1.0, 0.25, 0.75).unwrap();
        assert_eq!(hp.direction, Direction::Up);
        assert!(hp.mirrored);
        assert_eq!((hp.mu, hp.x, hp.y, hp.direction), (twin.mu, twin.x, twin.y, twin.direction));
        assert_eq!(eigen_system(&hp, 5).unwrap(), eigen_system(&twin, 5).unwrap());
    }

    #[test]
    fn regimes() {
        let r = |mu: f64, y: f64, x: f64| eigen_system(&HittingProblem::new(mu, 1.0, 1.0, x, y).unwrap(), 2).unwrap().regime;
        assert_eq!(r(0.0, 0.0, 1.0), Regime::MuZero);
        assert_eq!(r(2.0, 0.0, 1.0), Regime::RatioLt1);
        assert_eq!(r(1.0, 0.0, 1.0), Regime::RatioEq1);
        assert_eq!(r(0.5, 0.0, 1.0), Regime::RatioGt1);
        assert_eq!(r(0.5, 1.0, 0.0), Regime::UpBranch);
    }

    #[test]
    fn mu_zero_coefficients() {
        let hp = HittingProblem::new(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let es = eigen_system(&hp, 3).unwrap();
        assert!((coefficient_c(&hp, &es, 1).unwrap() - 4.0 / PI).abs() < 1e-15);
        assert!((coefficient_c(&hp, &es, 2).unwrap() + 4.0 / (3.0 * PI)).abs() < 1e-15);
        assert!(matches!(coefficient_c(&hp, &es, 4), Err(Error::IndexOutOfRange { .. })));
        let same = HittingProblem::new(0.3, 1.0, 1.0, 0.4, 0.4).unwrap();
        let es = eigen_system(&same, 3).unwrap();
        assert_eq!(coefficient_c(&same, &es, 2).unwrap(), 0.0);
    }

    #[test]
    fn survival_spot_value() {
        let hp = HittingProblem::new(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let s = survival(&hp, 1.0, 1e-14).unwrap();
        let two = 4.0 / PI * (-PI * PI / 8.0).exp() - 4.0 / (3.0 * PI) * (-9.0 * PI * PI / 8.0).exp();
        assert!((s.value - two).abs() < 1e-9);
        assert!((s.value - 0.3708).abs() < 1e-4);
        assert!(matches!(survival(&hp, 0.0, 1e-12), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn survival_trivial_and_decay() {
        let hp = HittingProblem::new(0.4, 1.0, 1.0, 0.3, 0.3).unwrap();
        assert_eq!(survival(&hp, 0.5, 1e-12).unwrap().value, 0.0);
        let hp = HittingProblem::new(0.4, 1.0, 1.0, 0.7, 0.1).unwrap();
        let mut prev = 1.0;
        for s in [0.05, 0.2, 1.0, 5.0, 50.0] {
            let v = survival(&hp, s, 1e-12).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
        assert!(prev < 1e-6);
    }
}
