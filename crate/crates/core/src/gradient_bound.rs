//! The explicit bound on `|dV/dx|`.
//!
//! With `D(lambda) = sigma c_D c_a^u - lambda (c_a^d)^2`,
//! `L(t, lambda) = (exp(D t) - 1) / D` and `N(t, lambda) = c_h L + c_g exp(D t)`,
//! each side of the interval yields a series `Q = sum_n w_n N(t, lambda_n)` over the
//! eigenvalues of a reflected Brownian motion with an extreme drift, and
//!
//! ```text
//! |V_x(t,x)| <= 2 (c_a^u / c_a^d) min( x/zeta e^{-mu_u x/sigma^2} Q0,
//!                                      (zeta-x)/zeta e^{-mu_l (x-zeta)/sigma^2} Q1 )
//! ```
//!
//! Series are truncated adaptively and the certified tail is added to the value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::HypothesisConstants;
use crate::spectral::{Direction, EigenSystem, Regime, Truncation};

/// `|D|` below this uses the limit `L = t`.
pub const D_LIMIT: f64 = 1e-12;
/// Default relative truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Absolute floor of the truncation tolerance.
pub const ABS_TOL_FLOOR: f64 = 1e-12;
/// Term cap for adaptive truncation.
pub const MAX_TERMS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuxFunctions {
    /// `sigma c_D c_a^u`
    pub growth: f64,
    /// `(c_a^d)^2`
    pub weight: f64,
    pub c_h: f64,
    pub c_g: f64,
}

impl AuxFunctions {
    pub fn new(hc: &HypothesisConstants) -> Self {
        AuxFunctions { growth: hc.growth(), weight: hc.c_a_d * hc.c_a_d, c_h: hc.c_h, c_g: hc.c_g }
    }

    pub fn d_of(&self, lambda: f64) -> f64 {
        self.growth - lambda * self.weight
    }

    pub fn l_of(&self, t: f64, lambda: f64) -> f64 {
        let d = self.d_of(lambda);
        if d.abs() < D_LIMIT {
            t
        } else {
            (d * t).exp_m1() / d
        }
    }

    pub fn n_of(&self, t: f64, lambda: f64) -> f64 {
        let d = self.d_of(lambda);
        let l = if d.abs() < D_LIMIT { t } else { (d * t).exp_m1() / d };
        let e = if self.c_g == 0.0 { 0.0 } else { self.c_g * (d * t).exp() };
        self.c_h * l + e
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Q0,
    Q1,
}

/// One side's series value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideValue {
    /// Partial sum plus certified tail.
    pub value: f64,
    pub partial: f64,
    pub tail: f64,
    pub terms_used: usize,
    pub c_alpha: Option<f64>,
    pub regime: Regime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub branch: Branch,
    pub q0: f64,
    pub q1: f64,
    /// Terms used by the active side.
    pub terms_used: usize,
    /// Certified tail contribution included in `value`.
    pub tail_added: f64,
    pub c_alpha: Option<f64>,
}

/// Eigen family for the side anchored at `0` (`side0 = true`) or at `zeta`.
fn family(hc: &HypothesisConstants, side0: bool) -> Result<EigenSystem> {
    let (dir, mu) = if side0 {
        if hc.mu_u >= 0.0 {
            (Direction::Down, hc.mu_u)
        } else {
            (Direction::Up, -hc.mu_u)
        }
    } else if hc.mu_l >= 0.0 {
        (Direction::Up, hc.mu_l)
    } else {
        (Direction::Down, -hc.mu_l)
    };
    EigenSystem::branch(dir, mu, hc.sigma, hc.zeta)
}

/// Weights `(first, rest)` of the series terms.
fn weights(es: &EigenSystem) -> (f64, f64) {
    match (es.regime, es.direction) {
        (Regime::RatioLt1, _) => {
            let v = es.v.expect("hyperbolic root");
            let s2 = es.sigma * es.sigma;
            let l = es.length;
            let denom = s2 * es.mu - v.gap * (2.0 * es.mu - v.gap) * l;
            (s2 * v.v * (v.v * l / s2).sinh() / denom, 1.0)
        }
        (Regime::UpBranch, _) | (Regime::MuZero, Direction::Up) => (1.0, 1.0),
        _ => {
            let c = es.c_alpha().expect("first root present");
            (c, c)
        }
    }
}

/// `int_{u1}^inf du / (A u^2 + B)` for `A u1^2 + B > 0`, `u1 > 0`.
fn inverse_quadratic_tail(a: f64, b: f64, u1: f64) -> f64 {
    if b > 0.0 {
        ((b / a).sqrt() / u1).atan() / (a * b).sqrt()
    } else if b == 0.0 {
        1.0 / (a * u1)
    } else {
        let c = -b;
        ((c / a).sqrt() / u1).atanh() / (a * c).sqrt()
    }
}

/// Upper and lower estimates of `sum_{n > N} N(t, lambda_n)` (unit weight).
fn tail_estimates(aux: &AuxFunctions, es: &EigenSystem, big_n: usize, t: f64) -> (f64, f64) {
    let (lo, hi) = es.tail_offsets(big_n);
    let (alam, _, drift) = es.lambda_floor(big_n);
    let a = aux.weight * alam;
    let b = aux.weight * drift - aux.growth;
    let nn = big_n as f64;
    let e = |u: f64| a * u * u + b;

    let mut upper = 0.0;
    let mut lower = 0.0;
    if aux.c_g > 0.0 {
        let u0 = nn + lo;
        let at = a * t;
        upper += aux.c_g * (-b * t).exp() * (-at * u0 * u0).exp() * (1.0 + 1.0 / (2.0 * at * u0));
    }
    if aux.c_h > 0.0 {
        let u1 = nn + lo - 0.5;
        let convex = |u: f64| b <= 0.0 || 3.0 * a * u * u >= b;
        if !(u1 > 0.0 && e(u1) > 0.0 && convex(u1)) {
            return (f64::INFINITY, 0.0);
        }
        upper += aux.c_h * inverse_quadratic_tail(a, b, u1);
        let u2 = nn + hi;
        if e(u2) > 0.0 && convex(u2) {
            let damp = -(-e(u2) * t).exp_m1();
            lower += aux.c_h * damp * (inverse_quadratic_tail(a, b, u2) + 0.5 / e(u2));
        }
    }
    (upper, lower)
}

fn side_value(aux: &AuxFunctions, es: &mut EigenSystem, t: f64, trunc: Truncation) -> Result<SideValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let regime = es.regime;
    es.extend(1)?;
    let c_alpha = es.c_alpha();
    if t == 0.0 {
        let v = if aux.c_g > 0.0 { f64::INFINITY } else { 0.0 };
        return Ok(SideValue { value: v, partial: v, tail: v, terms_used: 0, c_alpha, regime });
    }
    let (first, rest) = weights(es);
    let mut partial = 0.0;
    let mut n = 0;
    let tail = loop {
        n += 1;
        es.extend(n)?;
        let w = if n == 1 { first } else { rest };
        partial += w * aux.n_of(t, es.lambdas[n - 1]);
        let (up, low) = tail_estimates(aux, es, n, t);
        let (up, low) = (rest * up, rest * low);
        match trunc {
            Truncation::Terms(cap) if n >= cap.max(1) => break up,
            Truncation::Tolerance(tol) if up.is_finite() && up - low <= (tol * partial).max(ABS_TOL_FLOOR) => {
                break up
            }
            _ if n >= MAX_TERMS => return Err(Error::NonConvergence { what: "bound series", iterations: n }),
            _ => {}
        }
    };
    Ok(SideValue { value: partial + tail, partial, tail, terms_used: n, c_alpha, regime })
}

/// Holds the two eigen families for one set of constants so repeated evaluations
/// reuse the roots.
#[derive(Clone, Debug)]
pub struct GradientBound {
    pub hc: HypothesisConstants,
    pub aux: AuxFunctions,
    side0: EigenSystem,
    side1: EigenSystem,
}

impl GradientBound {
    pub fn new(hc: &HypothesisConstants) -> Result<Self> {
        Ok(GradientBound {
            hc: hc.clone(),
            aux: AuxFunctions::new(hc),
            side0: family(hc, true)?,
            side1: family(hc, false)?,
        })
    }

    pub fn q0(&mut self, t: f64, trunc: Truncation) -> Result<SideValue> {
        side_value(&self.aux, &mut self.side0, t, trunc)
    }

    pub fn q1(&mut self, t: f64, trunc: Truncation) -> Result<SideValue> {
        side_value(&self.aux, &mut self.side1, t, trunc)
    }

    /// Both sides at time `t`, ready to be combined at many `x`.
    pub fn profile(&mut self, t: f64, trunc: Truncation) -> Result<Profile> {
        Ok(Profile { hc: self.hc.clone(), q0: self.q0(t, trunc)?, q1: self.q1(t, trunc)? })
    }

    pub fn at(&mut self, t: f64, x: f64, trunc: Truncation) -> Result<BoundResult> {
        self.profile(t, trunc)?.at(x)
    }

    pub fn side0_family(&self) -> &EigenSystem {
        &self.side0
    }

    pub fn side1_family(&self) -> &EigenSystem {
        &self.side1
    }
}

/// The two side values at a fixed time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub hc: HypothesisConstants,
    pub q0: SideValue,
    pub q1: SideValue,
}

fn weighted(pref: f64, q: f64) -> f64 {
    if pref == 0.0 {
        0.0
    } else {
        pref * q
    }
}

impl Profile {
    /// Prefactors `(x/zeta e^{-mu_u x/s^2}, (zeta-x)/zeta e^{-mu_l (x-zeta)/s^2})`.
    pub fn prefactors(&self, x: f64) -> (f64, f64) {
        let hc = &self.hc;
        let s2 = hc.sigma * hc.sigma;
        (
            x / hc.zeta * (-hc.mu_u * x / s2).exp(),
            (hc.zeta - x) / hc.zeta * (-hc.mu_l * (x - hc.zeta) / s2).exp(),
        )
    }

    pub fn at(&self, x: f64) -> Result<BoundResult> {
        let hc = &self.hc;
        if !(0.0..=hc.zeta).contains(&x) {
            return Err(Error::InvalidParameter(format!("x = {x} outside [0, {}]", hc.zeta)));
        }
        let scale = 2.0 * hc.c_a_u / hc.c_a_d;
        let (p0, p1) = self.prefactors(x);
        let s0 = weighted(p0, self.q0.value);
        let s1 = weighted(p1, self.q1.value);
        let (branch, side, pref, v) = if s0 <= s1 { (Branch::Q0, &self.q0, p0, s0) } else { (Branch::Q1, &self.q1, p1, s1) };
        Ok(BoundResult {
            value: scale * v,
            branch,
            q0: self.q0.value,
            q1: self.q1.value,
            terms_used: side.terms_used,
            tail_added: scale * weighted(pref, side.tail),
            c_alpha: self.q0.c_alpha,
        })
    }
}

pub fn q0(hc: &HypothesisConstants, t: f64, tol: f64) -> Result<SideValue> {
    GradientBound::new(hc)?.q0(t, Truncation::Tolerance(tol))
}

pub fn q1(hc: &HypothesisConstants, t: f64, tol: f64) -> Result<SideValue> {
    GradientBound::new(hc)?.q1(t, Truncation::Tolerance(tol))
}

pub fn pointwise_bound(hc: &HypothesisConstants, t: f64, x: f64, tol: f64) -> Result<BoundResult> {
    GradientBound::new(hc)?.at(t, x, Truncation::Tolerance(tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticVerdict {
    pub bounded: bool,
    /// `D(lambda_1)` of the family anchored at `0`.
    pub margin_q0: f64,
    /// `D(lambda_1)` of the family anchored at `zeta`.
    pub margin_q1: f64,
    pub lambda1_q0: f64,
    pub lambda1_q1: f64,
    pub condition: String,
}

/// Whether either side's series stays bounded as `t` grows, i.e. `D(lambda_1) < 0`.
pub fn asymptotic_bounded(hc: &HypothesisConstants) -> Result<AsymptoticVerdict> {
    let aux = AuxFunctions::new(hc);
    let mut f0 = family(hc, true)?;
    let mut f1 = family(hc, false)?;
    f0.extend(1)?;
    f1.extend(1)?;
    let (l0, l1) = (f0.lambdas[0], f1.lambdas[0]);
    let (m0, m1) = (aux.d_of(l0), aux.d_of(l1));
    let bounded = m0 < 0.0 || m1 < 0.0;
    let condition = match (m0 < 0.0, m1 < 0.0) {
        (true, true) => "both sides decay",
        (true, false) => "side at 0 decays",
        (false, true) => "side at zeta decays",
        (false, false) => "condition fails",
    };
    Ok(AsymptoticVerdict { bounded, margin_q0: m0, margin_q1: m1, lambda1_q0: l0, lambda1_q1: l1, condition: condition.into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn heat_hc() -> HypothesisConstants {
        HypothesisConstants {
            c_a_d: 1.0,
            c_a_u: 1.0,
            c_lip: 0.0,
            c_d: 0.0,
            c_h: 0.0,
            c_g: PI,
            mu_l: 0.0,
            mu_u: 0.0,
            horizon_t: 1.0,
            sigma: 1.0,
            zeta: 1.0,
        }
    }

    #[test]
    fn l_limit_branch() {
        let aux = AuxFunctions { growth: 2.0, weight: 1.0, c_h: 1.0, c_g: 0.0 };
        assert_eq!(aux.l_of(0.7, 2.0), 0.7);
        assert!((aux.l_of(0.7, 2.0 + 1e-9) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn heat_q0() {
        let q = q0(&heat_hc(), 1.0, DEFAULT_TOL).unwrap();
        let direct: f64 = PI * (1..40).map(|n| (-((2 * n - 1) as f64).powi(2) * PI * PI / 8.0).exp()).sum::<f64>();
        assert!((q.value - direct).abs() < 1e-8 * direct + 1e-12);
        assert!((q.value - 0.9149).abs() < 1e-4);
        assert_eq!(q.c_alpha, Some(1.0));
    }

    #[test]
    fn zero_time() {
        let mut hc = heat_hc();
        hc.c_g = 0.0;
        hc.c_h = 3.0;
        assert_eq!(q0(&hc, 0.0, DEFAULT_TOL).unwrap().value, 0.0);
        assert_eq!(q1(&hc, 0.0, DEFAULT_TOL).unwrap().value, 0.0);
    }

    #[test]
    fn symmetric_sides_agree() {
        let hc = heat_hc();
        assert_eq!(q0(&hc, 0.3, DEFAULT_TOL).unwrap().value, q1(&hc, 0.3, DEFAULT_TOL).unwrap().value);
        let b = pointwise_bound(&hc, 1.0, 0.5, DEFAULT_TOL).unwrap();
        assert_eq!(b.branch, Branch::Q0);
        assert!(b.value > PI * (-PI * PI / 2.0).exp());
        assert_eq!(pointwise_bound(&hc, 1.0, 0.5001, DEFAULT_TOL).unwrap().branch, Branch::Q1);
        assert_eq!(pointwise_bound(&hc, 1.0, 0.0, DEFAULT_TOL).unwrap().value, 0.0);
        assert_eq!(pointwise_bound(&hc, 1.0, 1.0, DEFAULT_TOL).unwrap().value, 0.0);
    }

    #[test]
    fn asymptotic_heat() {
        let v = asymptotic_bounded(&heat_hc()).unwrap();
        assert!(v.bounded);
        assert!((v.margin_q0 + PI * PI / 8.0).abs() < 1e-14);
        assert!((v.margin_q1 + PI * PI / 8.0).abs() < 1e-14);
        let mut hc = heat_hc();
        hc.c_d = 1e6;
        let v = asymptotic_bounded(&hc).unwrap();
        assert!(!v.bounded && v.margin_q0 > 0.0 && v.margin_q1 > 0.0);
    }
}
