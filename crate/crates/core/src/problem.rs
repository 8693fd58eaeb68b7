//! PDE instances, hypothesis checks, boundary homogenisation and the explicit constants.
//!
//! The problem is
//!
//! ```text
//! V_t = b(t,x) V_x + (sigma^2/2) a(x)^2 V_xx + h(t,x)   on [0, zeta]
//! V_x(t,0) = n(t),  V_x(t,zeta) = m(t),  V(0,x) = g(x)
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{CoefficientForm, FormConfig, Parametric, RowEval, Term};

/// Slope compatibility tolerance for `g'(0) = n(0)`, `g'(zeta) = m(0)`.
pub const SLOPE_TOL: f64 = 1e-10;
/// Grid nodes per `x`-piece when envelopes are not available in closed form.
pub const ENVELOPE_NODES_X: usize = 2048;
/// Grid nodes per dyadic time block.
pub const ENVELOPE_NODES_T: usize = 256;
/// Time blocks start at `2^FIRST_BLOCK_EXP`; everything below is one block.
const FIRST_BLOCK_EXP: i32 = -10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    pub b: FormConfig,
    pub a: FormConfig,
    pub h: FormConfig,
    pub g: FormConfig,
    pub n: FormConfig,
    pub m: FormConfig,
}

/// JSON document describing a problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub zeta: f64,
    pub sigma: f64,
    pub horizon_t: f64,
    pub coefficients: CoefficientsConfig,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub zeta: f64,
    pub sigma: f64,
    pub horizon_t: f64,
    pub b: CoefficientForm,
    pub a: CoefficientForm,
    pub h: CoefficientForm,
    pub g: CoefficientForm,
    pub n: CoefficientForm,
    pub m: CoefficientForm,
    pub breakpoints: Vec<f64>,
}

impl ProblemSpec {
    /// Checks well-formedness: positive scales, ordered breakpoints inside the domain,
    /// piece boundaries among them, and the right variables for each coefficient.
    pub fn new(
        zeta: f64,
        sigma: f64,
        horizon_t: f64,
        coefs: [CoefficientForm; 6],
        breakpoints: Vec<f64>,
    ) -> Result<Self> {
        let [b, a, h, g, n, m] = coefs;
        let spec = ProblemSpec { zeta, sigma, horizon_t, b, a, h, g, n, m, breakpoints };
        spec.check_shape()?;
        Ok(spec)
    }

    fn check_shape(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos(self.zeta, "zeta")?;
        pos(self.sigma, "sigma")?;
        pos(self.horizon_t, "horizon_t")?;
        if self.breakpoints.windows(2).any(|w| !(w[0] < w[1]))
            || self.breakpoints.iter().any(|p| !(*p > 0.0 && *p < self.zeta))
        {
            return Err(Error::Config("breakpoints must be increasing and inside (0, zeta)".into()));
        }
        for (name, f) in self.named() {
            if let CoefficientForm::Parametric(p) = f {
                for br in p.breaks() {
                    if !(*br <= 0.0 || *br >= self.zeta || self.breakpoints.contains(br)) {
                        return Err(Error::Config(format!("coefficient `{name}` breaks at undeclared point {br}")));
                    }
                }
            }
        }
        for (name, f) in [("a", &self.a), ("g", &self.g)] {
            if f.depends_on_t() {
                return Err(Error::Config(format!("coefficient `{name}` must not depend on t")));
            }
        }
        for (name, f) in [("n", &self.n), ("m", &self.m)] {
            if f.depends_on_x() {
                return Err(Error::Config(format!("coefficient `{name}` must not depend on x")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, &CoefficientForm); 6] {
        [("b", &self.b), ("a", &self.a), ("h", &self.h), ("g", &self.g), ("n", &self.n), ("m", &self.m)]
    }

    pub fn from_config(cfg: &ProblemConfig) -> Result<Self> {
        let c = &cfg.coefficients;
        let f = CoefficientForm::from_config;
        ProblemSpec::new(
            cfg.zeta,
            cfg.sigma,
            cfg.horizon_t,
            [f(&c.b)?, f(&c.a)?, f(&c.h)?, f(&c.g)?, f(&c.n)?, f(&c.m)?],
            cfg.breakpoints.clone(),
        )
    }

    pub fn to_config(&self) -> ProblemConfig {
        ProblemConfig {
            zeta: self.zeta,
            sigma: self.sigma,
            horizon_t: self.horizon_t,
            coefficients: CoefficientsConfig {
                b: self.b.to_config(),
                a: self.a.to_config(),
                h: self.h.to_config(),
                g: self.g.to_config(),
                n: self.n.to_config(),
                m: self.m.to_config(),
            },
            breakpoints: self.breakpoints.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_str(text)?;
        ProblemSpec::from_config(&cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ProblemSpec::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("config serializes")
    }

    pub fn has_homogeneous_boundary(&self) -> bool {
        self.n.is_zero() && self.m.is_zero()
    }

    /// Drift `b(t, x)` of the PDE.
    #[inline]
    pub fn drift(&self, t: f64, x: f64) -> f64 {
        self.b.eval(t, x)
    }

    /// `a(x)`.
    #[inline]
    pub fn diffusion(&self, x: f64) -> f64 {
        self.a.eval(0.0, x)
    }
}

/// One line of a validation report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    /// `None` when the item cannot be checked for this representation.
    pub passed: Option<bool>,
    pub evidence: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub items: Vec<CheckItem>,
    #[serde(skip)]
    failure: Option<Error>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref()
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        match self.failure.clone() {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

/// Runs every hypothesis check and keeps the full report, including failures.
pub fn inspect(spec: &ProblemSpec) -> ValidationReport {
    let mut items = Vec::new();
    let mut failure = None;

    match diffusion_minimum(spec) {
        Ok((min, at)) => {
            let ok = min > 0.0;
            items.push(CheckItem {
                name: "uniform ellipticity",
                passed: Some(ok),
                evidence: format!("certified min a = {min:.6e} near x = {at:.6}"),
            });
            if !ok {
                failure.get_or_insert(Error::NonEllipticDiffusion { min, at });
            }
        }
        Err(e) => {
            items.push(CheckItem { name: "uniform ellipticity", passed: Some(false), evidence: e.to_string() });
            failure.get_or_insert(e);
        }
    }

    let lip = match &spec.b {
        CoefficientForm::Parametric(b) => {
            let blocks = time_blocks(spec.horizon_t, b.depends_on_t());
            Ok(abs_sup(&b.dx(), spec.zeta, &blocks))
        }
        CoefficientForm::Tabulated(t) => Ok(table_slope(t)),
    };
    match lip {
        Ok(c) => items.push(CheckItem {
            name: "Lipschitz drift",
            passed: Some(c.is_finite()),
            evidence: format!("sup |b_x| <= {c:.6e} on [0, {}]", spec.horizon_t),
        }),
        Err::<f64, Error>(e) => items.push(CheckItem { name: "Lipschitz drift", passed: Some(false), evidence: e.to_string() }),
    }

    for (at, datum) in [(0.0, &spec.n), (spec.zeta, &spec.m)] {
        match &spec.g {
            CoefficientForm::Parametric(g) => {
                let slope = g.dx().eval(0.0, at);
                let d = datum.eval(0.0, 0.0);
                let ok = (slope - d).abs() <= SLOPE_TOL;
                items.push(CheckItem {
                    name: "initial slope compatibility",
                    passed: Some(ok),
                    evidence: format!("g'({at}) = {slope:.6e}, boundary datum {d:.6e}"),
                });
                if !ok {
                    failure.get_or_insert(Error::IncompatibleInitialSlope { at, slope, datum: d });
                }
            }
            CoefficientForm::Tabulated(_) => items.push(CheckItem {
                name: "initial slope compatibility",
                passed: None,
                evidence: "tabulated g carries no exact slope".into(),
            }),
        }
    }

    ValidationReport { items, failure }
}

/// Hypothesis checks; fails with the first violated item.
pub fn validate(spec: &ProblemSpec) -> Result<ValidationReport> {
    inspect(spec).into_result()
}

fn table_slope(t: &crate::forms::Table) -> f64 {
    let nx = t.x.len();
    if nx < 2 {
        return 0.0;
    }
    let mut s: f64 = 0.0;
    for row in t.values.chunks(nx) {
        for i in 0..nx - 1 {
            s = s.max(((row[i + 1] - row[i]) / (t.x[i + 1] - t.x[i])).abs());
        }
    }
    s
}

fn diffusion_minimum(spec: &ProblemSpec) -> Result<(f64, f64)> {
    match &spec.a {
        CoefficientForm::Tabulated(t) => {
            let mut pts: Vec<f64> = t.x.iter().copied().filter(|x| *x > 0.0 && *x < spec.zeta).collect();
            pts.extend([0.0, spec.zeta]);
            Ok(pts
                .into_iter()
                .map(|x| (spec.a.eval(0.0, x), x))
                .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc }))
        }
        CoefficientForm::Parametric(a) => {
            let (min, _) = form_envelope(a, spec.zeta, &[(0.0, 0.0)]);
            let at = argmin_on_grid(a, spec.zeta);
            Ok((min, at))
        }
    }
}

fn argmin_on_grid(a: &Parametric, zeta: f64) -> f64 {
    (0..=ENVELOPE_NODES_X)
        .map(|i| zeta * i as f64 / ENVELOPE_NODES_X as f64)
        .map(|x| (a.eval(0.0, x), x))
        .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc })
        .1
}

/// Moves non-zero Neumann data into the driver and the initial condition through
/// `phi(t,x) = -n(t) x - (m(t) - n(t)) x^2 / (2 zeta)`, so that `U = V + phi`
/// solves the same equation with zero boundary slopes.
pub fn homogenize(spec: &ProblemSpec) -> Result<ProblemSpec> {
    if spec.has_homogeneous_boundary() {
        return Ok(spec.clone());
    }
    let phi = boundary_lift(spec)?;
    let b = spec.b.parametric("b")?;
    let a = spec.a.parametric("a")?;
    let h = spec.h.parametric("h")?;
    let g = spec.g.parametric("g")?;
    let half_s2 = 0.5 * spec.sigma * spec.sigma;
    let phi_x = phi.dx();
    let phi_xx = phi_x.dx();
    let new_h = h
        .add(&phi.dt())
        .sub(&b.mul(&phi_x))
        .sub(&a.mul(a).mul(&phi_xx).scale(half_s2));
    let new_g = g.add(&phi.at_time(0.0));
    Ok(ProblemSpec {
        h: CoefficientForm::Parametric(new_h),
        g: CoefficientForm::Parametric(new_g),
        n: CoefficientForm::constant(0.0),
        m: CoefficientForm::constant(0.0),
        ..spec.clone()
    })
}

/// The lift `phi` whose addition homogenises the boundary data.
pub fn boundary_lift(spec: &ProblemSpec) -> Result<Parametric> {
    let n = spec.n.parametric("n")?;
    let m = spec.m.parametric("m")?;
    let lin = Parametric::new(vec![Term::monomial(-1.0, 1)]);
    let quad = Parametric::new(vec![Term::monomial(-0.5 / spec.zeta, 2)]);
    Ok(n.mul(&lin).add(&m.sub(n).mul(&quad)))
}

/// The explicit constants entering the bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstants {
    pub c_a_d: f64,
    pub c_a_u: f64,
    pub c_lip: f64,
    pub c_d: f64,
    pub c_h: f64,
    pub c_g: f64,
    pub mu_l: f64,
    pub mu_u: f64,
    pub horizon_t: f64,
    pub sigma: f64,
    pub zeta: f64,
}

impl HypothesisConstants {
    /// `sigma * c_D * c_a^u`, the growth rate in the auxiliary exponent.
    pub fn growth(&self) -> f64 {
        self.sigma * self.c_d * self.c_a_u
    }
}

/// Dyadic time blocks covering `[0, 2^ceil(log2 t)]`. A single frozen node when the
/// coefficients are static.
pub fn time_blocks(t: f64, dynamic: bool) -> Vec<(f64, f64)> {
    if !dynamic {
        return vec![(0.0, 0.0)];
    }
    let first = 2f64.powi(FIRST_BLOCK_EXP);
    let mut blocks = vec![(0.0, first)];
    let mut hi = first;
    while hi < t {
        blocks.push((hi, 2.0 * hi));
        hi *= 2.0;
    }
    blocks
}

/// Upper end of the time window actually covered for horizon `t`.
pub fn window_end(t: f64) -> f64 {
    time_blocks(t, true).last().unwrap().1
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 || a == b {
        return vec![a];
    }
    (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

/// Sub-intervals of `[0, zeta]` between consecutive breaks of any of `forms`.
fn smooth_intervals(forms: &[&Parametric], zeta: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = forms
        .iter()
        .flat_map(|f| f.breaks().iter().copied())
        .filter(|b| *b > 0.0 && *b < zeta)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut pts = vec![0.0];
    pts.extend(cuts);
    pts.push(zeta);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Scans `combine(values)` over each smooth interval and time block; `pad` returns the
/// certified slack for an (interval, block, hx, ht) cell.
fn scan(
    forms: &[&Parametric],
    zeta: f64,
    blocks: &[(f64, f64)],
    combine: impl Fn(&[f64]) -> f64,
    pad: impl Fn((f64, f64), (f64, f64), f64, f64) -> f64,
) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut vals = vec![0.0; forms.len()];
    for iv in smooth_intervals(forms, zeta) {
        let xs = linspace(iv.0, iv.1, ENVELOPE_NODES_X);
        let hx = if xs.len() > 1 { (iv.1 - iv.0) / (xs.len() - 1) as f64 } else { 0.0 };
        for &blk in blocks {
            let ts = linspace(blk.0, blk.1, ENVELOPE_NODES_T);
            let ht = if ts.len() > 1 { (blk.1 - blk.0) / (ts.len() - 1) as f64 } else { 0.0 };
            let evals: Vec<RowEval> = forms.iter().map(|f| RowEval::new(f.terms_at(iv.0), &ts, &xs)).collect();
            let mut rows = vec![vec![0.0; xs.len()]; forms.len()];
            let (mut cmin, mut cmax) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in 0..ts.len() {
                for (e, r) in evals.iter().zip(rows.iter_mut()) {
                    e.row(j, r);
                }
                for i in 0..xs.len() {
                    for (v, r) in vals.iter_mut().zip(&rows) {
                        *v = r[i];
                    }
                    let q = combine(&vals);
                    cmin = cmin.min(q);
                    cmax = cmax.max(q);
                }
            }
            let p = pad(iv, blk, hx, ht);
            lo = lo.min(cmin - p);
            hi = hi.max(cmax + p);
        }
    }
    (lo, hi)
}

/// Certified range of a parametric form over `[0, zeta] x window`.
pub fn form_envelope(f: &Parametric, zeta: f64, blocks: &[(f64, f64)]) -> (f64, f64) {
    if !f.depends_on_t() {
        if let Some(r) = f.quadratic_range(0.0, zeta) {
            return r;
        }
    }
    let fx = f.dx();
    let ft = f.dt();
    let (fxx, fxt, ftt) = (fx.dx(), fx.dt(), ft.dt());
    scan(&[f], zeta, blocks, |v| v[0], |iv, blk, hx, ht| {
        let s = |g: &Parametric| g.sup_abs(iv.0, iv.1, blk.1);
        let first = hx * s(&fx) + ht * s(&ft);
        let second = (s(&fxx) * hx * hx + 2.0 * s(&fxt) * hx * ht + s(&ftt) * ht * ht) / 8.0;
        first.min(second)
    })
}

fn abs_sup(f: &Parametric, zeta: f64, blocks: &[(f64, f64)]) -> f64 {
    let (lo, hi) = form_envelope(f, zeta, blocks);
    lo.abs().max(hi.abs())
}

/// Computes certified envelopes of every constant over the horizon window.
pub fn extract_constants(spec: &ProblemSpec, horizon_t: f64) -> Result<HypothesisConstants> {
    if !(horizon_t >= 0.0) || !horizon_t.is_finite() {
        return Err(Error::InvalidTime(horizon_t));
    }
    if !spec.has_homogeneous_boundary() {
        return Err(Error::InvalidParameter("boundary data must be homogenised first".into()));
    }
    let b = spec.b.parametric("b")?;
    let a = spec.a.parametric("a")?;
    let h = spec.h.parametric("h")?;
    let g = spec.g.parametric("g")?;
    let zeta = spec.zeta;
    let sigma = spec.sigma;
    let window = time_blocks(horizon_t, b.depends_on_t());
    let h_window = time_blocks(horizon_t, h.depends_on_t());
    let frozen = [(0.0, 0.0)];

    let (ad, au) = form_envelope(a, zeta, &frozen);
    if !(ad > 0.0) {
        return Err(Error::NonEllipticDiffusion { min: ad, at: argmin_on_grid(a, zeta) });
    }
    let (a1, a2, a3) = (a.dx(), a.dx().dx(), a.dx().dx().dx());
    let (bx, bt) = (b.dx(), b.dt());
    let (bxx, bxt) = (bx.dx(), bx.dt());

    // drift envelopes of b / a^2
    let (mu_l, mu_u) = if !a.depends_on_x() {
        let inv = 1.0 / (ad * ad);
        form_envelope(&b.scale(inv), zeta, &window)
    } else {
        scan(&[b, a], zeta, &window, |v| v[0] / (v[1] * v[1]), |iv, blk, hx, ht| {
            let s = |f: &Parametric| f.sup_abs(iv.0, iv.1, blk.1);
            hx * (s(&bx) / (ad * ad) + 2.0 * s(b) * s(&a1) / (ad * ad * ad)) + ht * s(&bt) / (ad * ad)
        })
    };

    let c_lip = abs_sup(&bx, zeta, &window);

    // D_x = b_x/(sigma a) - b a'/(sigma a^2) - (sigma/2) a''
    let c_d = if b.is_zero() {
        abs_sup(&a2.scale(-0.5 * sigma), zeta, &frozen)
    } else if !a.depends_on_x() {
        abs_sup(&bx.scale(1.0 / (sigma * ad)), zeta, &window)
    } else {
        let (lo, hi) = scan(
            &[b, &bx, a, &a1, &a2],
            zeta,
            &window,
            |v| v[1] / (sigma * v[2]) - v[0] * v[3] / (sigma * v[2] * v[2]) - 0.5 * sigma * v[4],
            |iv, blk, hx, ht| {
                let s = |f: &Parametric| f.sup_abs(iv.0, iv.1, blk.1);
                let (sb, sbx, sbxx, sbt, sbxt) = (s(b), s(&bx), s(&bxx), s(&bt), s(&bxt));
                let (sa1, sa2, sa3) = (s(&a1), s(&a2), s(&a3));
                let dxx = sbxx / (sigma * ad)
                    + 2.0 * sbx * sa1 / (sigma * ad * ad)
                    + sb * sa2 / (sigma * ad * ad)
                    + 2.0 * sb * sa1 * sa1 / (sigma * ad * ad * ad)
                    + 0.5 * sigma * sa3;
                let dxt = sbxt / (sigma * ad) + sbt * sa1 / (sigma * ad * ad);
                hx * dxx + ht * dxt
            },
        );
        lo.abs().max(hi.abs())
    };

    let c_h = abs_sup(&h.dx(), zeta, &h_window);
    let c_g = abs_sup(&g.dx(), zeta, &frozen);

    Ok(HypothesisConstants {
        c_a_d: ad,
        c_a_u: au,
        c_lip,
        c_d,
        c_h,
        c_g,
        mu_l,
        mu_u,
        horizon_t,
        sigma,
        zeta,
    })
}

/// `D^t(s,x) = b(t-s,x)/(sigma a(x)) - (sigma/2) a'(x)`, the drift after the change of scale.
pub fn scaled_drift(spec: &ProblemSpec, t: f64, s: f64, x: f64) -> Result<f64> {
    let a = spec.a.parametric("a")?;
    let av = a.eval(0.0, x);
    Ok(spec.b.eval(t - s, x) / (spec.sigma * av) - 0.5 * spec.sigma * a.dx().eval(0.0, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use std::f64::consts::PI;

    fn with(spec: &ProblemSpec, f: impl FnOnce(&mut ProblemSpec)) -> ProblemSpec {
        let mut s = spec.clone();
        f(&mut s);
        s
    }

    #[test]
    fn heat_instance_validates() {
        let r = validate(&instances::heat()).unwrap();
        assert!(r.items.iter().all(|i| i.passed != Some(false)));
    }

    #[test]
    fn degenerate_diffusion_rejected() {
        let s = with(&instances::heat(), |s| s.a = CoefficientForm::terms(vec![Term::monomial(1.0, 1)]));
        assert!(matches!(validate(&s), Err(Error::NonEllipticDiffusion { .. })));
    }

    #[test]
    fn incompatible_slope_rejected() {
        let s = with(&instances::heat(), |s| s.g = CoefficientForm::terms(vec![Term::monomial(1.0, 1)]));
        assert!(matches!(validate(&s), Err(Error::IncompatibleInitialSlope { at, .. }) if at == 0.0));
    }

    #[test]
    fn homogenize_identity() {
        let s = instances::heat();
        assert_eq!(homogenize(&s).unwrap(), s);
    }

    #[test]
    fn homogenize_unit_slopes() {
        let s = with(&instances::variable(), |s| {
            s.n = CoefficientForm::constant(1.0);
            s.m = CoefficientForm::constant(1.0);
        });
        let u = homogenize(&s).unwrap();
        for &(t, x) in &[(0.2, 0.1), (0.9, 0.7)] {
            assert!((u.g.eval(0.0, x) - (s.g.eval(0.0, x) - x)).abs() < 1e-14);
            assert!((u.h.eval(t, x) - (s.h.eval(t, x) + s.b.eval(t, x))).abs() < 1e-14);
        }
    }

    #[test]
    fn homogenize_quadratic_lift() {
        let s = with(&instances::variable(), |s| s.m = CoefficientForm::constant(2.0));
        let u = homogenize(&s).unwrap();
        for &(t, x) in &[(0.2, 0.1), (0.9, 0.7)] {
            let a = s.a.eval(0.0, x);
            let expect = s.h.eval(t, x) + 2.0 * x * s.b.eval(t, x) + a * a;
            assert!((u.h.eval(t, x) - expect).abs() < 1e-13);
            assert!((u.g.eval(0.0, x) - (s.g.eval(0.0, x) - x * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn tabulated_boundary_data_refused() {
        let s = with(&instances::heat(), |s| {
            s.n = CoefficientForm::Tabulated(crate::forms::Table { x: vec![], t: vec![0.0, 1.0], values: vec![0.0, 1.0] })
        });
        assert_eq!(homogenize(&s), Err(Error::DerivativeUnavailable("n")));
    }

    #[test]
    fn constants_trivial_cases() {
        let hc = extract_constants(&instances::heat(), 1.0).unwrap();
        assert_eq!((hc.c_d, hc.mu_l, hc.mu_u, hc.c_h), (0.0, 0.0, 0.0, 0.0));
        assert_eq!((hc.c_a_d, hc.c_a_u), (1.0, 1.0));
        assert!(hc.c_g >= PI && hc.c_g < PI * (1.0 + 1e-6));

        let s = with(&instances::heat(), |s| s.b = CoefficientForm::constant(0.7));
        let hc = extract_constants(&s, 1.0).unwrap();
        assert_eq!((hc.mu_l, hc.mu_u, hc.c_d), (0.7, 0.7, 0.0));
    }

    #[test]
    fn constants_quadratic_diffusion() {
        let s = with(&instances::heat(), |s| {
            s.a = CoefficientForm::terms(vec![Term::constant(1.0), Term::monomial(1.0, 1), Term::monomial(-1.0, 2)])
        });
        let hc = extract_constants(&s, 1.0).unwrap();
        assert_eq!((hc.c_a_d, hc.c_a_u, hc.c_d), (1.0, 1.25, 1.0));
    }

    #[test]
    fn window_is_dyadic_and_nested() {
        assert_eq!(window_end(1.0), 1.0);
        assert_eq!(window_end(1.5), 2.0);
        assert_eq!(window_end(1e-6), 2f64.powi(-10));
        let a = time_blocks(3.0, true);
        let b = time_blocks(9.0, true);
        assert_eq!(&b[..a.len()], &a[..]);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let s = instances::variable();
        let back = ProblemSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let mut v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(ProblemSpec::from_json(&v.to_string()).is_err());
    }
}
