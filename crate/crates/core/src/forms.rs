//! Coefficient representations.
//!
//! A parametric coefficient is piecewise in `x` (pieces separated by declared
//! breakpoints) and each piece is a finite sum of separable terms
//!
//! ```text
//! coef * x^p * cos(wx * x + px) * t^q * cos(wt * t + pt)
//! ```
//!
//! The family is closed under sums, products and partial derivatives, so every
//! quantity the bound needs has an exact closed form. At a breakpoint the right
//! piece is used. Tabulated coefficients interpolate linearly and refuse to
//! differentiate.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_zero_pow(p: &u32) -> bool {
    *p == 0
}

fn is_zero_f64(v: &f64) -> bool {
    *v == 0.0
}

/// One separable term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    #[serde(default, skip_serializing_if = "is_zero_pow")]
    pub x_pow: u32,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    pub x_freq: f64,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    pub x_phase: f64,
    #[serde(default, skip_serializing_if = "is_zero_pow")]
    pub t_pow: u32,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    pub t_freq: f64,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    pub t_phase: f64,
}

impl Term {
    pub fn constant(c: f64) -> Self {
        Term { coef: c, x_pow: 0, x_freq: 0.0, x_phase: 0.0, t_pow: 0, t_freq: 0.0, t_phase: 0.0 }
    }

    /// `c * x^p`
    pub fn monomial(c: f64, p: u32) -> Self {
        Term { x_pow: p, ..Term::constant(c) }
    }

    /// `c * cos(w x + phase)`
    pub fn cos_x(c: f64, w: f64, phase: f64) -> Self {
        Term { x_freq: w, x_phase: phase, ..Term::constant(c) }
    }

    /// `c * cos(w t + phase)`
    pub fn cos_t(c: f64, w: f64, phase: f64) -> Self {
        Term { t_freq: w, t_phase: phase, ..Term::constant(c) }
    }

    #[inline]
    pub fn x_factor(&self, x: f64) -> f64 {
        let p = if self.x_pow == 0 { 1.0 } else { x.powi(self.x_pow as i32) };
        if self.x_freq == 0.0 {
            if self.x_phase == 0.0 {
                p
            } else {
                p * self.x_phase.cos()
            }
        } else {
            p * (self.x_freq * x + self.x_phase).cos()
        }
    }

    #[inline]
    pub fn t_factor(&self, t: f64) -> f64 {
        let p = if self.t_pow == 0 { 1.0 } else { t.powi(self.t_pow as i32) };
        if self.t_freq == 0.0 {
            if self.t_phase == 0.0 {
                p
            } else {
                p * self.t_phase.cos()
            }
        } else {
            p * (self.t_freq * t + self.t_phase).cos()
        }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.coef * self.x_factor(x) * self.t_factor(t)
    }

    fn depends_on_t(&self) -> bool {
        self.t_pow != 0 || self.t_freq != 0.0
    }

    fn depends_on_x(&self) -> bool {
        self.x_pow != 0 || self.x_freq != 0.0
    }

    /// Folds zero-frequency phases into the coefficient and makes frequencies non-negative.
    fn normalized(mut self) -> Self {
        if self.x_freq == 0.0 {
            self.coef *= self.x_phase.cos();
            self.x_phase = 0.0;
        } else if self.x_freq < 0.0 {
            self.x_freq = -self.x_freq;
            self.x_phase = -self.x_phase;
        }
        if self.t_freq == 0.0 {
            self.coef *= self.t_phase.cos();
            self.t_phase = 0.0;
        } else if self.t_freq < 0.0 {
            self.t_freq = -self.t_freq;
            self.t_phase = -self.t_phase;
        }
        self
    }

    fn dx(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        if self.x_pow > 0 {
            out.push(Term { coef: self.coef * self.x_pow as f64, x_pow: self.x_pow - 1, ..self.clone() });
        }
        if self.x_freq != 0.0 {
            out.push(Term { coef: self.coef * self.x_freq, x_phase: self.x_phase + FRAC_PI_2, ..self.clone() });
        }
        out
    }

    fn dt(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        if self.t_pow > 0 {
            out.push(Term { coef: self.coef * self.t_pow as f64, t_pow: self.t_pow - 1, ..self.clone() });
        }
        if self.t_freq != 0.0 {
            out.push(Term { coef: self.coef * self.t_freq, t_phase: self.t_phase + FRAC_PI_2, ..self.clone() });
        }
        out
    }

    fn mul(&self, other: &Term) -> Vec<Term> {
        // cos A cos B = (cos(A-B) + cos(A+B)) / 2, applied per axis
        let xs = split(self.x_freq, self.x_phase, other.x_freq, other.x_phase);
        let ts = split(self.t_freq, self.t_phase, other.t_freq, other.t_phase);
        let mut out = Vec::with_capacity(4);
        for &(wx, px, cx) in &xs {
            for &(wt, pt, ct) in &ts {
                out.push(
                    Term {
                        coef: self.coef * other.coef * cx * ct,
                        x_pow: self.x_pow + other.x_pow,
                        x_freq: wx,
                        x_phase: px,
                        t_pow: self.t_pow + other.t_pow,
                        t_freq: wt,
                        t_phase: pt,
                    }
                    .normalized(),
                );
            }
        }
        out
    }

    /// Crude bound on `|term|` over `[0, xmax] x [0, tmax]`.
    fn sup_abs(&self, xmax: f64, tmax: f64) -> f64 {
        let xp = if self.x_pow == 0 { 1.0 } else { xmax.abs().powi(self.x_pow as i32) };
        let tp = if self.t_pow == 0 { 1.0 } else { tmax.abs().powi(self.t_pow as i32) };
        let xc = if self.x_freq == 0.0 { self.x_phase.cos().abs() } else { 1.0 };
        let tc = if self.t_freq == 0.0 { self.t_phase.cos().abs() } else { 1.0 };
        self.coef.abs() * xp * tp * xc * tc
    }

    fn same_shape(&self, o: &Term) -> bool {
        self.x_pow == o.x_pow
            && self.x_freq == o.x_freq
            && self.x_phase == o.x_phase
            && self.t_pow == o.t_pow
            && self.t_freq == o.t_freq
            && self.t_phase == o.t_phase
    }
}

fn split(w1: f64, p1: f64, w2: f64, p2: f64) -> Vec<(f64, f64, f64)> {
    if w1 == 0.0 && w2 == 0.0 {
        vec![(0.0, 0.0, p1.cos() * p2.cos())]
    } else if w2 == 0.0 {
        vec![(w1, p1, p2.cos())]
    } else if w1 == 0.0 {
        vec![(w2, p2, p1.cos())]
    } else {
        vec![(w1 - w2, p1 - p2, 0.5), (w1 + w2, p1 + p2, 0.5)]
    }
}

fn simplify(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms.into_iter().map(Term::normalized) {
        if t.coef == 0.0 {
            continue;
        }
        match out.iter_mut().find(|o| o.same_shape(&t)) {
            Some(o) => o.coef += t.coef,
            None => out.push(t),
        }
    }
    out.retain(|t| t.coef != 0.0);
    out
}

/// Piecewise sum of separable terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Parametric {
    breaks: Vec<f64>,
    pieces: Vec<Vec<Term>>,
}

impl Parametric {
    pub fn new(terms: Vec<Term>) -> Self {
        Parametric { breaks: Vec::new(), pieces: vec![simplify(terms)] }
    }

    pub fn constant(c: f64) -> Self {
        Parametric::new(vec![Term::constant(c)])
    }

    pub fn zero() -> Self {
        Parametric::new(Vec::new())
    }

    /// `pieces.len()` must be `breaks.len() + 1` and breaks strictly increasing.
    pub fn piecewise(breaks: Vec<f64>, pieces: Vec<Vec<Term>>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::Config(format!(
                "piecewise form has {} breaks but {} pieces",
                breaks.len(),
                pieces.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("piecewise breaks must be finite and strictly increasing".into()));
        }
        Ok(Parametric { breaks, pieces: pieces.into_iter().map(simplify).collect() })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<Term>] {
        &self.pieces
    }

    #[inline]
    pub fn piece_index(&self, x: f64) -> usize {
        self.breaks.partition_point(|b| *b <= x)
    }

    pub fn terms_at(&self, x: f64) -> &[Term] {
        &self.pieces[self.piece_index(x)]
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].iter().map(|term| term.eval(t, x)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_empty())
    }

    pub fn depends_on_t(&self) -> bool {
        self.pieces.iter().flatten().any(Term::depends_on_t)
    }

    pub fn depends_on_x(&self) -> bool {
        !self.breaks.is_empty() && {
            let first = &self.pieces[0];
            self.pieces.iter().any(|p| p != first)
        } || self.pieces.iter().flatten().any(Term::depends_on_x)
    }

    fn map_pieces(&self, f: impl Fn(&Term) -> Vec<Term>) -> Self {
        Parametric {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| simplify(p.iter().flat_map(&f).collect())).collect(),
        }
    }

    pub fn dx(&self) -> Self {
        self.map_pieces(Term::dx)
    }

    pub fn dt(&self) -> Self {
        self.map_pieces(Term::dt)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_pieces(|t| vec![Term { coef: t.coef * c, ..t.clone() }])
    }

    /// Freezes time at `t0`, leaving a function of `x` only.
    pub fn at_time(&self, t0: f64) -> Self {
        self.map_pieces(|t| {
            vec![Term { coef: t.coef * t.t_factor(t0), t_pow: 0, t_freq: 0.0, t_phase: 0.0, ..t.clone() }]
        })
    }

    fn merged_breaks(&self, other: &Parametric) -> Vec<f64> {
        let mut b: Vec<f64> = self.breaks.iter().chain(other.breaks.iter()).copied().collect();
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        b.dedup();
        b
    }

    fn combine(&self, other: &Parametric, f: impl Fn(&[Term], &[Term]) -> Vec<Term>) -> Self {
        let breaks = self.merged_breaks(other);
        let mut pieces = Vec::with_capacity(breaks.len() + 1);
        for j in 0..=breaks.len() {
            let (a, b) = if j == 0 {
                (self.pieces[0].as_slice(), other.pieces[0].as_slice())
            } else {
                (self.terms_at(breaks[j - 1]), other.terms_at(breaks[j - 1]))
            };
            pieces.push(simplify(f(a, b)));
        }
        Parametric { breaks, pieces }
    }

    pub fn add(&self, other: &Parametric) -> Self {
        self.combine(other, |a, b| a.iter().chain(b.iter()).cloned().collect())
    }

    pub fn sub(&self, other: &Parametric) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Parametric) -> Self {
        self.combine(other, |a, b| a.iter().flat_map(|p| b.iter().flat_map(move |q| p.mul(q))).collect())
    }

    /// Certified (crude) bound on `|f|` over `[lo, hi] x [0, tmax]`, piece by piece.
    pub fn sup_abs(&self, lo: f64, hi: f64, tmax: f64) -> f64 {
        self.intervals(lo, hi)
            .map(|(a, b, terms)| {
                let xmax = a.abs().max(b.abs());
                terms.iter().map(|t| t.sup_abs(xmax, tmax)).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// The pieces meeting `[lo, hi]`, clipped to it.
    pub fn intervals(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64, &[Term])> + '_ {
        let start = self.piece_index(lo);
        (start..self.pieces.len()).map_while(move |j| {
            let a = if j == start { lo } else { self.breaks[j - 1] };
            if j > start && a >= hi {
                return None;
            }
            let b = if j < self.breaks.len() { self.breaks[j].min(hi) } else { hi };
            Some((a, b, self.pieces[j].as_slice()))
        })
    }

    /// Exact range over `[lo, hi]` of a time-independent polynomial of degree at most two.
    pub fn quadratic_range(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (a, b, terms) in self.intervals(lo, hi) {
            let mut c = [0.0; 3];
            for t in terms {
                if t.depends_on_t() || t.x_freq != 0.0 || t.x_pow > 2 {
                    return None;
                }
                c[t.x_pow as usize] += t.coef;
            }
            let f = |x: f64| c[0] + x * (c[1] + x * c[2]);
            let mut cand = vec![f(a), f(b)];
            if c[2] != 0.0 {
                let v = -c[1] / (2.0 * c[2]);
                if v > a && v < b {
                    cand.push(f(v));
                }
            }
            for v in cand {
                min = min.min(v);
                max = max.max(v);
            }
        }
        Some((min, max))
    }
}

/// Linear interpolation table over optional `x` and `t` axes (values row-major in `t`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    #[serde(default)]
    pub x: Vec<f64>,
    #[serde(default)]
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl Table {
    fn check(&self) -> Result<()> {
        let nx = self.x.len().max(1);
        let nt = self.t.len().max(1);
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if self.values.len() != nx * nt {
            return Err(Error::Config(format!("table expects {} values, got {}", nx * nt, self.values.len())));
        }
        if !sorted(&self.x) || !sorted(&self.t) {
            return Err(Error::Config("table axes must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let (i0, i1, wx) = bracket(&self.x, x);
        let (j0, j1, wt) = bracket(&self.t, t);
        let nx = self.x.len().max(1);
        let v = |j: usize, i: usize| self.values[j * nx + i];
        let lo = v(j0, i0) * (1.0 - wx) + v(j0, i1) * wx;
        let hi = v(j1, i0) * (1.0 - wx) + v(j1, i1) * wx;
        lo * (1.0 - wt) + hi * wt
    }
}

fn bracket(axis: &[f64], z: f64) -> (usize, usize, f64) {
    match axis.len() {
        0 | 1 => (0, 0, 0.0),
        n => {
            if z <= axis[0] {
                return (0, 0, 0.0);
            }
            if z >= axis[n - 1] {
                return (n - 1, n - 1, 0.0);
            }
            let i = axis.partition_point(|a| *a <= z) - 1;
            let w = (z - axis[i]) / (axis[i + 1] - axis[i]);
            (i, i + 1, w)
        }
    }
}

/// Serialized shape of a coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormConfig {
    Constant(ConstantParams),
    TrigPoly(TermsParams),
    Piecewise(PiecewiseParams),
    Tabulated(Table),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermsParams {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseParams {
    pub breaks: Vec<f64>,
    pub pieces: Vec<TermsParams>,
}

/// A coefficient of the problem.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientForm {
    Parametric(Parametric),
    Tabulated(Table),
}

impl CoefficientForm {
    pub fn constant(c: f64) -> Self {
        CoefficientForm::Parametric(Parametric::constant(c))
    }

    pub fn terms(terms: Vec<Term>) -> Self {
        CoefficientForm::Parametric(Parametric::new(terms))
    }

    pub fn from_config(cfg: &FormConfig) -> Result<Self> {
        Ok(match cfg {
            FormConfig::Constant(p) => CoefficientForm::constant(p.value),
            FormConfig::TrigPoly(p) => CoefficientForm::terms(p.terms.clone()),
            FormConfig::Piecewise(p) => CoefficientForm::Parametric(Parametric::piecewise(
                p.breaks.clone(),
                p.pieces.iter().map(|q| q.terms.clone()).collect(),
            )?),
            FormConfig::Tabulated(t) => {
                t.check()?;
                CoefficientForm::Tabulated(t.clone())
            }
        })
    }

    pub fn to_config(&self) -> FormConfig {
        match self {
            CoefficientForm::Tabulated(t) => FormConfig::Tabulated(t.clone()),
            CoefficientForm::Parametric(p) if p.breaks.is_empty() && !p.depends_on_t() && !p.depends_on_x() => {
                FormConfig::Constant(ConstantParams { value: p.eval(0.0, 0.0) + 0.0 })
            }
            CoefficientForm::Parametric(p) if p.breaks.is_empty() => {
                FormConfig::TrigPoly(TermsParams { terms: p.pieces[0].clone() })
            }
            CoefficientForm::Parametric(p) => FormConfig::Piecewise(PiecewiseParams {
                breaks: p.breaks.clone(),
                pieces: p.pieces.iter().map(|q| TermsParams { terms: q.clone() }).collect(),
            }),
        }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            CoefficientForm::Parametric(p) => p.eval(t, x),
            CoefficientForm::Tabulated(tab) => tab.eval(t, x),
        }
    }

    pub fn has_derivatives(&self) -> bool {
        matches!(self, CoefficientForm::Parametric(_))
    }

    /// The parametric representation, or `DerivativeUnavailable` naming the coefficient.
    pub fn parametric(&self, name: &'static str) -> Result<&Parametric> {
        match self {
            CoefficientForm::Parametric(p) => Ok(p),
            CoefficientForm::Tabulated(_) => Err(Error::DerivativeUnavailable(name)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientForm::Parametric(p) => p.is_zero(),
            CoefficientForm::Tabulated(t) => t.values.iter().all(|v| *v == 0.0),
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            CoefficientForm::Parametric(p) => p.depends_on_t(),
            CoefficientForm::Tabulated(t) => t.t.len() > 1,
        }
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            CoefficientForm::Parametric(p) => p.depends_on_x(),
            CoefficientForm::Tabulated(t) => t.x.len() > 1,
        }
    }

    /// Breakpoints of the representation (table nodes count as kinks).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            CoefficientForm::Parametric(p) => p.breaks.clone(),
            CoefficientForm::Tabulated(t) => t.x.clone(),
        }
    }
}

/// Row-wise evaluation of one piece on a tensor grid, with the trigonometric
/// factors computed once per axis.
pub(crate) struct RowEval {
    coefs: Vec<f64>,
    xf: Vec<Vec<f64>>,
    tf: Vec<Vec<f64>>,
}

impl RowEval {
    pub fn new(terms: &[Term], ts: &[f64], xs: &[f64]) -> Self {
        RowEval {
            coefs: terms.iter().map(|t| t.coef).collect(),
            xf: terms.iter().map(|t| xs.iter().map(|&x| t.x_factor(x)).collect()).collect(),
            tf: terms.iter().map(|t| ts.iter().map(|&s| t.t_factor(s)).collect()).collect(),
        }
    }

    pub fn row(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, c) in self.coefs.iter().enumerate() {
            let w = c * self.tf[k][j];
            if w == 0.0 {
                continue;
            }
            for (o, f) in out.iter_mut().zip(&self.xf[k]) {
                *o += w * f;
            }
        }
    }
}
