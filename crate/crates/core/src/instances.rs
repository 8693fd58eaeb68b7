//! Ready-made problems used by the examples, the tests and the command line.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::forms::{CoefficientForm, Term};
use crate::problem::ProblemSpec;

/// `V_t = V_xx / 2` on `[0, 1]`, `g = cos(pi x)`, zero slopes.
/// Exact solution `exp(-pi^2 t / 2) cos(pi x)`.
pub fn heat() -> ProblemSpec {
    ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        [
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(1.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::terms(vec![Term::cos_x(1.0, PI, 0.0)]),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
        ],
        vec![],
    )
    .expect("heat instance is well formed")
}

pub fn heat_exact(t: f64, x: f64) -> f64 {
    (-PI * PI * t / 2.0).exp() * (PI * x).cos()
}

pub fn heat_exact_dx(t: f64, x: f64) -> f64 {
    -PI * (-PI * PI * t / 2.0).exp() * (PI * x).sin()
}

/// `a = 1 + x(1-x)/2`, `b = 0.3 cos t`, `h = sin(pi x)`, `g = 0` on `[0, 1]`.
pub fn variable() -> ProblemSpec {
    ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        [
            CoefficientForm::terms(vec![Term::cos_t(0.3, 1.0, 0.0)]),
            CoefficientForm::terms(vec![Term::constant(1.0), Term::monomial(0.5, 1), Term::monomial(-0.5, 2)]),
            CoefficientForm::terms(vec![Term::cos_x(1.0, PI, -FRAC_PI_2)]),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
        ],
        vec![],
    )
    .expect("variable instance is well formed")
}

/// Reflected Brownian motion with constant drift: `b = mu`, `a = 1`, `g = h = 0`.
pub fn constant_drift(mu: f64, sigma: f64, zeta: f64) -> ProblemSpec {
    ProblemSpec::new(
        zeta,
        sigma,
        1.0,
        [
            CoefficientForm::constant(mu),
            CoefficientForm::constant(1.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::constant(0.0),
        ],
        vec![],
    )
    .expect("constant drift instance is well formed")
}
