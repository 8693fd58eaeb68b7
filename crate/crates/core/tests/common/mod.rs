//! Random problem instances shared by the property tests.

use std::f64::consts::PI;

use ngb::forms::{CoefficientForm, Term};
use ngb::problem::ProblemSpec;
use proptest::prelude::*;

pub fn term(coef: f64, x_pow: u32, x_freq: f64, x_phase: f64, t_freq: f64) -> Term {
    Term { coef, x_pow, x_freq, x_phase, t_pow: 0, t_freq, t_phase: 0.0 }
}

#[derive(Clone, Debug)]
pub struct Draw {
    pub b: [f64; 4],
    pub a: [f64; 2],
    pub h: [f64; 2],
    pub g: [f64; 2],
    pub sigma: f64,
    pub zeta: f64,
}

pub fn draw() -> impl Strategy<Value = Draw> {
    (
        prop::array::uniform4(-1.5f64..1.5),
        (-0.4f64..0.4, -0.3f64..0.3),
        prop::array::uniform2(-1.0f64..1.0),
        prop::array::uniform2(-1.0f64..1.0),
        0.4f64..2.0,
        0.5f64..2.0,
    )
        .prop_map(|(b, (a0, a1), h, g, sigma, zeta)| Draw { b, a: [a0, a1], h, g, sigma, zeta })
}

pub fn build(d: &Draw) -> ProblemSpec {
    let w = PI / d.zeta;
    let b = CoefficientForm::terms(vec![
        term(d.b[0], 0, 0.0, 0.0, 1.3),
        term(d.b[1], 1, 0.0, 0.0, 0.0),
        term(d.b[2], 2, 0.0, 0.0, 0.0),
        term(d.b[3], 0, w, 0.0, 2.0),
    ]);
    let a = CoefficientForm::terms(vec![term(1.0, 0, 0.0, 0.0, 0.0), term(d.a[0], 0, w, 0.3, 0.0), term(d.a[1] / d.zeta, 1, 0.0, 0.0, 0.0)]);
    let h = CoefficientForm::terms(vec![term(d.h[0], 0, 2.0 * w, 0.0, 1.0), term(d.h[1], 1, 0.0, 0.0, 0.0)]);
    let g = CoefficientForm::terms(vec![term(d.g[0], 0, w, 0.0, 0.0), term(d.g[1], 0, 2.0 * w, 0.0, 0.0)]);
    ProblemSpec::new(
        d.zeta,
        d.sigma,
        1.0,
        [b, a, h, g, CoefficientForm::constant(0.0), CoefficientForm::constant(0.0)],
        vec![],
    )
    .unwrap()
}
