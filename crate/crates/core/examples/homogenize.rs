//! Removes inhomogeneous Neumann data with a quadratic lift and checks the round trip.

use ngb::forms::{CoefficientForm, Term};
use ngb::pde_oracle::{self, FdConfig};
use ngb::problem::{self, ProblemSpec};

fn main() -> ngb::Result<()> {
    let spec = ProblemSpec::new(
        1.0,
        1.0,
        1.0,
        [
            CoefficientForm::constant(0.2),
            CoefficientForm::constant(1.0),
            CoefficientForm::constant(0.0),
            CoefficientForm::terms(vec![Term::monomial(0.5, 1), Term::monomial(0.25, 2)]),
            CoefficientForm::constant(0.5),
            CoefficientForm::constant(1.0),
        ],
        vec![],
    )?;
    problem::validate(&spec)?.into_result()?;
    let homog = problem::homogenize(&spec)?;
    let lift = problem::boundary_lift(&spec)?;
    println!("{}", homog.to_json());
    let cfg = FdConfig { cells: 100, steps: 100, theta: 0.5 };
    let direct = pde_oracle::solve(&spec, 1.0, cfg.cells, cfg.steps, cfg.theta)?;
    let shifted = pde_oracle::solve(&homog, 1.0, cfg.cells, cfg.steps, cfg.theta)?;
    let last = cfg.steps;
    let worst = direct
        .xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (direct.values[last][i] - (shifted.values[last][i] - lift.eval(1.0, x))).abs())
        .fold(0.0, f64::max);
    println!("max |V - (V' - lift)| at t=1: {worst:.3e}");
    Ok(())
}
