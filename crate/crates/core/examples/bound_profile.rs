//! Gradient bound profile of the heat instance against the exact gradient.

use ngb::gradient_bound::{GradientBound, DEFAULT_TOL};
use ngb::spectral::Truncation;
use ngb::{instances, problem};

fn main() -> ngb::Result<()> {
    let t = 1.0;
    let hc = problem::extract_constants(&instances::heat(), t)?;
    let mut gb = GradientBound::new(&hc)?;
    let profile = gb.profile(t, Truncation::Tolerance(DEFAULT_TOL))?;
    println!("{:>5} {:>12} {:>12} {:>6}", "x", "bound", "|V_x|", "side");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let r = profile.at(x)?;
        println!("{x:>5.2} {:>12.6} {:>12.6} {:>6?}", r.value, instances::heat_exact_dx(t, x).abs(), r.branch);
    }
    Ok(())
}
