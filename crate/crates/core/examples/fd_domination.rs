//! Checks the bound against finite-difference gradients with a Richardson error estimate.

use ngb::gradient_bound::DEFAULT_TOL;
use ngb::pde_oracle::{self, FdConfig};
use ngb::{instances, problem};

fn main() -> ngb::Result<()> {
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        let hc = problem::extract_constants(&spec, 1.0)?;
        let r = pde_oracle::verify_domination(&spec, &hc, 1.0, FdConfig { cells: 100, steps: 100, theta: 0.5 }, DEFAULT_TOL)?;
        let w = &r.worst;
        println!(
            "{name}: {} nodes, {} violations, worst margin {:.3e} at t={:.3} x={:.3} (|V_x|={:.4}, bound {:.4})",
            r.nodes,
            r.violations.len(),
            w.margin,
            w.t,
            w.x,
            w.gradient.abs(),
            w.bound
        );
    }
    Ok(())
}
