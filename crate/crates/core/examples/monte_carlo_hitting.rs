//! Empirical boundary survival of the reflected diffusion against the series bounds.

use ngb::sde_oracle::{self, LevelSet, Reflection, SimOptions};
use ngb::spectral::{self, HittingProblem};
use ngb::{instances, problem};

fn main() -> ngb::Result<()> {
    let spec = instances::variable();
    let (t, x) = (1.0, 0.5);
    let hc = problem::extract_constants(&spec, t)?;
    let opts = SimOptions { reflection: Reflection::Mirror, stop_on: Some(LevelSet::Boundary), ..Default::default() };
    let ens = sde_oracle::simulate_with(&spec, t, x, 20_000, 1e-3, 1, opts)?;
    let up = HittingProblem::new(hc.mu_u, hc.sigma, hc.zeta, x, 0.0)?;
    let low = HittingProblem::new(hc.mu_l, hc.sigma, hc.zeta, x, hc.zeta)?;
    let scale = hc.c_a_d * hc.c_a_d;
    let grid: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    println!("{:>5} {:>20} {:>10} {:>10}", "s", "empirical [95% CI]", "to 0", "to zeta");
    for p in sde_oracle::hitting_survival_empirical(&ens, LevelSet::Boundary, &grid) {
        let b0 = spectral::survival(&up, scale * p.s, 1e-12)?.value;
        let b1 = spectral::survival(&low, scale * p.s, 1e-12)?.value;
        println!("{:>5.2} {:.4} [{:.4}, {:.4}] {b0:>10.4} {b1:>10.4}", p.s, p.survival, p.lower, p.upper);
    }
    Ok(())
}
