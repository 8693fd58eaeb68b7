//! Hitting-time survival series with its certified truncation tail.

use ngb::spectral::{self, HittingProblem};

fn main() -> ngb::Result<()> {
    for (mu, x, y) in [(0.0, 1.0, 0.0), (1.0, 0.5, 0.0), (-1.0, 0.5, 1.0)] {
        let hp = HittingProblem::new(mu, 1.0, 1.0, x, y)?;
        println!("mu={mu} x={x} y={y}");
        for s in [0.05, 0.25, 0.5, 1.0, 2.0] {
            let r = spectral::survival(&hp, s, 1e-12)?;
            println!("  s={s:<5} P={:.10} tail {:.1e} terms {}", r.value, r.tail_bound, r.terms_used);
        }
    }
    Ok(())
}
