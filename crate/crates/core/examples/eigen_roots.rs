//! Eigenvalues of the killed/reflected drifted Brownian motion across the three regimes.

use ngb::spectral::{self, Direction, EigenSystem};

fn main() -> ngb::Result<()> {
    for mu in [0.0, 0.5, 1.0, 3.0] {
        let mut es = EigenSystem::branch(Direction::Down, mu, 1.0, 1.0)?;
        es.extend(5)?;
        println!("mu={mu}: regime {:?}, ratio {:.3}", es.regime, es.ratio);
        for (i, lam) in es.lambdas.iter().enumerate() {
            println!("  lambda_{} = {lam:.12}", i + 1);
        }
    }
    let r = spectral::solve_alpha_down(2, 4.0)?;
    println!("tan a = 4a, second root {:.15} residual {:.2e}", r.value(), r.tan() - 4.0 * r.value());
    let v = spectral::solve_v(3.0, 1.0, 1.0)?;
    println!("hyperbolic root residual {:.2e}", spectral::residual_v(&v, 3.0, 1.0, 1.0));
    Ok(())
}
