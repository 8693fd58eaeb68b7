//! Finite-difference solution compared with its Feynman-Kac Monte Carlo estimate.

use ngb::instances;
use ngb::pde_oracle::{self, FdConfig};

fn main() -> ngb::Result<()> {
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        let (t, x) = (0.5, 0.3);
        let c = pde_oracle::feynman_kac_check(&spec, t, x, FdConfig::default(), 20_000, t / 1000.0, 7)?;
        println!(
            "{name}: V_FD={:.6} (+-{:.1e})  MC={:.6} (se {:.1e})  {}",
            c.fd_value,
            c.fd_error,
            c.mc.value,
            c.mc.stderr,
            if c.passed { "agree" } else { "disagree" }
        );
    }
    Ok(())
}
