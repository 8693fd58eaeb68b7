//! Gronwall control and non-collapse of nearby reflected paths driven by common noise.

use ngb::{instances, sde_oracle};

fn main() -> ngb::Result<()> {
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        let r = sde_oracle::flow_collapse_check(&spec, 1.0, 0.5, 1e-4, 2_000, 1e-3, 5)?;
        println!(
            "{name}: {:.4} of {} pairs pass, rate {:.3}, min separation {:.3e}, {} pairs touched the boundary",
            r.passing_fraction, r.pairs, r.gronwall_rate, r.min_separation, r.hit_pairs
        );
    }
    Ok(())
}
