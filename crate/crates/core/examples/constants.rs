//! Extracts the hypothesis constants of the bundled instances.

use ngb::{instances, problem};

fn main() -> ngb::Result<()> {
    for (name, spec) in [("heat", instances::heat()), ("variable", instances::variable())] {
        problem::validate(&spec)?.into_result()?;
        let hc = problem::extract_constants(&spec, 1.0)?;
        println!("{name}:");
        println!("  c_a in [{:.6}, {:.6}]", hc.c_a_d, hc.c_a_u);
        println!("  c_lip {:.6}  c_D {:.6}  c_h {:.6}  c_g {:.6}", hc.c_lip, hc.c_d, hc.c_h, hc.c_g);
        println!("  b/a^2 in [{:.6}, {:.6}]", hc.mu_l, hc.mu_u);
    }
    Ok(())
}
