//! Long-time verdict for the bound, with and without a source term.

use ngb::{gradient_bound, instances, problem};

fn main() -> ngb::Result<()> {
    let mut hc = problem::extract_constants(&instances::heat(), 1.0)?;
    for c_h in [0.0, 1.0] {
        hc.c_h = c_h;
        let v = gradient_bound::asymptotic_bounded(&hc)?;
        println!("c_h={c_h}: bounded={} margins {:.12} {:.12}", v.bounded, v.margin_q0, v.margin_q1);
        println!("  {}", v.condition);
    }
    hc.c_d = 10.0;
    let v = gradient_bound::asymptotic_bounded(&hc)?;
    println!("c_D=10: bounded={} margin {:.6}", v.bounded, v.margin_q0);
    Ok(())
}
