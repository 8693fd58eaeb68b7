//! Pathwise ordering under ordered initial points and ordered drifts.

use ngb::forms::{CoefficientForm, Parametric};
use ngb::{instances, sde_oracle};

fn main() -> ngb::Result<()> {
    let spec = instances::variable();
    let r = sde_oracle::initial_comparison_check(&spec, 1.0, 0.6, 0.4, 2_000, 1e-3, 3)?;
    println!("initial: ordered {:.4}, worst {:.2e}, strict {}/{}", r.ordered_fraction, r.worst_violation, r.strict, r.checked);
    let mut plus = spec.clone();
    plus.b = CoefficientForm::Parametric(spec.b.parametric("b")?.add(&Parametric::constant(1.0)));
    let r = sde_oracle::drift_comparison_check(&spec, &plus, 1.0, 0.5, 2_000, 1e-3, 4)?;
    println!("drift +1: ordered {:.4}, worst {:.2e}, strict {}/{}", r.ordered_fraction, r.worst_violation, r.strict, r.checked);
    Ok(())
}
