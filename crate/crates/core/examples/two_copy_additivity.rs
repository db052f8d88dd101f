//! Two uses of a channel carry exactly twice the constrained C_ea.
//!
//! `cargo run --example two_copy_additivity`

use qcap::capacity::{two_copy_check, ConstraintSpec, SolverOptions};
use qcap::channel::{amplitude_damping, depolarizing};
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

fn main() -> Result<()> {
    let c = ConstraintSpec::new(ConstraintObservable::from_real_diagonal(&[0.0, 1.0])?, 0.25)?;
    let opts = SolverOptions::default();
    for (name, ch) in [
        ("amplitude damping(0.2)", amplitude_damping(0.2)?),
        ("depolarizing(0.4)", depolarizing(0.4, 2)?),
    ] {
        let r = two_copy_check(&ch, &c, &opts)?;
        println!("{name}");
        println!("  one copy        {:.10}", r.single.value);
        println!("  two copies      {:.10}", r.double.value);
        println!("  product input   {:.10}", r.product_witness);
        println!(
            "  difference      {:.1e} (tolerance {:.1e}, {})",
            r.difference,
            r.tolerance,
            if r.passed { "additive" } else { "NOT additive" }
        );
    }
    Ok(())
}
