//! Entanglement-assisted capacity of a qubit channel under a cost constraint.
//!
//! `cargo run --example ea_capacity_qubit`

use qcap::capacity::{maximize_mutual_info, ConstraintSpec, SolverOptions};
use qcap::channel::{amplitude_damping, identity};
use qcap::entropy::binary_entropy;
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

fn main() -> Result<()> {
    let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0])?;
    let opts = SolverOptions::default();

    let r = maximize_mutual_info(&identity(2)?, &ConstraintSpec::new(f.clone(), 0.3)?, &opts)?;
    println!(
        "identity, E=0.3: C_ea = {:.8} (2 h(0.3) = {:.8}), gap {:.1e}, {} iterations",
        r.value,
        2.0 * binary_entropy(0.3),
        r.duality_gap.unwrap_or(f64::NAN),
        r.iterations
    );

    println!("\namplitude damping γ=0.3");
    println!("{:>6} {:>12} {:>10} {:>10}", "E", "C_ea", "gap", "slack");
    let ch = amplitude_damping(0.3)?;
    for e in [0.05, 0.1, 0.2, 0.3, 0.5, 0.8] {
        let r = maximize_mutual_info(&ch, &ConstraintSpec::new(f.clone(), e)?, &opts)?;
        println!(
            "{e:>6} {:>12.8} {:>10.1e} {:>10.1e}",
            r.value,
            r.duality_gap.unwrap_or(f64::NAN),
            r.constraint_slack
        );
    }
    Ok(())
}
