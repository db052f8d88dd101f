//! Heuristic constrained Holevo quantity next to the certified C_ea.
//!
//! `cargo run --example holevo_cost_constrained`

use qcap::capacity::{maximize_chi, maximize_mutual_info, ConstraintSpec, SolverOptions};
use qcap::channel::{amplitude_damping, dephasing};
use qcap::entropy::binary_entropy;
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

fn main() -> Result<()> {
    let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0])?;
    let opts = SolverOptions::default();

    // full dephasing leaves a classical bit; the best code is (0.7, 0.3) on the basis
    let c = ConstraintSpec::new(f.clone(), 0.3)?;
    let r = maximize_chi(&dephasing(0.5)?, &c, 2, &opts)?;
    println!(
        "classical bit, E=0.3: χ = {:.8}, h(0.3) = {:.8}",
        r.value,
        binary_entropy(0.3)
    );
    if let Some(ens) = r.optimizer.ensemble() {
        println!("  probabilities {:?}", ens.probabilities());
    }

    let ch = amplitude_damping(0.3)?;
    println!("\namplitude damping γ=0.3, ensembles of 3");
    println!("{:>6} {:>10} {:>10} {:>8}", "E", "χ", "C_ea", "ratio");
    for e in [0.1, 0.3, 0.5] {
        let c = ConstraintSpec::new(f.clone(), e)?;
        let chi = maximize_chi(&ch, &c, 3, &opts)?;
        let cea = maximize_mutual_info(&ch, &c, &opts)?;
        println!(
            "{e:>6} {:>10.6} {:>10.6} {:>8.4}",
            chi.value,
            cea.value,
            cea.value / chi.value
        );
    }
    Ok(())
}
