//! C_ea of the Gaussian channel converging as the Fock cutoff grows.
//!
//! `cargo run --example truncation_sweep`

use qcap::capacity::{truncation_sweep, ConstraintSpec, SolverOptions};
use qcap::channel::{gaussian_classical_noise, GaussianNoiseSpec};
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

fn main() -> Result<()> {
    let energy = 0.5;
    let sweep = truncation_sweep(
        |d| {
            let ch = gaussian_classical_noise(&GaussianNoiseSpec::new(1.0, d))?;
            let c = ConstraintSpec::new(ConstraintObservable::number_operator(d)?, energy)?;
            Ok((ch, c))
        },
        &[6, 10, 14, 20],
        &SolverOptions::default(),
    )?;
    println!(
        "{:>7} {:>14} {:>10} {:>10}",
        "cutoff", "C_ea", "gap", "certified"
    );
    for p in &sweep.points {
        println!(
            "{:>7} {:>14.10} {:>10.1e} {:>10}",
            p.cutoff, p.value, p.duality_gap, p.certified
        );
    }
    println!(
        "nondecreasing: {}, increments shrink: {}, last increment {:.1e}",
        sweep.nondecreasing, sweep.increments_shrink, sweep.last_increment
    );
    Ok(())
}
