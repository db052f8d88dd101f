//! The entanglement-assisted gain C_ea / χ grows as the photon budget shrinks.
//!
//! `cargo run --release --example low_photon_gain`

use qcap::capacity::{maximize_chi, maximize_mutual_info, ConstraintSpec, SolverOptions};
use qcap::channel::{gaussian_classical_noise, GaussianNoiseSpec};
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

const CUTOFF: usize = 12;
const NOISE: f64 = 1.0;

fn main() -> Result<()> {
    let ch = gaussian_classical_noise(&GaussianNoiseSpec::new(NOISE, CUTOFF))?;
    let f = ConstraintObservable::number_operator(CUTOFF)?;
    let opts = SolverOptions::default();
    let chi_opts = SolverOptions {
        restarts: 4,
        ..SolverOptions::default()
    };
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>8}",
        "E", "C_ea", "-E lnE/(N+1)", "χ (lower)", "gain"
    );
    for e in [1e-3, 1e-2, 1e-1] {
        let c = ConstraintSpec::new(f.clone(), e)?;
        let cea = maximize_mutual_info(&ch, &c, &opts)?.value;
        let chi = maximize_chi(&ch, &c, 2, &chi_opts)?.value;
        println!(
            "{e:>8} {cea:>12.6e} {:>12.6e} {chi:>12.6e} {:>8.3}",
            -e * e.ln() / (NOISE + 1.0),
            cea / chi
        );
    }
    // χ is a lower bound, so the gain column over-estimates the true ratio
    Ok(())
}
