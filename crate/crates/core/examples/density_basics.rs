//! States, spectra, purification and partial traces.
//!
//! `cargo run --example density_basics`

use qcap::entropy::{entropy, relative_entropy};
use qcap::error::Result;
use qcap::random::{random_density, seeded};
use qcap::state::{partial_trace, purify, DensityMatrix, Subsystem};

fn main() -> Result<()> {
    let mut rng = seeded(1);
    let s = random_density(&mut rng, 3, 2);
    println!("rank-2 qutrit state, eigenvalues {:?}", s.eigenvalues()?);
    println!("H(S) = {:.6} nats (ln 3 = {:.6})", entropy(&s)?, 3f64.ln());

    // the purification lives on C^3 ⊗ C^3; tracing out the copy gives S back
    let psi = purify(&s)?;
    let back = partial_trace(&psi.density(), (3, 3), Subsystem::A)?;
    println!(
        "purification recovers S to {:.1e}",
        back.trace_norm_distance(&s)?
    );

    let mixed = DensityMatrix::maximally_mixed(3);
    println!(
        "D(S || I/3) = {:.6} = ln 3 - H(S) = {:.6}",
        relative_entropy(&s, &mixed)?.to_f64(),
        3f64.ln() - entropy(&s)?
    );

    // support mismatch makes the divergence infinite
    let pure = DensityMatrix::basis(3, 0);
    println!("D(S || |0><0|) = {:?}", relative_entropy(&s, &pure)?);
    Ok(())
}
