//! Mutual information two ways, and the Gibbs entropy bound.
//!
//! `cargo run --example entropy_identities`

use qcap::entropy::{
    entropy, entropy_upper_bound, free_energy_residual, mutual_information_via_relent,
    MutualInformationParts,
};
use qcap::error::Result;
use qcap::observable::{gibbs_state, ConstraintObservable};
use qcap::random::{random_channel, random_density, seeded};

fn main() -> Result<()> {
    let mut rng = seeded(7);
    let ch = random_channel(&mut rng, 3, 2, 3);
    let s = random_density(&mut rng, 3, 3);

    let parts = MutualInformationParts::compute(&s, &ch)?;
    println!(
        "H(S) + H(Φ[S]) - H(S, Φ) = {:.6} + {:.6} - {:.6} = {:.10}",
        parts.input_entropy,
        parts.output_entropy,
        parts.entropy_exchange,
        parts.value()
    );
    println!(
        "relative entropy of the purified output:  {:.10}",
        mutual_information_via_relent(&s, &ch)?.to_f64()
    );

    let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0, 2.5])?;
    for beta in [0.2, 1.0, 3.0] {
        let e = f.gibbs_mean(beta);
        let g = gibbs_state(&f, beta)?;
        println!(
            "β={beta}: E={e:.4} H(Gibbs)={:.6} bound={:.6} H(S)={:.6} residual={:.1e}",
            entropy(&g)?,
            entropy_upper_bound(&f, beta, e),
            entropy(&s)?,
            free_energy_residual(&s, &f, beta)?.to_f64()
        );
    }
    Ok(())
}
