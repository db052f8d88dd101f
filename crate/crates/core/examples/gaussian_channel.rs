//! The Fock-truncated classical-noise channel and its thermal fixed points.
//!
//! `cargo run --example gaussian_channel`

use qcap::channel::{build_gaussian, thermal_entropy, thermal_state, GaussianNoiseSpec};
use qcap::entropy::entropy;
use qcap::error::Result;

fn main() -> Result<()> {
    let spec = GaussianNoiseSpec::new(1.0, 30).with_buffer(8);
    let built = build_gaussian(&spec)?;
    println!(
        "cutoff {}, {} Kraus operators, raw completeness defect {:.1e}",
        spec.cutoff,
        built.channel.n_kraus(),
        built.raw_defect
    );

    // thermal in, thermal out with N added photons
    println!("{:>6} {:>12} {:>12}", "mean", "H(out)", "g(mean+N)");
    for mean in [0.1, 0.5, 1.0] {
        let out = built.channel.apply(&thermal_state(mean, spec.cutoff)?)?;
        println!(
            "{mean:>6} {:>12.6} {:>12.6}",
            entropy(&out)?,
            thermal_entropy(mean + spec.noise_photons)
        );
    }
    Ok(())
}
