//! When is the constrained supremum attained? Checks `λ_min(F − cΦ*[F]) ≥ 0`.
//!
//! `cargo run --example attainment`

use qcap::capacity::{attainment_check, ConstraintSpec};
use qcap::channel::{amplitude_damping, gaussian_classical_noise, identity, GaussianNoiseSpec};
use qcap::error::Result;
use qcap::observable::ConstraintObservable;

fn main() -> Result<()> {
    let qubit = ConstraintSpec::new(ConstraintObservable::from_real_diagonal(&[0.0, 1.0])?, 0.3)?;
    for (name, ch, c) in [
        ("identity", identity(2)?, qubit.clone()),
        ("amplitude damping(0.5)", amplitude_damping(0.5)?, qubit),
        (
            "gaussian N=1, cutoff 10",
            gaussian_classical_noise(&GaussianNoiseSpec::new(1.0, 10))?,
            ConstraintSpec::new(ConstraintObservable::number_operator(10)?, 0.5)?,
        ),
    ] {
        let a = attainment_check(&ch, &c)?;
        println!(
            "{name:<26} gap {:.3}  λ_min at c=1 {:+.3e}  max c {}  {}",
            a.spectral_gap,
            a.min_eig_at_unit_scale,
            a.max_scale
                .map_or("unbounded".to_string(), |c| format!("{c:.4}")),
            a.status
        );
    }
    Ok(())
}
