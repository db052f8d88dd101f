//! The standard channel families and the operations on Kraus channels.
//!
//! `cargo run --example channel_zoo`

use qcap::channel::{amplitude_damping, dephasing, depolarizing, identity, KrausChannel};
use qcap::entropy::{entropy, entropy_exchange};
use qcap::error::Result;
use qcap::state::DensityMatrix;

fn main() -> Result<()> {
    let plus = DensityMatrix::from_diagonal(&[0.5, 0.5])?;
    let zoo: Vec<(&str, KrausChannel)> = vec![
        ("identity", identity(2)?),
        ("dephasing(0.3)", dephasing(0.3)?),
        ("depolarizing(0.5)", depolarizing(0.5, 2)?),
        ("amplitude damping(0.4)", amplitude_damping(0.4)?),
    ];
    println!(
        "{:<24} {:>6} {:>10} {:>10}",
        "channel", "kraus", "H(out)", "H(env)"
    );
    for (name, ch) in &zoo {
        println!(
            "{name:<24} {:>6} {:>10.6} {:>10.6}",
            ch.n_kraus(),
            entropy(&ch.apply(&plus)?)?,
            entropy_exchange(&plus, ch)?
        );
    }

    // composition and tensor products stay trace preserving
    let both = amplitude_damping(0.4)?.compose(&dephasing(0.3)?)?;
    let pair = dephasing(0.3)?.tensor(&depolarizing(0.5, 2)?)?;
    println!(
        "composed: {} operators, TP defect {:.1e}",
        both.n_kraus(),
        both.tp_defect()
    );
    println!(
        "tensor: {}x{} -> {} operators, reduced to {}",
        pair.dim_in(),
        pair.dim_out(),
        pair.n_kraus(),
        pair.reduce_kraus_rank()?.n_kraus()
    );
    Ok(())
}
