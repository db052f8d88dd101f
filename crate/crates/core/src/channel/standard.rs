//! Textbook channels used as fixtures and in the examples.

use serde::{Deserialize, Serialize};

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{real, ComplexMatrix, C64, ZERO};
use crate::state::DensityMatrix;

/// Named channel families. Qubit families have dimension 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StandardChannel {
    Identity {
        dim: usize,
    },
    Dephasing {
        p: f64,
    },
    Depolarizing {
        p: f64,
        dim: usize,
    },
    /// Every input is replaced by the diagonal state `probabilities`.
    Replacement {
        probabilities: Vec<f64>,
        dim_in: usize,
    },
    AmplitudeDamping {
        gamma: f64,
    },
}

pub fn build_standard(kind: &StandardChannel) -> Result<KrausChannel> {
    match kind {
        StandardChannel::Identity { dim } => identity(*dim),
        StandardChannel::Dephasing { p } => dephasing(*p),
        StandardChannel::Depolarizing { p, dim } => depolarizing(*p, *dim),
        StandardChannel::Replacement {
            probabilities,
            dim_in,
        } => replacement(&DensityMatrix::from_diagonal(probabilities)?, *dim_in),
        StandardChannel::AmplitudeDamping { gamma } => amplitude_damping(*gamma),
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name,
            value: p,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            value: 0.0,
            reason: "must be positive",
        });
    }
    Ok(())
}

pub fn identity(dim: usize) -> Result<KrausChannel> {
    check_dim(dim)?;
    KrausChannel::new(vec![ComplexMatrix::identity(dim)])
}

/// Single-Kraus channel `S ↦ U S U†`.
pub fn unitary(u: ComplexMatrix) -> Result<KrausChannel> {
    KrausChannel::new(vec![u])
}

/// Qubit dephasing `{√(1−p) I, √p Z}`.
pub fn dephasing(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    let mut kraus = vec![ComplexMatrix::identity(2).scale((1.0 - p).sqrt())];
    if p > 0.0 {
        kraus.push(z.scale(p.sqrt()));
    }
    KrausChannel::new(kraus)
}

/// `S ↦ (1−p) S + p I/d`, realized with the `d²` Weyl operators `X^a Z^b`.
pub fn depolarizing(p: f64, dim: usize) -> Result<KrausChannel> {
    check_probability("p", p)?;
    check_dim(dim)?;
    let d = dim as f64;
    let n = dim * dim;
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d);
    let mut kraus = Vec::with_capacity(n);
    for a in 0..dim {
        for b in 0..dim {
            let w = if a == 0 && b == 0 {
                1.0 - p + p / (n as f64)
            } else {
                p / (n as f64)
            };
            if w <= 0.0 {
                continue;
            }
            let s = w.sqrt();
            // (X^a Z^b)_{ij} = δ_{i, j+a} ω^{b j}
            kraus.push(ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == (j + a) % dim {
                    omega((b * j) % dim) * s
                } else {
                    ZERO
                }
            }));
        }
    }
    KrausChannel::new(kraus)
}

/// `S ↦ Tr(S) S₀` on inputs of dimension `dim_in`.
pub fn replacement(s0: &DensityMatrix, dim_in: usize) -> Result<KrausChannel> {
    check_dim(dim_in)?;
    let spec = s0.spectrum()?;
    let lambdas: Vec<f64> = spec.eigenvalues().iter().map(|x| x.max(0.0)).collect();
    let total: f64 = lambdas.iter().sum();
    let dout = s0.dim();
    let mut kraus = Vec::new();
    for (j, &l) in lambdas.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let e = spec.eigenvector(j);
        let w = (l / total).sqrt();
        for i in 0..dim_in {
            kraus.push(ComplexMatrix::from_fn(dout, dim_in, |r, c| {
                if c == i {
                    e[r] * w
                } else {
                    ZERO
                }
            }));
        }
    }
    KrausChannel::new(kraus)
}

/// Qubit amplitude damping `{diag(1, √(1−γ)), √γ |0⟩⟨1|}`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability("gamma", gamma)?;
    let a0 = ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - gamma).sqrt()]);
    let mut kraus = vec![a0];
    if gamma > 0.0 {
        kraus.push(ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                real(gamma.sqrt())
            } else {
                ZERO
            }
        }));
    }
    KrausChannel::new(kraus)
}
