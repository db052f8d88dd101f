//! Constrained classical and entanglement-assisted capacities of quantum
//! channels given by Kraus operators, including Fock truncations of the
//! bosonic classical-noise channel.
//!
//! The entanglement-assisted capacity under an energy constraint
//! `Tr S F ≤ E` is a concave program; [`capacity::maximize_mutual_info`]
//! solves it with a certified duality gap. The constrained Holevo quantity
//! is not concave and [`capacity::maximize_chi`] only returns a lower bound.
//! All information quantities are in nats.
//!
//! ```
//! use qcap::capacity::{maximize_mutual_info, ConstraintSpec, SolverOptions};
//! use qcap::channel::amplitude_damping;
//! use qcap::observable::ConstraintObservable;
//!
//! let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0]).unwrap();
//! let c = ConstraintSpec::new(f, 0.2).unwrap();
//! let r = maximize_mutual_info(&amplitude_damping(0.3).unwrap(), &c, &SolverOptions::default())
//!     .unwrap();
//! assert!(r.certified && r.constraint_slack >= -1e-8);
//! ```
//!
//! The `examples/` directory walks through each part:
//!
//! | example | shows |
//! |---|---|
//! | `density_basics` | states, purification, relative entropy |
//! | `channel_zoo` | standard channels, composition, Kraus reduction |
//! | `entropy_identities` | mutual information two ways, Gibbs bound |
//! | `ea_capacity_qubit` | certified constrained C_ea |
//! | `holevo_cost_constrained` | heuristic χ next to C_ea |
//! | `two_copy_additivity` | `Ī₂ = 2Ī₁` |
//! | `gaussian_channel` | the truncated classical-noise channel |
//! | `truncation_sweep` | convergence in the Fock cutoff |
//! | `low_photon_gain` | `C_ea / χ` at small photon numbers |
//! | `attainment` | when the constrained supremum is attained |
//!
//! The `qcap` binary wraps the same calls for JSON problem files; see
//! [`cli`].

// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod observable;
pub mod random;
pub mod state;
