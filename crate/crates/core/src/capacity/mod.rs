//! Constrained capacity solvers.
//!
//! * [`maximize_mutual_info`] computes the entanglement-assisted capacity
//!   `C_ea = max { I(S,Φ) : Tr SF ≤ E }` with a duality-gap certificate.
//! * [`maximize_chi`] searches for good constrained input ensembles and
//!   returns a lower bound on the one-shot Holevo capacity. It is a
//!   multi-start heuristic with no optimality certificate.
//! * [`two_copy_check`], [`truncation_sweep`] and [`attainment_check`] are
//!   harnesses built on top of the solvers.

mod harness;
mod holevo;
mod mutual;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::entropy::Ensemble;
use crate::error::{Error, Result};
use crate::observable::{expected_value, ConstraintObservable};
use crate::state::DensityMatrix;

/// Eigenvalues are clipped here before taking logarithms in the solvers.
/// Smaller eigenvalues of a dense eigensolve are round-off, and flooring
/// every logarithm of a gradient at the same level keeps their large terms
/// cancelling.
pub(crate) const LOG_FLOOR: f64 = 1e-13;

pub use harness::{
    attainment_check, truncation_sweep, two_copy_check, AttainmentDiagnostics, SweepPoint,
    TruncationSweep, TwoCopyReport,
};
pub use holevo::maximize_chi;
pub use mutual::{directional_derivatives, maximize_mutual_info, mutual_info_gradient, Gradient};
pub use oracle::{linear_oracle, OracleSolution};

/// Input constraint `Tr SF ≤ E`.
#[derive(Clone, Debug)]
pub struct ConstraintSpec {
    f: ConstraintObservable,
    energy: f64,
}

impl ConstraintSpec {
    /// Fails with [`Error::Infeasible`] when `E` is below the smallest
    /// eigenvalue of `F`.
    pub fn new(f: ConstraintObservable, energy: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::InvalidParameter {
                name: "E",
                value: energy,
                reason: "must be finite",
            });
        }
        let fmin = f.min_eigenvalue();
        if energy < fmin - Self::ground_tol(fmin) {
            return Err(Error::Infeasible {
                energy,
                min_eigenvalue: fmin,
            });
        }
        Ok(Self { f, energy })
    }

    fn ground_tol(fmin: f64) -> f64 {
        1e-12 * fmin.abs().max(1.0)
    }

    pub fn observable(&self) -> &ConstraintObservable {
        &self.f
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `E` equals the smallest eigenvalue of `F`, so every feasible state is
    /// supported in the ground eigenspace.
    pub fn tight_ground(&self) -> bool {
        let fmin = self.f.min_eigenvalue();
        self.energy <= fmin + Self::ground_tol(fmin)
    }

    /// `E ≥ f_max`: every state is feasible.
    pub fn inactive(&self) -> bool {
        self.energy >= self.f.max_eigenvalue()
    }

    /// `E − Tr SF`.
    pub fn slack(&self, s: &DensityMatrix) -> Result<f64> {
        Ok(self.energy - expected_value(s, &self.f)?)
    }

    /// Same observable, different energy.
    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        Self::new(self.f.clone(), energy)
    }
}

fn default_max_iters() -> usize {
    2000
}
fn default_gap_tol() -> f64 {
    1e-6
}
fn default_mu_tol() -> f64 {
    1e-10
}
fn default_restarts() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Target duality gap, nats.
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_mu_tol")]
    pub mu_bisect_tol: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: default_max_iters(),
            gap_tol: default_gap_tol(),
            mu_bisect_tol: default_mu_tol(),
            restarts: default_restarts(),
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64| {
            Err(Error::InvalidParameter {
                name,
                value,
                reason: "must be positive",
            })
        };
        if self.max_iters == 0 {
            return bad("max_iters", 0.0);
        }
        if !(self.gap_tol > 0.0) {
            return bad("gap_tol", self.gap_tol);
        }
        if !(self.mu_bisect_tol > 0.0) {
            return bad("mu_bisect_tol", self.mu_bisect_tol);
        }
        if self.restarts == 0 {
            return bad("restarts", 0.0);
        }
        Ok(())
    }
}

/// The maximizer found by a solver.
#[derive(Clone, Debug)]
pub enum Optimizer {
    State(DensityMatrix),
    Ensemble(Ensemble),
}

impl Optimizer {
    pub fn state(&self) -> Option<&DensityMatrix> {
        match self {
            Optimizer::State(s) => Some(s),
            Optimizer::Ensemble(_) => None,
        }
    }

    pub fn ensemble(&self) -> Option<&Ensemble> {
        match self {
            Optimizer::Ensemble(e) => Some(e),
            Optimizer::State(_) => None,
        }
    }

    /// The state itself, or the ensemble average.
    pub fn average_state(&self) -> DensityMatrix {
        match self {
            Optimizer::State(s) => s.clone(),
            Optimizer::Ensemble(e) => e.average(),
        }
    }
}

/// Solver bookkeeping that does not affect the value.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolverDiagnostics {
    /// The problem was solved on the ground eigenspace of `F`.
    pub tight_ground: bool,
    /// Iterations that took a mirror (multiplicative) step.
    pub mirror_steps: usize,
    /// Iterations that took a Frank–Wolfe step.
    pub frank_wolfe_steps: usize,
    /// Residual of the final linear-oracle solve.
    pub oracle_residual: f64,
    /// Best value of each restart, in seed order (ensemble solver only).
    pub restart_values: Vec<f64>,
    /// Restarts that ended below the best value by more than `gap_tol`.
    pub non_improving_restarts: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    /// Objective value in nats.
    pub value: f64,
    pub optimizer: Optimizer,
    /// Certified upper bound on `optimum − value`; `None` for heuristics.
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    /// `E − Tr S F` for the optimizer (ensemble average for χ).
    pub constraint_slack: f64,
    /// Gap reached `gap_tol`.
    pub certified: bool,
    /// Lower bound only, with no certificate.
    pub heuristic: bool,
    pub diagnostics: SolverDiagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_classification() {
        let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            ConstraintSpec::new(f.clone(), -0.1),
            Err(Error::Infeasible { .. })
        ));
        assert!(ConstraintSpec::new(f.clone(), 0.0).unwrap().tight_ground());
        let c = ConstraintSpec::new(f.clone(), 0.5).unwrap();
        assert!(!c.tight_ground() && !c.inactive());
        assert!(ConstraintSpec::new(f, 2.0).unwrap().inactive());
    }

    #[test]
    fn options_validate() {
        assert!(SolverOptions::default().validate().is_ok());
        let o = SolverOptions {
            gap_tol: 0.0,
            ..SolverOptions::default()
        };
        assert!(o.validate().is_err());
    }
}
