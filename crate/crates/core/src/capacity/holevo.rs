//! Heuristic search for constrained ensembles with large Holevo quantity.
//!
//! The ensemble has `m` pure members. Each sweep alternates a constrained
//! Blahut–Arimoto update of the probabilities,
//! `π_i ← π_i exp(D(Φ[S_i] ‖ Φ[S̄]) − μ f_i) / Z` with `μ` bisected so the
//! average energy stays at or below `E`, and a projected gradient step on
//! each member state with the multiplier held fixed. `χ` is not concave in
//! the states, so several seeded restarts run in parallel and the best one
//! is kept. The result is a lower bound with no certificate.

use rayon::prelude::*;

use crate::channel::KrausChannel;
use crate::entropy::{entropy, holevo_chi, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{vdot, vec_norm, ComplexMatrix, C64};
use crate::observable::ConstraintObservable;
use crate::random::{random_pure, seeded};
use crate::state::DensityMatrix;

use super::{
    CapacityResult, ConstraintSpec, Optimizer, SolverDiagnostics, SolverOptions, LOG_FLOOR,
};

pub fn maximize_chi(
    ch: &KrausChannel,
    c: &ConstraintSpec,
    m: usize,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    opts.validate()?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            value: 0.0,
            reason: "ensemble size must be positive",
        });
    }
    if ch.dim_in() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: c.dim(),
        });
    }
    let f = c.observable();
    let ground: Vec<C64> = f.spectrum().eigenvector(0);
    if m == 1 {
        let s = DensityMatrix::from_matrix_trusted(ComplexMatrix::outer(&ground));
        let slack = c.slack(&s)?;
        return Ok(CapacityResult {
            value: 0.0,
            optimizer: Optimizer::Ensemble(Ensemble::from_parts_trusted(vec![1.0], vec![s])),
            duality_gap: None,
            iterations: 0,
            constraint_slack: slack,
            certified: false,
            heuristic: true,
            diagnostics: SolverDiagnostics {
                notes: vec!["a single-member ensemble carries no information".into()],
                ..SolverDiagnostics::default()
            },
        });
    }

    // On the ground eigenspace the constraint is automatically met.
    let (work, embed, problem_f) = if c.tight_ground() {
        let v = f.ground_space();
        (ch.restrict_input(&v)?, Some(v), None)
    } else {
        (ch.clone(), None, Some(f))
    };
    let dim = work.dim_in();
    let basis: Vec<Vec<C64>> = match (&embed, problem_f) {
        (None, Some(f)) => (0..dim).map(|k| f.spectrum().eigenvector(k)).collect(),
        _ => (0..dim)
            .map(|k| crate::state::unit_vector(dim, k))
            .collect(),
    };
    let problem = Problem {
        ch: &work,
        f: problem_f,
        energy: c.energy(),
        mu_tol: opts.mu_bisect_tol,
        max_iters: opts.max_iters,
    };

    let runs: Vec<Result<Restart>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| problem.run(m, &basis, opts.seed.wrapping_add(r as u64), r == 0))
        .collect();
    let runs: Vec<Restart> = runs.into_iter().collect::<Result<_>>()?;

    // deterministic merge: best value, ties go to the earlier seed
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let restart_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let top = restart_values[best];
    let non_improving = restart_values
        .iter()
        .filter(|&&v| v < top - opts.gap_tol)
        .count();
    let winner = runs.into_iter().nth(best).expect("nonempty restarts");
    let states: Vec<DensityMatrix> = winner
        .states
        .iter()
        .map(|psi| {
            let v = match &embed {
                Some(v) => v.mat_vec(psi),
                None => psi.clone(),
            };
            DensityMatrix::from_matrix_trusted(ComplexMatrix::outer(&v))
        })
        .collect();
    let ensemble = Ensemble::from_parts_trusted(winner.probabilities, states);
    let value = holevo_chi(&ensemble, ch)?;
    let slack = c.slack(&ensemble.average())?;
    Ok(CapacityResult {
        value,
        optimizer: Optimizer::Ensemble(ensemble),
        duality_gap: None,
        iterations: winner.iterations,
        constraint_slack: slack,
        certified: false,
        heuristic: true,
        diagnostics: SolverDiagnostics {
            tight_ground: embed.is_some(),
            restart_values,
            non_improving_restarts: non_improving,
            ..SolverDiagnostics::default()
        },
    })
}

const PROGRESS_WINDOW: usize = 25;
const PROGRESS_TOL: f64 = 1e-6;

struct Problem<'a> {
    ch: &'a KrausChannel,
    f: Option<&'a ConstraintObservable>,
    energy: f64,
    mu_tol: f64,
    max_iters: usize,
}

struct Restart {
    value: f64,
    probabilities: Vec<f64>,
    states: Vec<Vec<C64>>,
    iterations: usize,
}

/// Member `i`: pure input, its output, and derived scalars.
struct Member {
    psi: Vec<C64>,
    out: DensityMatrix,
    h_out: f64,
    f: f64,
}

fn log_psd(s: &DensityMatrix) -> Result<ComplexMatrix> {
    Ok(s.spectrum()?.map(|x| x.max(LOG_FLOOR).ln()))
}

impl Problem<'_> {
    fn member(&self, psi: Vec<C64>) -> Result<Member> {
        let s = DensityMatrix::from_matrix_trusted(ComplexMatrix::outer(&psi));
        let out = self.ch.apply(&s)?;
        let h_out = entropy(&out)?;
        let f = self
            .f
            .map_or(0.0, |f| vdot(&psi, &f.matrix().mat_vec(&psi)).re);
        Ok(Member { psi, out, h_out, f })
    }

    fn average(&self, pi: &[f64], members: &[Member]) -> DensityMatrix {
        let d = self.ch.dim_out();
        let m = pi
            .iter()
            .zip(members)
            .fold(ComplexMatrix::zeros(d, d), |acc, (p, mem)| {
                &acc + &mem.out.matrix().scale(*p)
            });
        DensityMatrix::from_matrix_trusted(m)
    }

    fn chi(&self, pi: &[f64], members: &[Member], avg: &DensityMatrix) -> Result<f64> {
        let cond: f64 = pi.iter().zip(members).map(|(p, m)| p * m.h_out).sum();
        Ok(entropy(avg)? - cond)
    }

    /// Blahut–Arimoto reweighting with the smallest feasible multiplier.
    fn reweight(&self, pi: &[f64], members: &[Member]) -> Result<(Vec<f64>, f64)> {
        let avg = self.average(pi, members);
        let log_avg = log_psd(&avg)?;
        let div: Vec<f64> = members
            .iter()
            .map(|m| -m.h_out - m.out.matrix().trace_product(&log_avg).re)
            .collect();
        let weights = |mu: f64| -> Vec<f64> {
            let expo: Vec<f64> = pi
                .iter()
                .zip(&div)
                .zip(members)
                .map(|((p, d), m)| {
                    if *p > 0.0 {
                        d - mu * m.f
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = pi
                .iter()
                .zip(&expo)
                .map(|(p, e)| p * (e - top).exp())
                .collect();
            let z: f64 = w.iter().sum();
            w.iter().map(|x| x / z).collect()
        };
        let energy = |w: &[f64]| -> f64 { w.iter().zip(members).map(|(p, m)| p * m.f).sum() };
        let w0 = weights(0.0);
        if self.f.is_none() || energy(&w0) <= self.energy {
            return Ok((w0, 0.0));
        }
        let mut hi = 1.0;
        let mut w_hi = weights(hi);
        let mut n = 0;
        while energy(&w_hi) > self.energy {
            n += 1;
            if n > 200 {
                return Err(Error::Bracketing(format!(
                    "ensemble reweighting cannot reach E = {}",
                    self.energy
                )));
            }
            hi *= 2.0;
            w_hi = weights(hi);
        }
        let mut lo = 0.0;
        for _ in 0..300 {
            if hi - lo <= self.mu_tol * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let w = weights(mid);
            if energy(&w) > self.energy {
                lo = mid;
            } else {
                hi = mid;
                w_hi = w;
            }
        }
        Ok((w_hi, hi))
    }

    fn run(&self, m: usize, basis: &[Vec<C64>], seed: u64, structured: bool) -> Result<Restart> {
        let mut rng = seeded(seed);
        let dim = self.ch.dim_in();
        let mut members = Vec::with_capacity(m);
        for i in 0..m {
            let psi = if i == 0 || (structured && i < dim) {
                basis[i % dim].clone()
            } else {
                random_pure(&mut rng, dim)
            };
            members.push(self.member(psi)?);
        }
        let mut pi = vec![1.0 / m as f64; m];
        let mut steps = vec![1.0_f64; m];
        let mut history: Vec<f64> = Vec::new();
        let mut iterations = 0;
        for _ in 0..self.max_iters {
            iterations += 1;
            self.ensure_feasible(&mut members, basis)?;
            let (new_pi, mu) = self.reweight(&pi, &members)?;
            pi = new_pi;
            for i in 0..m {
                if pi[i] <= 0.0 {
                    continue;
                }
                self.improve_member(i, &pi, &mut members, mu, &mut steps[i])?;
            }
            let avg = self.average(&pi, &members);
            let chi = self.chi(&pi, &members, &avg)?;
            // ascent is slow but steady; stop once a window adds little
            history.push(chi);
            if history.len() > PROGRESS_WINDOW {
                let split = history.len() - PROGRESS_WINDOW;
                let before = history[..split].iter().cloned().fold(f64::MIN, f64::max);
                let recent = history[split..].iter().cloned().fold(f64::MIN, f64::max);
                if recent - before <= PROGRESS_TOL * before.abs() {
                    break;
                }
            }
        }
        self.ensure_feasible(&mut members, basis)?;
        let (pi, _) = self.reweight(&pi, &members)?;
        let avg = self.average(&pi, &members);
        let value = self.chi(&pi, &members, &avg)?;
        Ok(Restart {
            value,
            probabilities: pi,
            states: members.into_iter().map(|m| m.psi).collect(),
            iterations,
        })
    }

    /// At least one member must lie below `E`; otherwise reset the cheapest
    /// one to the ground state.
    fn ensure_feasible(&self, members: &mut [Member], basis: &[Vec<C64>]) -> Result<()> {
        if self.f.is_none() {
            return Ok(());
        }
        let (k, fmin) = members
            .iter()
            .enumerate()
            .map(|(k, m)| (k, m.f))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if fmin >= self.energy {
            members[k] = self.member(basis[0].clone())?;
        }
        Ok(())
    }

    /// Backtracking ascent on `χ − μ Σ π f` over member `i` on the unit sphere.
    fn improve_member(
        &self,
        i: usize,
        pi: &[f64],
        members: &mut [Member],
        mu: f64,
        step: &mut f64,
    ) -> Result<()> {
        let avg = self.average(pi, members);
        let objective = |avg: &DensityMatrix, members: &[Member]| -> Result<f64> {
            let e: f64 = pi.iter().zip(members).map(|(p, m)| p * m.f).sum();
            Ok(self.chi(pi, members, avg)? - mu * e)
        };
        let base = objective(&avg, members)?;
        let log_diff = &log_psd(&members[i].out)? - &log_psd(&avg)?;
        let mut g = self.ch.dual_apply_matrix(&log_diff)?;
        if let Some(f) = self.f {
            g = &g - &f.matrix().scale(mu);
        }
        let g = g.hermitian_part();
        let psi = members[i].psi.clone();
        let gpsi = g.mat_vec(&psi);
        let mean = vdot(&psi, &gpsi);
        let dir: Vec<C64> = gpsi.iter().zip(&psi).map(|(a, b)| a - b * mean).collect();
        let norm = vec_norm(&dir);
        if norm < 1e-14 {
            return Ok(());
        }
        let scale = 1.0 / g.max_abs().max(1e-12);
        let mut eta = *step;
        for _ in 0..12 {
            let trial: Vec<C64> = psi
                .iter()
                .zip(&dir)
                .map(|(a, d)| a + d * (eta * scale))
                .collect();
            let n = vec_norm(&trial);
            let trial: Vec<C64> = trial.iter().map(|z| z / n).collect();
            let cand = self.member(trial)?;
            let old = std::mem::replace(&mut members[i], cand);
            let avg_new = self.average(pi, members);
            if objective(&avg_new, members)? > base {
                *step = (eta * 1.5).min(4.0);
                return Ok(());
            }
            members[i] = old;
            eta *= 0.5;
        }
        *step = eta.max(1e-6);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, identity};
    use crate::entropy::binary_entropy;

    fn spec(diag: &[f64], e: f64) -> ConstraintSpec {
        ConstraintSpec::new(ConstraintObservable::from_real_diagonal(diag).unwrap(), e).unwrap()
    }

    #[test]
    fn noiseless_bit_with_cost() {
        let r = maximize_chi(
            &dephasing(0.0).unwrap(),
            &spec(&[0.0, 1.0], 0.3),
            2,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((r.value - binary_entropy(0.3)).abs() < 1e-4, "{}", r.value);
        assert!(r.heuristic && r.duality_gap.is_none());
        assert!(r.constraint_slack >= -1e-8);
    }

    #[test]
    fn identity_reaches_log_dimension() {
        let r = maximize_chi(
            &identity(3).unwrap(),
            &spec(&[0.0, 1.0, 2.0], 5.0),
            3,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((r.value - 3f64.ln()).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn single_member_carries_nothing() {
        let r = maximize_chi(
            &identity(2).unwrap(),
            &spec(&[0.0, 1.0], 0.5),
            1,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }
}
