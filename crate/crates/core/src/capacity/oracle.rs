//! Feasible region `{S ⪰ 0, Tr S = 1, Tr SF ≤ E}` and its linear oracle.

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, Spectrum, C64};
use crate::observable::{max_entropy_state, ConstraintObservable};
use crate::state::{DensityMatrix, HermitianOperator};

use super::ConstraintSpec;

/// Maximizer of `Tr GX` over the feasible region.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub state: DensityMatrix,
    /// `Tr G X`.
    pub value: f64,
    /// Lagrangian dual bound `min_μ λ_max(G − μF) + μE` at the final
    /// multiplier; never below the true maximum.
    pub upper_bound: f64,
    /// Multiplier of the energy constraint.
    pub mu: f64,
    /// `upper_bound − value`.
    pub residual: f64,
}

/// Maximizes `Tr GX` over density matrices with `Tr XF ≤ E`.
pub fn linear_oracle(g: &HermitianOperator, c: &ConstraintSpec) -> Result<OracleSolution> {
    Region::constrained(c, super::SolverOptions::default().mu_bisect_tol).oracle(g.matrix())
}

/// A feasible region, possibly without an energy constraint.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Region<'a> {
    pub f: Option<&'a ConstraintObservable>,
    pub energy: f64,
    pub mu_tol: f64,
}

struct Top {
    lambda: f64,
    vector: Vec<C64>,
    f: f64,
}

impl<'a> Region<'a> {
    pub fn constrained(c: &'a ConstraintSpec, mu_tol: f64) -> Self {
        Self {
            f: Some(c.observable()),
            energy: c.energy(),
            mu_tol,
        }
    }

    pub fn unconstrained(mu_tol: f64) -> Self {
        Self {
            f: None,
            energy: f64::INFINITY,
            mu_tol,
        }
    }

    /// Active observable, or `None` when every state is feasible.
    fn active(&self) -> Option<&'a ConstraintObservable> {
        self.f.filter(|f| self.energy < f.max_eigenvalue())
    }

    /// Maximum-entropy feasible state; full rank whenever `E > f_min`.
    pub fn safe_state(&self, dim: usize) -> Result<DensityMatrix> {
        match self.active() {
            Some(f) if self.energy < f.mean_eigenvalue() => max_entropy_state(f, self.energy),
            _ => Ok(DensityMatrix::maximally_mixed(dim)),
        }
    }

    #[cfg(test)]
    pub fn energy_of(&self, s: &DensityMatrix) -> f64 {
        self.f.map_or(0.0, |f| f.operator().expectation(s))
    }

    fn top(&self, g: &ComplexMatrix, mu: f64) -> Result<(Top, Spectrum)> {
        let m = match self.active() {
            Some(f) if mu != 0.0 => g - &f.matrix().scale(mu),
            _ => g.clone(),
        };
        let spec = eigh(&m.hermitian_part())?;
        let k = spec.dim() - 1;
        let vector = spec.eigenvector(k);
        let f = self.active().map_or(0.0, |f| {
            crate::linalg::vdot(&vector, &f.matrix().mat_vec(&vector)).re
        });
        Ok((
            Top {
                lambda: spec.max(),
                vector,
                f,
            },
            spec,
        ))
    }

    pub fn oracle(&self, g: &ComplexMatrix) -> Result<OracleSolution> {
        let (t0, spec0) = self.top(g, 0.0)?;
        let f = match self.active() {
            Some(f) if t0.f > self.energy => f,
            _ => {
                return Ok(OracleSolution {
                    state: DensityMatrix::from_matrix_trusted(ComplexMatrix::outer(&t0.vector)),
                    value: t0.lambda,
                    upper_bound: t0.lambda,
                    mu: 0.0,
                    residual: 0.0,
                })
            }
        };
        let fmin = f.min_eigenvalue();
        if self.energy - fmin <= 1e-12 * fmin.abs().max(1.0) {
            return self.ground_oracle(g, f);
        }
        // any top eigenvector of G − μF has ⟨F⟩ ≤ f_min + spread(G)/μ
        let spread = spec0.max() - spec0.min();
        let mut hi = (spread / (self.energy - fmin) * (1.0 + 1e-9)).max(self.mu_tol);
        let mut t_hi = self.top(g, hi)?.0;
        let mut doublings = 0;
        while t_hi.f > self.energy {
            doublings += 1;
            if doublings > 200 {
                return Err(Error::Bracketing(format!(
                    "no multiplier in [0, {hi:e}] meets E = {}",
                    self.energy
                )));
            }
            hi *= 2.0;
            t_hi = self.top(g, hi)?.0;
        }
        let mut lo = 0.0;
        let mut t_lo = t0;
        for _ in 0..300 {
            if hi - lo <= self.mu_tol * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let t = self.top(g, mid)?.0;
            if t.f > self.energy {
                lo = mid;
                t_lo = t;
            } else {
                hi = mid;
                t_hi = t;
            }
        }
        let w = if t_lo.f > t_hi.f {
            ((self.energy - t_hi.f) / (t_lo.f - t_hi.f)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let x = &ComplexMatrix::outer(&t_lo.vector).scale(w)
            + &ComplexMatrix::outer(&t_hi.vector).scale(1.0 - w);
        let value = g.trace_product(&x).re;
        // weak duality at both ends of the final bracket
        let dual_hi = t_hi.lambda + hi * self.energy;
        let dual_lo = t_lo.lambda + lo * self.energy;
        let upper_bound = dual_hi.min(dual_lo).max(value);
        Ok(OracleSolution {
            state: DensityMatrix::from_matrix_trusted(x),
            value,
            upper_bound,
            mu: hi,
            residual: upper_bound - value,
        })
    }

    /// `E = f_min`: the maximizer lives on the ground eigenspace.
    fn ground_oracle(&self, g: &ComplexMatrix, f: &ConstraintObservable) -> Result<OracleSolution> {
        let v = f.ground_space();
        let gg = v.adjoint().matmul(g).matmul(&v);
        let spec = eigh(&gg.hermitian_part())?;
        let w = spec.eigenvector(spec.dim() - 1);
        let x = ComplexMatrix::outer(&v.mat_vec(&w));
        Ok(OracleSolution {
            state: DensityMatrix::from_matrix_trusted(x),
            value: spec.max(),
            upper_bound: spec.max(),
            mu: f64::INFINITY,
            residual: 0.0,
        })
    }

    /// `exp(K − μF) / Tr exp(K − μF)` with the smallest `μ ≥ 0` that keeps
    /// the energy at or below `E`.
    pub fn project_exp(&self, k: &ComplexMatrix) -> Result<(DensityMatrix, f64)> {
        let state_at = |mu: f64| -> Result<DensityMatrix> {
            let m = match self.active() {
                Some(f) if mu != 0.0 => k - &f.matrix().scale(mu),
                _ => k.clone(),
            };
            let spec = eigh(&m.hermitian_part())?;
            let top = spec.max();
            let w = spec.map_eigenvalues(|x| (x - top).exp());
            let z: f64 = w.eigenvalues().iter().sum();
            Ok(DensityMatrix::from_spectrum_trusted(
                w.map_eigenvalues(|x| x / z),
            ))
        };
        let s0 = state_at(0.0)?;
        let Some(f) = self.active() else {
            return Ok((s0, 0.0));
        };
        let energy = |s: &DensityMatrix| f.operator().expectation(s);
        if energy(&s0) <= self.energy {
            return Ok((s0, 0.0));
        }
        let mut hi = 1.0;
        let mut s_hi = state_at(hi)?;
        let mut n = 0;
        while energy(&s_hi) > self.energy {
            n += 1;
            if n > 200 {
                return Err(Error::Bracketing(format!(
                    "Gibbs tilt up to {hi:e} does not reach E = {}",
                    self.energy
                )));
            }
            hi *= 2.0;
            s_hi = state_at(hi)?;
        }
        let mut lo = 0.0;
        for _ in 0..300 {
            if hi - lo <= self.mu_tol * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let s = state_at(mid)?;
            if energy(&s) > self.energy {
                lo = mid;
            } else {
                hi = mid;
                s_hi = s;
            }
        }
        Ok((s_hi, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_observable_matrix, seeded};
    use rand::Rng;

    fn spec(diag: &[f64], e: f64) -> ConstraintSpec {
        ConstraintSpec::new(ConstraintObservable::from_real_diagonal(diag).unwrap(), e).unwrap()
    }

    #[test]
    fn unconstrained_optimum_when_feasible() {
        let g = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let sol = linear_oracle(&g, &spec(&[0.0, 1.0], 0.5)).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!((sol.state.matrix().get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_mixture() {
        let g = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let sol = linear_oracle(&g, &spec(&[0.0, 1.0], 0.3)).unwrap();
        assert!((sol.value - 0.3).abs() < 1e-9);
        let want = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        assert!(sol.state.trace_norm_distance(&want).unwrap() < 1e-8);
        assert!(sol.residual <= 1e-8);
    }

    // The Lagrange dual min_μ λmax(G − μF) + μE equals the primal optimum
    // (Slater holds for E > f_min). It is convex in μ, so a ternary search
    // finds it independently of the bisection inside the oracle.
    fn dual_search(g: &ComplexMatrix, f: &ComplexMatrix, e: f64, mu_max: f64) -> f64 {
        let dual = |mu: f64| {
            let ev = crate::linalg::eigvalsh(&(g - &f.scale(mu)).hermitian_part()).unwrap();
            ev[ev.len() - 1] + mu * e
        };
        let (mut a, mut b) = (0.0, mu_max);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if dual(m1) <= dual(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        dual(0.5 * (a + b))
    }

    #[test]
    fn random_instances_match_dual_grid() {
        let mut rng = seeded(21);
        for _ in 0..3 {
            let d = 6;
            let spectrum: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..3.0)).collect();
            let f =
                ConstraintObservable::from_matrix(random_observable_matrix(&mut rng, &spectrum))
                    .unwrap();
            let e = f.min_eigenvalue() + 0.3 * (f.mean_eigenvalue() - f.min_eigenvalue());
            let c = ConstraintSpec::new(f.clone(), e).unwrap();
            let g = random_hermitian(&mut rng, d);
            let sol = linear_oracle(&g, &c).unwrap();
            let slack = e - f.operator().expectation(&sol.state);
            assert!(slack.abs() < 1e-9 || sol.mu == 0.0);
            let spread = {
                let ev = crate::linalg::eigvalsh(g.matrix()).unwrap();
                ev[d - 1] - ev[0]
            };
            let grid = dual_search(
                g.matrix(),
                f.matrix(),
                e,
                1.5 * spread / (e - f.min_eigenvalue()),
            );
            assert!(sol.value <= grid + 1e-9);
            assert!((sol.value - grid).abs() < 1e-6, "{} vs {grid}", sol.value);
        }
    }

    #[test]
    fn exp_projection_meets_the_energy() {
        let c = spec(&[0.0, 1.0, 2.0], 0.2);
        let r = Region::constrained(&c, 1e-12);
        let (s, mu) = r.project_exp(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(mu > 0.0);
        assert!((r.energy_of(&s) - 0.2).abs() < 1e-9);
        assert!(r.energy_of(&s) <= 0.2);
    }
}
