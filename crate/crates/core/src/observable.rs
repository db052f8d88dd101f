//! Positive constraint observables `F`, their Gibbs states, and `Tr SF`.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Spectrum};
use crate::state::{hermitian_eig, DensityMatrix, HermitianOperator};

/// Minimum spread between the largest and smallest eigenvalue of `F`.
pub const MIN_SPECTRAL_GAP: f64 = 1e-12;

/// Tolerance for grouping eigenvalues into one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-10;

const BETA_LO: f64 = 1e-12;
const BETA_HI: f64 = 1e6;
const BETA_MAX_ITERS: usize = 200;

/// A positive, nonconstant Hermitian operator with its cached spectrum.
#[derive(Clone, Debug)]
pub struct ConstraintObservable {
    operator: HermitianOperator,
    spectrum: Spectrum,
}

impl ConstraintObservable {
    pub fn new(operator: HermitianOperator) -> Result<Self> {
        let spectrum = hermitian_eig(&operator)?;
        let min = spectrum.min();
        if min < -DEGENERACY_TOL {
            return Err(Error::NotPositive(min));
        }
        let spread = spectrum.max() - min;
        if spread <= MIN_SPECTRAL_GAP {
            return Err(Error::ConstantObservable(spread));
        }
        Ok(Self { operator, spectrum })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// `diag(0, 1, …, d−1)`: the photon-number operator truncated to `d` levels.
    pub fn number_operator(d: usize) -> Result<Self> {
        let diag: Vec<f64> = (0..d).map(|n| n as f64).collect();
        Self::new(HermitianOperator::from_real_diagonal(&diag))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum.max()
    }

    /// Expectation in the maximally mixed state (the `β → 0` limit).
    pub fn mean_eigenvalue(&self) -> f64 {
        let ev = self.spectrum.eigenvalues();
        ev.iter().sum::<f64>() / ev.len() as f64
    }

    /// Smallest gap between distinct eigenvalues.
    pub fn spectral_gap(&self) -> f64 {
        let groups = self.eigenspaces();
        groups
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Distinct eigenvalues with multiplicities, ascending.
    pub fn eigenspaces(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &x in self.spectrum.eigenvalues() {
            match out.last_mut() {
                Some((v, m)) if (x - *v).abs() <= DEGENERACY_TOL => *m += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// Orthonormal basis (columns) of the eigenspace of the smallest eigenvalue.
    pub fn ground_space(&self) -> ComplexMatrix {
        let mult = self.eigenspaces()[0].1;
        let v = self.spectrum.eigenvectors();
        ComplexMatrix::from_fn(self.dim(), mult, |i, j| v.get(i, j))
    }

    /// `log Tr exp(−βF)`, evaluated stably.
    pub fn log_partition(&self, beta: f64) -> f64 {
        let fmin = self.min_eigenvalue();
        let s: f64 = self
            .spectrum
            .eigenvalues()
            .iter()
            .map(|&f| (-beta * (f - fmin)).exp())
            .sum();
        -beta * fmin + s.ln()
    }

    /// `Tr S_β F` without forming `S_β`.
    pub fn gibbs_mean(&self, beta: f64) -> f64 {
        let fmin = self.min_eigenvalue();
        let (mut num, mut den) = (0.0, 0.0);
        for &f in self.spectrum.eigenvalues() {
            let w = (-beta * (f - fmin)).exp();
            num += w * f;
            den += w;
        }
        num / den
    }
}

/// `S_β = exp(−βF) / Tr exp(−βF)`, built in the eigenbasis of `F`.
pub fn gibbs_state(f: &ConstraintObservable, beta: f64) -> Result<DensityMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must be finite and > 0",
        });
    }
    let fmin = f.min_eigenvalue();
    let spread = f.max_eigenvalue() - fmin;
    // the state must stay full rank in floating point
    if (-beta * spread).exp() < f64::MIN_POSITIVE {
        return Err(Error::GibbsUnderflow { beta });
    }
    let z: f64 = f
        .spectrum()
        .eigenvalues()
        .iter()
        .map(|&x| (-beta * (x - fmin)).exp())
        .sum();
    let m = f.spectrum().map(|x| (-beta * (x - fmin)).exp() / z);
    Ok(DensityMatrix::from_matrix_trusted(m))
}

/// How [`solve_beta`] resolved the target energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaRegime {
    /// `f_min < E < mean`: finite positive β found by bisection.
    Interior,
    /// `E ≤ f_min`: the constraint pins the state to the ground space; β = +∞.
    GroundSpace,
    /// `E ≥ mean`: the maximally mixed state is feasible; β = 0.
    Unconstrained,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSolution {
    pub beta: f64,
    pub regime: BetaRegime,
    /// `|Tr S_β F − E|` at the returned β (zero outside the interior regime).
    pub residual: f64,
}

/// Finds β with `Tr S_β F = E` by bisection on `[1e-12, 1e6]`.
pub fn solve_beta(f: &ConstraintObservable, energy: f64) -> Result<BetaSolution> {
    let fmin = f.min_eigenvalue();
    let mean = f.mean_eigenvalue();
    let tol = 1e-10 * energy.abs().max(1.0);
    if energy <= fmin + DEGENERACY_TOL {
        return Ok(BetaSolution {
            beta: f64::INFINITY,
            regime: BetaRegime::GroundSpace,
            residual: 0.0,
        });
    }
    if energy >= mean - tol {
        return Ok(BetaSolution {
            beta: 0.0,
            regime: BetaRegime::Unconstrained,
            residual: (mean - energy).max(0.0),
        });
    }
    let (mut lo, mut hi) = (BETA_LO, BETA_HI);
    if f.gibbs_mean(hi) > energy {
        return Err(Error::Bracketing(format!(
            "Tr S_beta F = {} > E = {energy} at beta = {hi:e}",
            f.gibbs_mean(hi)
        )));
    }
    let mut beta = 0.5 * (lo + hi);
    for _ in 0..BETA_MAX_ITERS {
        beta = 0.5 * (lo + hi);
        let m = f.gibbs_mean(beta);
        if (m - energy).abs() <= tol {
            break;
        }
        if m > energy {
            lo = beta;
        } else {
            hi = beta;
        }
    }
    Ok(BetaSolution {
        beta,
        regime: BetaRegime::Interior,
        residual: (f.gibbs_mean(beta) - energy).abs(),
    })
}

/// Gibbs state at mean energy `min(E, mean)`: the maximum-entropy state
/// satisfying `Tr SF ≤ E`. Requires `E > f_min`.
pub fn max_entropy_state(f: &ConstraintObservable, energy: f64) -> Result<DensityMatrix> {
    let sol = solve_beta(f, energy)?;
    match sol.regime {
        BetaRegime::Unconstrained => Ok(DensityMatrix::maximally_mixed(f.dim())),
        BetaRegime::Interior => gibbs_state(f, sol.beta),
        BetaRegime::GroundSpace => Err(Error::Infeasible {
            energy,
            min_eigenvalue: f.min_eigenvalue(),
        }),
    }
}

/// `Tr SF`.
pub fn expected_value(s: &DensityMatrix, f: &ConstraintObservable) -> Result<f64> {
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: s.dim(),
        });
    }
    Ok(f.operator().expectation(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_observable_matrix, seeded};

    fn two_level() -> ConstraintObservable {
        ConstraintObservable::from_real_diagonal(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn rejects_negative_and_constant_operators() {
        assert!(matches!(
            ConstraintObservable::from_real_diagonal(&[-1.0, 1.0]).unwrap_err(),
            Error::NotPositive(_)
        ));
        assert!(matches!(
            ConstraintObservable::from_real_diagonal(&[2.0, 2.0]).unwrap_err(),
            Error::ConstantObservable(_)
        ));
    }

    #[test]
    fn two_level_gibbs_state_closed_form() {
        let f = two_level();
        for beta in [0.1, 1.0, 3.7] {
            let s = gibbs_state(&f, beta).unwrap();
            let z = 1.0 + (-beta).exp();
            let expect = ComplexMatrix::from_real_diagonal(&[1.0 / z, (-beta).exp() / z]);
            assert!((s.matrix() - &expect).max_abs() < 1e-15);
        }
        let hot = gibbs_state(&f, 1e-12).unwrap();
        assert!((hot.matrix() - &ComplexMatrix::from_real_diagonal(&[0.5, 0.5])).max_abs() < 1e-11);
        assert!(gibbs_state(&f, 0.0).is_err());
        assert!(gibbs_state(&f, -1.0).is_err());
    }

    #[test]
    fn gibbs_underflow_is_reported() {
        let f = ConstraintObservable::number_operator(50).unwrap();
        assert!(matches!(
            gibbs_state(&f, 100.0).unwrap_err(),
            Error::GibbsUnderflow { .. }
        ));
    }

    #[test]
    fn truncated_number_operator_at_ln2_is_geometric() {
        let f = ConstraintObservable::number_operator(50).unwrap();
        let s = gibbs_state(&f, std::f64::consts::LN_2).unwrap();
        // oracle: p_n = 2^{-n} / Σ_{k<50} 2^{-k}
        let norm: f64 = (0..50).map(|k| 0.5f64.powi(k)).sum();
        for n in 0..50 {
            let p = 0.5f64.powi(n as i32) / norm;
            assert!((s.matrix().get(n, n).re - p).abs() < 1e-15);
        }
        let mean: f64 = (0..50).map(|k| k as f64 * 0.5f64.powi(k) / norm).sum();
        assert!((mean - 1.0).abs() < 1e-10);
        assert!((expected_value(&s, &f).unwrap() - mean).abs() < 1e-12);
    }

    #[test]
    fn solve_beta_examples() {
        let f = two_level();
        let half = solve_beta(&f, 0.5).unwrap();
        assert_eq!(half.regime, BetaRegime::Unconstrained);
        assert_eq!(half.beta, 0.0);

        let quarter = solve_beta(&f, 0.25).unwrap();
        assert_eq!(quarter.regime, BetaRegime::Interior);
        assert!((quarter.beta - 3f64.ln()).abs() < 1e-9);

        let ground = solve_beta(&f, 0.0).unwrap();
        assert_eq!(ground.regime, BetaRegime::GroundSpace);
        assert!(ground.beta.is_infinite());

        let n = ConstraintObservable::number_operator(50).unwrap();
        // the truncated geometric mean at ln 2 is 1 − 50·2^{-50}/(1 − 2^{-50}) ≈ 1
        let sol = solve_beta(&n, 1.0).unwrap();
        assert!((sol.beta - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn solve_beta_round_trips_through_expected_value() {
        let mut rng = seeded(5);
        for _ in 0..10 {
            let m = random_observable_matrix(&mut rng, &[0.0, 0.4, 1.3, 2.0, 3.1]);
            let f = ConstraintObservable::from_matrix(m).unwrap();
            let e = 0.2 + 1.0 * (f.mean_eigenvalue() - 0.2) * 0.7;
            let sol = solve_beta(&f, e).unwrap();
            let s = gibbs_state(&f, sol.beta).unwrap();
            assert!((expected_value(&s, &f).unwrap() - e).abs() < 1e-9);
        }
    }

    #[test]
    fn expected_value_examples() {
        let mut rng = seeded(9);
        let m = random_observable_matrix(&mut rng, &[0.0, 0.5, 2.0, 4.0]);
        let f = ConstraintObservable::from_matrix(m).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((expected_value(&mixed, &f).unwrap() - 6.5 / 4.0).abs() < 1e-12);

        let g = f.ground_space();
        let ground = DensityMatrix::pure(&g.column(0)).unwrap();
        assert!(expected_value(&ground, &f).unwrap().abs() < 1e-12);

        // entrywise oracle Σ_jk S_kj F_jk
        let s = random_density(&mut rng, 4, 4);
        let mut acc = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                acc += (s.matrix().get(k, j) * f.matrix().get(j, k)).re;
            }
        }
        assert!((expected_value(&s, &f).unwrap() - acc).abs() < 1e-12);
        assert!(expected_value(&DensityMatrix::maximally_mixed(3), &f).is_err());
    }

    #[test]
    fn eigenspaces_group_degenerate_levels() {
        let f = ConstraintObservable::from_real_diagonal(&[1.0, 0.0, 1.0, 3.0]).unwrap();
        assert_eq!(f.eigenspaces(), vec![(0.0, 1), (1.0, 2), (3.0, 1)]);
        assert!((f.spectral_gap() - 1.0).abs() < 1e-15);
    }
}
