//! Checks built on the solvers: two-copy additivity, convergence under
//! Fock truncation, and the sufficient condition for attainment.

use serde::Serialize;

use crate::channel::{constraint_tensor, KrausChannel};
use crate::entropy::mutual_information;
use crate::error::{Error, Result};
use crate::linalg::eigvalsh;

use super::{maximize_mutual_info, CapacityResult, ConstraintSpec, SolverOptions};

/// Single-copy versus two-copy constrained mutual information.
#[derive(Clone, Debug)]
pub struct TwoCopyReport {
    pub single: CapacityResult,
    pub double: CapacityResult,
    /// `I(S*⊗S*, Φ⊗Φ)` for the single-copy optimizer `S*`.
    pub product_witness: f64,
    /// `Ī₂ − 2Ī₁`.
    pub difference: f64,
    /// `2 · gap_tol`.
    pub tolerance: f64,
    pub passed: bool,
}

/// Solves `(Φ, F, E)` and `(Φ⊗Φ, F⁽²⁾, 2E)` and compares `Ī₂` with `2Ī₁`.
pub fn two_copy_check(
    ch: &KrausChannel,
    c: &ConstraintSpec,
    opts: &SolverOptions,
) -> Result<TwoCopyReport> {
    let single = maximize_mutual_info(ch, c, opts)?;
    let ch2 = ch.tensor(ch)?;
    let f2 = constraint_tensor(c.observable(), 2)?;
    let c2 = ConstraintSpec::new(f2, 2.0 * c.energy())?;
    let double = maximize_mutual_info(&ch2, &c2, opts)?;
    let s = single
        .optimizer
        .state()
        .expect("mutual-information solver returns a state");
    let product_witness = mutual_information(&s.tensor(s), &ch2)?;
    let difference = double.value - 2.0 * single.value;
    let tolerance = 2.0 * opts.gap_tol;
    Ok(TwoCopyReport {
        passed: difference.abs() <= tolerance,
        single,
        double,
        product_witness,
        difference,
        tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub cutoff: usize,
    pub value: f64,
    pub duality_gap: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationSweep {
    pub points: Vec<SweepPoint>,
    /// Every step is `≥ −2·gap_tol`.
    pub nondecreasing: bool,
    /// Every positive increment is no larger than the one before.
    pub increments_shrink: bool,
    /// Difference between the last two values (0 for a single cutoff).
    pub last_increment: f64,
}

/// Capacity estimates for a family of truncations.
///
/// `build` maps a cutoff to the truncated channel and its constraint.
/// Cutoffs must be strictly increasing.
pub fn truncation_sweep<B>(
    build: B,
    cutoffs: &[usize],
    opts: &SolverOptions,
) -> Result<TruncationSweep>
where
    B: Fn(usize) -> Result<(KrausChannel, ConstraintSpec)>,
{
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "cutoffs",
            value: cutoffs.len() as f64,
            reason: "must be a nonempty strictly increasing list",
        });
    }
    let mut points = Vec::with_capacity(cutoffs.len());
    for &d in cutoffs {
        let (ch, c) = build(d)?;
        let r = maximize_mutual_info(&ch, &c, opts)?;
        points.push(SweepPoint {
            cutoff: d,
            value: r.value,
            duality_gap: r.duality_gap.unwrap_or(f64::NAN),
            certified: r.certified,
        });
    }
    let incs: Vec<f64> = points.windows(2).map(|w| w[1].value - w[0].value).collect();
    let tol = 2.0 * opts.gap_tol;
    let nondecreasing = incs.iter().all(|&x| x >= -tol);
    let increments_shrink = incs.windows(2).all(|w| w[1] <= w[0].max(0.0) + tol);
    Ok(TruncationSweep {
        points,
        nondecreasing,
        increments_shrink,
        last_increment: incs.last().copied().unwrap_or(0.0),
    })
}

/// Finite-dimensional diagnostics for the attainment hypothesis: the
/// partition function of `F` is finite, and some `F̃ = cF` with `c > 0`
/// satisfies `Φ*[F̃] ≤ F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttainmentDiagnostics {
    /// Always true in finite dimension.
    pub partition_function_finite: bool,
    pub spectral_gap: f64,
    /// Distinct eigenvalues of `F` with multiplicities.
    pub eigenspaces: Vec<(f64, usize)>,
    /// `λ_min(F − Φ*[F])`, the `c = 1` test.
    pub min_eig_at_unit_scale: f64,
    /// Largest `c` with `λ_min(F − cΦ*[F]) ≥ −1e-10`; `None` means unbounded.
    pub max_scale: Option<f64>,
    /// `"certified"` when some `c > 0` passes, else `"uncertified"`.
    pub status: &'static str,
}

impl AttainmentDiagnostics {
    pub fn certified(&self) -> bool {
        self.status == "certified"
    }
}

const PSD_TOL: f64 = 1e-10;
const SCALE_FLOOR: f64 = 1e-6;

pub fn attainment_check(ch: &KrausChannel, c: &ConstraintSpec) -> Result<AttainmentDiagnostics> {
    let f = c.observable();
    if ch.dim_out() != f.dim() || ch.dim_in() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: ch.dim_out(),
        });
    }
    let fm = f.matrix();
    let dual = ch.dual_apply_matrix(fm)?.hermitian_part();
    let min_eig =
        |s: f64| -> Result<f64> { Ok(eigvalsh(&(fm - &dual.scale(s)).hermitian_part())?[0]) };
    let at_one = min_eig(1.0)?;
    let dual_norm = eigvalsh(&dual)?.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let max_scale = if dual_norm <= 1e-14 {
        None
    } else if min_eig(0.0)? < -PSD_TOL {
        Some(0.0)
    } else {
        // λ_min(F − sΦ*[F]) is concave and decreasing in s ≥ 0
        let mut lo = 0.0;
        let mut hi = 1.0;
        while min_eig(hi)? >= -PSD_TOL {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                break;
            }
        }
        if hi > 1e12 {
            None
        } else {
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if min_eig(mid)? >= -PSD_TOL {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // a scale this small passes only through the PSD tolerance
            Some(if lo * dual_norm <= SCALE_FLOOR {
                0.0
            } else {
                lo
            })
        }
    };
    let certified = max_scale.is_none_or(|s| s > 0.0);
    Ok(AttainmentDiagnostics {
        partition_function_finite: true,
        spectral_gap: f.spectral_gap(),
        eigenspaces: f.eigenspaces(),
        min_eig_at_unit_scale: at_one,
        max_scale,
        status: if certified {
            "certified"
        } else {
            "uncertified"
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, identity, replacement};
    use crate::observable::ConstraintObservable;
    use crate::state::DensityMatrix;

    fn spec(diag: &[f64], e: f64) -> ConstraintSpec {
        ConstraintSpec::new(ConstraintObservable::from_real_diagonal(diag).unwrap(), e).unwrap()
    }

    #[test]
    fn identity_two_copy_is_additive() {
        let r = two_copy_check(
            &identity(2).unwrap(),
            &spec(&[0.0, 1.0], 0.5),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(r.passed, "{}", r.difference);
        assert!((r.double.value - 4.0 * std::f64::consts::LN_2).abs() < 2e-6);
    }

    #[test]
    fn attainment_examples() {
        let c = spec(&[0.0, 1.0, 2.0], 0.5);
        let d = attainment_check(&identity(3).unwrap(), &c).unwrap();
        assert!(d.certified());
        assert!(d.max_scale.is_none() || d.max_scale.unwrap() >= 1.0);
        assert!(d.min_eig_at_unit_scale.abs() < 1e-12);

        let c = spec(&[0.0, 1.0], 0.5);
        let rep = replacement(&DensityMatrix::basis(2, 0), 2).unwrap();
        let d = attainment_check(&rep, &c).unwrap();
        assert!(d.certified() && d.max_scale.is_none());

        // dephasing commutes with a diagonal F, so Φ*[F] = F
        let d = attainment_check(&dephasing(0.4).unwrap(), &c).unwrap();
        assert!(d.min_eig_at_unit_scale >= -1e-10);
    }

    #[test]
    fn added_noise_at_the_vacuum_defeats_every_scale() {
        use crate::channel::{gaussian_classical_noise, GaussianNoiseSpec};
        let ch = gaussian_classical_noise(&GaussianNoiseSpec::new(1.0, 8)).unwrap();
        let c =
            ConstraintSpec::new(ConstraintObservable::number_operator(8).unwrap(), 0.5).unwrap();
        let d = attainment_check(&ch, &c).unwrap();
        assert_eq!(d.max_scale, Some(0.0));
        assert!(!d.certified());
    }

    #[test]
    fn constant_sweep_is_flat() {
        let sweep = truncation_sweep(
            |_| Ok((identity(2).unwrap(), spec(&[0.0, 1.0], 0.3))),
            &[2, 3, 4],
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(sweep.nondecreasing && sweep.increments_shrink);
        assert!(sweep.last_increment.abs() < 2e-6);
        assert!(truncation_sweep(|_| unreachable!(), &[3, 2], &SolverOptions::default()).is_err());
    }
}
