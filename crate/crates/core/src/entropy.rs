//! Entropy functionals, all in nats.
//!
//! Eigenvalues at or below [`ENTROPY_FLOOR`] are treated as exact zeros:
//! they contribute nothing to entropies and mark the kernel for the support
//! test in [`relative_entropy`].
//!
//! Two quantities have two independent code paths that are compared against
//! each other. The mutual information is computed from the complementary
//! channel ([`mutual_information`]) and as a relative entropy on a purified
//! joint state ([`mutual_information_via_relent`]). The Holevo quantity is
//! computed directly and as an average relative entropy ([`holevo_chi`]).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::channel::{check_cap, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::observable::{gibbs_state, ConstraintObservable};
use crate::state::{partial_trace_matrix, purify, DensityMatrix, Subsystem};

/// Eigenvalues at or below this are zero for entropy purposes.
pub const ENTROPY_FLOOR: f64 = 1e-12;

/// Mass on the kernel of `σ` above which `H(ρ;σ) = +∞`.
pub const SUPPORT_MASS_TOL: f64 = 1e-10;

/// Agreement required between the two Holevo forms.
pub const CHI_CROSS_TOL: f64 = 1e-8;

/// Agreement required between the two mutual-information routes.
pub const MI_CROSS_TOL: f64 = 1e-7;

/// A value in `[−∞, +∞]` restricted to finite reals or `+∞`; never NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    /// `f64` view with `+∞` as `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `−Σ λ ln λ` over eigenvalues above [`ENTROPY_FLOOR`].
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let h: f64 = eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_FLOOR)
        .map(|&x| -x * x.ln())
        .sum();
    h.max(0.0)
}

/// Binary entropy `h(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// Von Neumann entropy `−Tr S ln S`.
pub fn entropy(s: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(s.spectrum()?.eigenvalues()))
}

/// `H(ρ;σ) = Tr ρ(ln ρ − ln σ)`, evaluated in the eigenbasis of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    let spec = sigma.spectrum()?;
    let v = spec.eigenvectors();
    let n = rho.dim();
    let mut kernel_mass = 0.0;
    let mut cross = 0.0;
    for (j, &sj) in spec.eigenvalues().iter().enumerate() {
        // ⟨v_j|ρ|v_j⟩
        let mut p = ZERO;
        for a in 0..n {
            let va = v.get(a, j).conj();
            if va == ZERO {
                continue;
            }
            for b in 0..n {
                p += va * rho.matrix().get(a, b) * v.get(b, j);
            }
        }
        let p = p.re.max(0.0);
        if sj <= ENTROPY_FLOOR {
            kernel_mass += p;
        } else {
            cross += p * sj.ln();
        }
    }
    if kernel_mass > SUPPORT_MASS_TOL {
        return Ok(ExtendedReal::Infinite);
    }
    let d = -entropy(rho)? - cross;
    Ok(ExtendedReal::Finite(d.max(0.0)))
}

/// Entropy exchange `H(S;Φ) = H(Φ_E[S])`.
pub fn entropy_exchange(s: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    entropy(&ch.complementary_apply(s)?)
}

/// `I(S,Φ) = H(S) + H(Φ[S]) − H(S;Φ)`.
pub fn mutual_information(s: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    let parts = MutualInformationParts::compute(s, ch)?;
    Ok(parts.value())
}

/// The three entropies that make up the mutual information.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MutualInformationParts {
    pub input_entropy: f64,
    pub output_entropy: f64,
    pub entropy_exchange: f64,
}

impl MutualInformationParts {
    pub fn compute(s: &DensityMatrix, ch: &KrausChannel) -> Result<Self> {
        Ok(Self {
            input_entropy: entropy(s)?,
            output_entropy: entropy(&ch.apply(s)?)?,
            entropy_exchange: entropy_exchange(s, ch)?,
        })
    }

    pub fn value(&self) -> f64 {
        (self.input_entropy + self.output_entropy - self.entropy_exchange).max(0.0)
    }
}

/// `(Φ ⊗ Id_R)[|ψ⟩⟨ψ|]` for a purification `ψ` of `S`, on `B ⊗ R`
/// (output index major).
pub fn purified_output(s: &DensityMatrix, ch: &KrausChannel) -> Result<ComplexMatrix> {
    let d = ch.dim_in();
    if s.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s.dim(),
        });
    }
    let dout = ch.dim_out();
    check_cap(dout * d)?;
    let psi = purify(s)?;
    let amps = psi.amplitudes();
    let psi_mat = ComplexMatrix::from_fn(d, d, |i, r| amps[i * d + r]);
    // rows vec(A_k Ψ)
    let ops = ch.kraus_ops();
    let mut entries = Vec::with_capacity(ops.len() * dout * d);
    for a in ops {
        let ap = a.matmul(&psi_mat);
        for o in 0..dout {
            for r in 0..d {
                entries.push(ap.get(o, r));
            }
        }
    }
    let rows = ComplexMatrix::from_row_major(ops.len(), dout * d, &entries)?;
    Ok(rows.transpose().matmul(&rows.conj()))
}

/// `I(S,Φ) = H((Φ⊗Id)[ψ]; Φ[S] ⊗ S_R)` with `ψ` a purification of `S`.
///
/// Independent of [`mutual_information`]: it never touches the
/// complementary channel.
pub fn mutual_information_via_relent(s: &DensityMatrix, ch: &KrausChannel) -> Result<ExtendedReal> {
    let joint = purified_output(s, ch)?;
    let dims = (ch.dim_out(), ch.dim_in());
    let out = partial_trace_matrix(&joint, dims, Subsystem::A)?;
    let reference = partial_trace_matrix(&joint, dims, Subsystem::B)?;
    let product = DensityMatrix::from_matrix_trusted(out.kron(&reference));
    relative_entropy(&DensityMatrix::from_matrix_trusted(joint), &product)
}

/// Finite probability distribution over states of a common dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probabilities: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    /// Probabilities must be nonnegative and sum to one within `1e-10`.
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let dim = members[0].1.dim();
        let mut probabilities = Vec::with_capacity(members.len());
        let mut states = Vec::with_capacity(members.len());
        for (p, s) in members {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidProbabilities(format!(
                    "probability {p} is not a nonnegative number"
                )));
            }
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            probabilities.push(p);
            states.push(s);
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            probabilities,
            states,
        })
    }

    /// Renormalizes the weights instead of validating their sum.
    pub(crate) fn from_parts_trusted(probabilities: Vec<f64>, states: Vec<DensityMatrix>) -> Self {
        let total: f64 = probabilities.iter().sum();
        Self {
            probabilities: probabilities.iter().map(|p| p / total).collect(),
            states,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.probabilities.iter().copied().zip(&self.states)
    }

    /// `S̄ = Σ π_x S_x`.
    pub fn average(&self) -> DensityMatrix {
        let n = self.dim();
        let m = self.iter().fold(ComplexMatrix::zeros(n, n), |acc, (p, s)| {
            &acc + &s.matrix().scale(p)
        });
        DensityMatrix::from_matrix_trusted(m)
    }
}

/// Both forms of the Holevo quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolevoForms {
    /// `H(Σ π Φ[S_x]) − Σ π H(Φ[S_x])`.
    pub direct: f64,
    /// `Σ π H(Φ[S_x]; Φ[S̄])`.
    pub relative: f64,
}

pub fn holevo_forms(ens: &Ensemble, ch: &KrausChannel) -> Result<HolevoForms> {
    if ens.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: ens.dim(),
        });
    }
    let outputs: Vec<DensityMatrix> = ens
        .states()
        .iter()
        .map(|s| ch.apply(s))
        .collect::<Result<_>>()?;
    let avg_out = ch.apply(&ens.average())?;
    let mut conditional = 0.0;
    let mut relative = 0.0;
    for (p, out) in ens.probabilities().iter().zip(&outputs) {
        if *p == 0.0 {
            continue;
        }
        conditional += p * entropy(out)?;
        // finite: supp Φ[S_x] ⊆ supp Φ[S̄] whenever π_x > 0
        relative += p * relative_entropy(out, &avg_out)?.to_f64();
    }
    Ok(HolevoForms {
        direct: (entropy(&avg_out)? - conditional).max(0.0),
        relative,
    })
}

/// Holevo quantity; errors if the two forms differ by more than
/// [`CHI_CROSS_TOL`].
pub fn holevo_chi(ens: &Ensemble, ch: &KrausChannel) -> Result<f64> {
    let f = holevo_forms(ens, ch)?;
    let diff = (f.direct - f.relative).abs();
    if !(diff <= CHI_CROSS_TOL) {
        return Err(Error::CrossCheck {
            what: "holevo chi",
            difference: diff,
            tol: CHI_CROSS_TOL,
        });
    }
    Ok(f.direct)
}

/// `|β Tr SF − H(S) − (H(S;S_β) − ln Tr e^{−βF})|`, or `+∞` when `S` is not
/// supported inside `S_β` (which cannot happen for a full-rank Gibbs state).
pub fn free_energy_residual(
    s: &DensityMatrix,
    f: &ConstraintObservable,
    beta: f64,
) -> Result<ExtendedReal> {
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: s.dim(),
        });
    }
    let gibbs = gibbs_state(f, beta)?;
    let lhs = beta * f.operator().expectation(s) - entropy(s)?;
    Ok(match relative_entropy(s, &gibbs)? {
        ExtendedReal::Finite(d) => ExtendedReal::Finite((lhs - (d - f.log_partition(beta))).abs()),
        ExtendedReal::Infinite => ExtendedReal::Infinite,
    })
}

/// `βE + ln Tr e^{−βF}`, an upper bound on `H(S)` for `Tr SF ≤ E`.
pub fn entropy_upper_bound(f: &ConstraintObservable, beta: f64, energy: f64) -> f64 {
    beta * energy + f.log_partition(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, identity, replacement};
    use crate::linalg::C64;
    use crate::random::{random_channel, random_density, random_full_rank, seeded};

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn entropy_examples() {
        assert!(entropy(&DensityMatrix::basis(3, 1)).unwrap().abs() < 1e-14);
        let h = entropy(&DensityMatrix::maximally_mixed(5)).unwrap();
        assert!((h - 5f64.ln()).abs() < 1e-12);
        let s = DensityMatrix::from_diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert!((entropy(&s).unwrap() - 1.5 * LN2).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let r = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let s = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let d = relative_entropy(&r, &s).unwrap().finite().unwrap();
        assert!((d - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(relative_entropy(&s, &s).unwrap(), ExtendedReal::Finite(0.0));
        let zero = DensityMatrix::basis(2, 0);
        let one = DensityMatrix::basis(2, 1);
        assert_eq!(
            relative_entropy(&zero, &one).unwrap(),
            ExtendedReal::Infinite
        );
    }

    #[test]
    fn exchange_for_dephasing_is_binary_entropy() {
        let p = 0.2;
        let h =
            entropy_exchange(&DensityMatrix::maximally_mixed(2), &dephasing(p).unwrap()).unwrap();
        assert!((h - binary_entropy(p)).abs() < 1e-12);
        let env = dephasing(p)
            .unwrap()
            .complementary_apply(&DensityMatrix::maximally_mixed(2))
            .unwrap();
        assert!((env.matrix().get(0, 0).re - (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let id = identity(2).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((mutual_information(&mm, &id).unwrap() - 2.0 * LN2).abs() < 1e-12);
        let via = mutual_information_via_relent(&mm, &id)
            .unwrap()
            .finite()
            .unwrap();
        assert!((via - 2.0 * LN2).abs() < 1e-10);

        let mut rng = seeded(5);
        let ch = random_channel(&mut rng, 2, 3, 3);
        let pure = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert!(mutual_information(&pure, &ch).unwrap().abs() < 1e-9);

        let rep = replacement(&DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap(), 2).unwrap();
        let s = random_density(&mut rng, 2, 2);
        assert!(mutual_information(&s, &rep).unwrap().abs() < 1e-9);
    }

    #[test]
    fn routes_agree_on_random_instances() {
        let mut rng = seeded(9);
        for _ in 0..20 {
            let ch = random_channel(&mut rng, 3, 2, 4);
            let s = random_density(&mut rng, 3, 3);
            let a = mutual_information(&s, &ch).unwrap();
            let b = mutual_information_via_relent(&s, &ch)
                .unwrap()
                .finite()
                .unwrap();
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn holevo_examples() {
        let id = identity(2).unwrap();
        let ens = Ensemble::new(vec![
            (0.5, DensityMatrix::basis(2, 0)),
            (0.5, DensityMatrix::basis(2, 1)),
        ])
        .unwrap();
        assert!((holevo_chi(&ens, &id).unwrap() - LN2).abs() < 1e-12);

        let ens = Ensemble::new(vec![
            (0.7, DensityMatrix::basis(2, 0)),
            (0.3, DensityMatrix::basis(2, 1)),
        ])
        .unwrap();
        let chi = holevo_chi(&ens, &dephasing(0.0).unwrap()).unwrap();
        assert!((chi - binary_entropy(0.3)).abs() < 1e-12);

        let single = Ensemble::new(vec![(1.0, DensityMatrix::maximally_mixed(2))]).unwrap();
        assert!(holevo_chi(&single, &id).unwrap().abs() < 1e-14);

        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.4, DensityMatrix::basis(2, 0))]).is_err());
    }

    #[test]
    fn free_energy_identity() {
        let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let g = gibbs_state(&f, 1.0).unwrap();
        assert!(free_energy_residual(&g, &f, 1.0).unwrap().to_f64() < 1e-10);
        assert!(relative_entropy(&g, &g).unwrap().to_f64() < 1e-12);
        let mut rng = seeded(4);
        for _ in 0..10 {
            let s = random_full_rank(&mut rng, 2, 1e-3);
            assert!(free_energy_residual(&s, &f, 1.0).unwrap().to_f64() < 1e-8);
            let e = f.operator().expectation(&s);
            assert!(entropy(&s).unwrap() <= entropy_upper_bound(&f, 1.0, e) + 1e-10);
        }
    }
}
