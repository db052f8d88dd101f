//! Hermitian operators, density matrices and pure states.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, real, ComplexMatrix, Spectrum, C64, TOL_HERM, ZERO};

/// Default validation tolerance for density matrices (trace, Hermiticity, negativity).
pub const TOL_DENSITY: f64 = 1e-10;

/// Eigenvalues at or below this are treated as zero by logarithms and entropies.
pub const EIG_FLOOR: f64 = 1e-12;

/// A square matrix equal to its conjugate transpose within [`TOL_HERM`].
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL_HERM)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        check_square_finite(&matrix)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// Symmetrizes without checking; for operators Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eig(&self) -> Result<Spectrum> {
        hermitian_eig(self)
    }

    /// `Tr(self · rho)` (real part; exact for Hermitian pairs).
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.matrix.trace_product(rho.matrix()).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn hermitian_eig(h: &HermitianOperator) -> Result<Spectrum> {
    eigh(&h.matrix)
}

fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    match m.non_finite_count() {
        0 => Ok(()),
        n => Err(Error::NonFinite(n)),
    }
}

/// What [`make_density`] had to repair.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClipReport {
    /// Sum of magnitudes of the negative eigenvalues that were set to zero.
    pub clipped_mass: f64,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
}

/// Positive semidefinite, unit-trace operator. The spectrum is computed
/// lazily and cached.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: OnceLock<Spectrum>,
}

/// Validates `m` as a density matrix, clipping eigenvalues in `[-tol, 0)`
/// to zero and renormalizing.
pub fn make_density(m: &ComplexMatrix, tol: f64) -> Result<(DensityMatrix, ClipReport)> {
    check_square_finite(m)?;
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::InvalidTrace { trace, tol });
    }
    let spec = eigh(&h)?;
    let min_eigenvalue = spec.min();
    if min_eigenvalue < -tol {
        return Err(Error::NegativeEigenvalue {
            min_eigenvalue,
            tol,
        });
    }
    let clipped_mass: f64 = spec
        .eigenvalues()
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| -x)
        .sum();
    let report = ClipReport {
        clipped_mass,
        min_eigenvalue,
        trace_deviation: trace - 1.0,
    };
    if clipped_mass > 0.0 {
        let total: f64 = spec.eigenvalues().iter().map(|x| x.max(0.0)).sum();
        let rebuilt = spec.map(|x| x.max(0.0) / total);
        return Ok((DensityMatrix::from_matrix_trusted(rebuilt), report));
    }
    Ok((DensityMatrix::from_matrix_trusted(h), report))
}

impl DensityMatrix {
    /// Validates with the default tolerance [`TOL_DENSITY`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Ok(make_density(&m, TOL_DENSITY)?.0)
    }

    /// Symmetrizes and divides by the trace. Used for matrices that are
    /// states by construction (channel outputs, convex mixtures).
    pub(crate) fn from_matrix_trusted(m: ComplexMatrix) -> Self {
        let h = m.hermitian_part();
        let t = h.trace().re;
        let matrix = if (t - 1.0).abs() > 0.0 && t > 0.0 {
            h.scale(1.0 / t)
        } else {
            h
        };
        Self {
            matrix,
            spectrum: OnceLock::new(),
        }
    }

    pub(crate) fn from_spectrum_trusted(spectrum: Spectrum) -> Self {
        let matrix = spectrum.map(|x| x).hermitian_part();
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Self {
            matrix,
            spectrum: cell,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        Self::from_matrix_trusted(ComplexMatrix::from_real_diagonal(&d))
    }

    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(probabilities))
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let psi = PureState::new(amplitudes.to_vec())?;
        Ok(psi.density())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = eigh(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// Eigenvalues ascending, with roundoff negatives clipped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self
            .spectrum()?
            .eigenvalues()
            .iter()
            .map(|x| x.max(0.0))
            .collect())
    }

    /// Number of eigenvalues above [`EIG_FLOOR`].
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .spectrum()?
            .eigenvalues()
            .iter()
            .filter(|&&x| x > EIG_FLOOR)
            .count())
    }

    /// Matrix logarithm with eigenvalues floored at `floor`.
    pub fn log_floored(&self, floor: f64) -> Result<ComplexMatrix> {
        Ok(self.spectrum()?.map(|x| x.max(floor).ln()))
    }

    /// `‖self − other‖₁`.
    pub fn trace_norm_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        linalg::trace_norm(&(&self.matrix - &other.matrix))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_trusted(self.matrix.kron(&other.matrix))
    }

    /// `(1 − w)·self + w·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let m = &self.matrix.scale(1.0 - w) + &other.matrix.scale(w);
        Ok(Self::from_matrix_trusted(m))
    }

    /// Conjugation `U S U†` (for unitary or isometric `U`).
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::from_matrix_trusted(u.matrix_sandwich(&self.matrix))
    }
}

impl ComplexMatrix {
    /// `self · m · self†`.
    pub(crate) fn matrix_sandwich(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(m).matmul(&self.adjoint())
    }
}

/// Unit vector in `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::vec_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_trusted(ComplexMatrix::outer(&self.amplitudes))
    }
}

/// `|ψ⟩ = Σ_j √λ_j |e_j⟩ ⊗ |e_j⟩` on `C^d ⊗ C^d`, index `i·d + r`.
pub fn purify(s: &DensityMatrix) -> Result<PureState> {
    let d = s.dim();
    let spec = s.spectrum()?;
    let lambdas: Vec<f64> = spec.eigenvalues().iter().map(|x| x.max(0.0)).collect();
    let total: f64 = lambdas.iter().sum();
    let vecs = spec.eigenvectors();
    let mut amps = vec![ZERO; d * d];
    for (j, &l) in lambdas.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let w = (l / total).sqrt();
        for i in 0..d {
            let ei = vecs.get(i, j) * w;
            if ei == ZERO {
                continue;
            }
            for r in 0..d {
                amps[i * d + r] += ei * vecs.get(r, j);
            }
        }
    }
    PureState::normalized(amps)
}

/// Which factor of a bipartite space to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a matrix on `C^dA ⊗ C^dB` (first factor major).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if m.nrows() != da * db || m.ncols() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: m.nrows(),
        });
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|b| m.get(i * db + b, j * db + b)).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| m.get(a * db + i, a * db + j)).sum()
        }),
    })
}

pub fn partial_trace(
    s: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    partial_trace_matrix(s.matrix(), dims, keep).map(DensityMatrix::from_matrix_trusted)
}

/// Keeps the `d` leading eigenvectors of `s` and renormalizes their weights.
/// Ties are broken by eigenvalue order, then by original index.
pub fn truncate_state(s: &DensityMatrix, d: usize) -> Result<DensityMatrix> {
    let n = s.dim();
    if d == 0 || d > n {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            reason: "must satisfy 1 <= d <= dim",
        });
    }
    let spec = s.spectrum()?;
    let mut order: Vec<usize> = (0..n).collect();
    let ev = spec.eigenvalues();
    // stable: equal eigenvalues keep ascending index order
    order.sort_by(|&a, &b| ev[b].total_cmp(&ev[a]));
    let kept = &order[..d];
    let mass: f64 = kept.iter().map(|&k| ev[k].max(0.0)).sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMass(d));
    }
    let vecs = spec.eigenvectors();
    let mut out = ComplexMatrix::zeros(n, n);
    for &k in kept {
        let w = ev[k].max(0.0) / mass;
        if w == 0.0 {
            continue;
        }
        let v = vecs.column(k);
        out = &out + &ComplexMatrix::outer(&v).scale(w);
    }
    Ok(DensityMatrix::from_matrix_trusted(out))
}

pub(crate) fn unit_vector(dim: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[k] = real(1.0);
    v
}
