//! Dense complex matrices and Hermitian eigendecomposition.
//!
//! [`ComplexMatrix`] is a thin newtype over a `faer` matrix. Everything the
//! crate does numerically funnels through [`eigh`], which wraps `faer`'s
//! self-adjoint eigensolver and checks the eigen-residual of its output.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use faer::{Mat, MatRef, Side};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entrywise Hermiticity tolerance.
pub const TOL_HERM: f64 = 1e-10;

/// Relative eigen-residual bound `‖Hv − λv‖ ≤ EIG_RESIDUAL_TOL · ‖H‖`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense complex matrix, column-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(Mat<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.nrows(), self.ncols())?;
        for i in 0..self.nrows() {
            write!(f, "  ")?;
            for j in 0..self.ncols() {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Mat::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(Mat::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let bad = entries
            .iter()
            .filter(|z| !z.re.is_finite() || !z.im.is_finite())
            .count();
        if bad > 0 {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    /// Builds a matrix from a list of rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(n, m, &flat)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { real(diag[i]) } else { ZERO })
    }

    /// Rank-one projector `|v⟩⟨v|` (no normalization applied).
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub(crate) fn from_faer(m: Mat<C64>) -> Self {
        Self(m)
    }

    pub fn as_faer(&self) -> MatRef<'_, C64> {
        self.0.as_ref()
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.nrows()).map(|i| self.get(i, j)).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows().min(self.ncols()))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self(self.0.conjugate().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose().to_owned())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(faer::Scale(real(s)) * &self.0)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(faer::Scale(s) * &self.0)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// Kronecker product `self ⊗ rhs` (first factor is the major index).
    pub fn kron(&self, rhs: &Self) -> Self {
        Self(self.0.kron(&rhs.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `Tr(self† rhs)`.
    pub fn inner(&self, rhs: &Self) -> C64 {
        let mut acc = ZERO;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                acc += self.get(i, j).conj() * rhs.get(i, j);
            }
        }
        acc
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.nrows() {
            for k in 0..self.ncols() {
                acc += self.get(i, k) * rhs.get(k, i);
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                m = m.max(self.get(i, j).norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn non_finite_count(&self) -> usize {
        let mut bad = 0;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// `max |A − A†|` entrywise; `f64::INFINITY` for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.nrows();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                m = m.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        m
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.nrows();
        Self::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns).
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Spectral norm of the decomposed operator.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.eigenvectors.as_faer();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * weights[j]);
        ComplexMatrix(&scaled * v.adjoint())
    }

    /// Same as [`Spectrum::map`] but with a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.eigenvectors.as_faer();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * weights[j]);
        ComplexMatrix(&scaled * v.adjoint())
    }

    /// Same eigenvectors with eigenvalues `f(λ)`; `f` must be nondecreasing
    /// so the ascending order is kept.
    pub(crate) fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Spectrum {
        Spectrum {
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }

    /// Maximum column residual `‖H v_k − λ_k v_k‖` against `h`.
    pub fn residual(&self, h: &ComplexMatrix) -> f64 {
        let v = self.eigenvectors.as_faer();
        let hv = &h.0 * v;
        let mut worst = 0.0_f64;
        for k in 0..self.dim() {
            let mut s = 0.0;
            for i in 0..v.nrows() {
                s += (hv[(i, k)] - v[(i, k)] * self.eigenvalues[k]).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        worst
    }

    /// `‖V†V − I‖` max-abs.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let g = v.adjoint().matmul(v);
        (&g - &ComplexMatrix::identity(self.dim())).max_abs()
    }
}

/// Eigendecomposition of a (numerically) Hermitian matrix. Only the lower
/// triangle is read; callers are expected to have validated Hermiticity.
pub fn eigh(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let evd =
        m.0.self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::EigenNoConvergence {
                dim: n,
                residual: f64::NAN,
            })?;
    let s = evd.S().column_vector();
    let eigenvalues: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNoConvergence {
            dim: n,
            residual: f64::NAN,
        });
    }
    let spec = Spectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix(evd.U().to_owned()),
    };
    let scale = spec.norm().max(f64::MIN_POSITIVE);
    let residual = spec.residual(m);
    if residual > EIG_RESIDUAL_TOL * scale {
        return Err(Error::EigenNoConvergence { dim: n, residual });
    }
    Ok(spec)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    m.0.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence {
            dim: m.nrows(),
            residual: f64::NAN,
        })
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(&m.hermitian_part())?.iter().map(|x| x.abs()).sum())
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: C64 = C64 { re: 1.0, im: 0.0 };

    #[test]
    fn diagonal_matrix_eigenpairs_are_sorted_permutations() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let s = eigh(&m).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 2.0, 3.0]);
        // each eigenvector is a unit vector on one coordinate
        for (k, expect) in [1usize, 2, 0].into_iter().enumerate() {
            let v = s.eigenvector(k);
            assert!((v[expect].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let s = eigh(&m).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let v = s.eigenvector(0);
        // (1, -1)/√2 up to phase
        let ratio = v[1] / v[0];
        assert!((ratio + ONE).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_entries() {
        let e = ComplexMatrix::from_row_major(1, 2, &[ONE, real(f64::NAN)]).unwrap_err();
        assert_eq!(e, Error::NonFinite(1));
    }

    #[test]
    fn kron_matches_index_formula() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i * j) as f64 + 1.0, 0.5));
        let k = a.kron(&b);
        assert_eq!((k.nrows(), k.ncols()), (4, 6));
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..2 {
                    for q in 0..2 {
                        let expect = a.get(i, j) * b.get(p, q);
                        assert!((k.get(i * 2 + p, j * 2 + q) - expect).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn map_reconstructs_matrix() {
        let m = ComplexMatrix::from_rows(&[
            vec![real(2.0), C64::new(0.5, -0.25)],
            vec![C64::new(0.5, 0.25), real(-1.0)],
        ])
        .unwrap();
        let s = eigh(&m).unwrap();
        let back = s.map(|x| x);
        assert!((&back - &m).max_abs() < 1e-14);
        assert!(s.orthonormality_defect() < 1e-14);
    }
}
