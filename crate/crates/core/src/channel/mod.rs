//! Quantum channels in Kraus form.
//!
//! A [`KrausChannel`] stores its Kraus operators together with three
//! pre-arranged copies of them so that the channel, its dual, the
//! complementary channel and the complementary dual each reduce to two dense
//! matrix products. That matters for the Fock-truncated Gaussian channel,
//! which has hundreds of Kraus operators.

mod gaussian;
mod standard;

use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, C64};
use crate::observable::ConstraintObservable;
use crate::state::{DensityMatrix, HermitianOperator};

pub use gaussian::{
    build_gaussian, displacement, gauss_laguerre, gaussian_classical_noise, thermal_entropy,
    thermal_state, GaussianBuild, GaussianNoiseSpec, GAUSSIAN_TP_TOL,
};
pub use standard::{
    amplitude_damping, build_standard, dephasing, depolarizing, identity, replacement, unitary,
    StandardChannel,
};

/// Completeness tolerance `max |Σ A†A − I|` accepted by [`KrausChannel::new`].
pub const TP_TOL: f64 = 1e-8;

/// Default cap on tensor-product dimensions.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "QCAP_DIM_CAP";

/// Current dimension cap: `QCAP_DIM_CAP` if set to a positive integer.
pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_DIM_CAP)
}

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

/// Completely positive trace-preserving map `S ↦ Σ_k A_k S A_k†`.
#[derive(Clone)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    tp_defect: f64,
    // rows k·dout + i, cols j
    stack: Mat<C64>,
    // rows i, cols k·din + j
    wide: Mat<C64>,
    // rows k, cols i·din + j
    flat: Mat<C64>,
}

impl fmt::Debug for KrausChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KrausChannel")
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("n_kraus", &self.kraus.len())
            .field("tp_defect", &self.tp_defect)
            .finish()
    }
}

impl KrausChannel {
    /// Validates shapes, finiteness and completeness within [`TP_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, TP_TOL)
    }

    pub fn with_tolerance(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        if !(ch.tp_defect <= tol) {
            return Err(Error::NotTracePreserving {
                defect: ch.tp_defect,
                tol,
            });
        }
        Ok(ch)
    }

    /// Checks shapes and finiteness only; `tp_defect` is still measured.
    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyChannel)?;
        let (dout, din) = (first.nrows(), first.ncols());
        if dout == 0 || din == 0 {
            return Err(Error::EmptyChannel);
        }
        for a in &kraus {
            if a.nrows() != dout {
                return Err(Error::DimensionMismatch {
                    expected: dout,
                    found: a.nrows(),
                });
            }
            if a.ncols() != din {
                return Err(Error::DimensionMismatch {
                    expected: din,
                    found: a.ncols(),
                });
            }
            let bad = a.non_finite_count();
            if bad > 0 {
                return Err(Error::NonFinite(bad));
            }
        }
        let r = kraus.len();
        let stack = Mat::from_fn(r * dout, din, |row, j| kraus[row / dout].get(row % dout, j));
        let wide = Mat::from_fn(dout, r * din, |i, c| kraus[c / din].get(i, c % din));
        let flat = Mat::from_fn(r, dout * din, |k, c| kraus[k].get(c / din, c % din));
        let gram = ComplexMatrix::from_faer(stack.adjoint() * stack.as_ref());
        let tp_defect = (&gram - &ComplexMatrix::identity(din)).max_abs();
        Ok(Self {
            dim_in: din,
            dim_out: dout,
            kraus,
            tp_defect,
            stack,
            wide,
            flat,
        })
    }

    /// Rescales the family by `(Σ A†A)^{-1/2}` so it is exactly complete.
    pub(crate) fn renormalized(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let raw = Self::from_kraus_unchecked(kraus)?;
        let gram = ComplexMatrix::from_faer(raw.stack.adjoint() * raw.stack.as_ref());
        let spec = eigh(&gram.hermitian_part())?;
        if spec.min() <= 1e-14 {
            return Err(Error::NotTracePreserving {
                defect: raw.tp_defect,
                tol: TP_TOL,
            });
        }
        let inv_sqrt = spec.map(|x| 1.0 / x.sqrt());
        let kraus = raw.kraus.iter().map(|a| a.matmul(&inv_sqrt)).collect();
        Self::from_kraus_unchecked(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Number of Kraus operators, which is the environment dimension.
    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `max |Σ A†A − I|`.
    pub fn tp_defect(&self) -> f64 {
        self.tp_defect
    }

    fn check_input(&self, m: &ComplexMatrix) -> Result<()> {
        check_square(m, self.dim_in)
    }

    pub fn apply(&self, s: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_trusted(
            self.apply_matrix(s.matrix())?,
        ))
    }

    /// The channel as a linear map on arbitrary `dim_in × dim_in` matrices.
    pub fn apply_matrix(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(s)?;
        let (din, dout, r) = (self.dim_in, self.dim_out, self.n_kraus());
        let ts = self.stack.as_ref() * s.as_faer();
        let tw = Mat::from_fn(dout, r * din, |i, c| ts[((c / din) * dout + i, c % din)]);
        Ok(ComplexMatrix::from_faer(tw.as_ref() * self.wide.adjoint()))
    }

    /// Heisenberg-picture map `X ↦ Σ A_k† X A_k`.
    pub fn dual_apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        let m = self.dual_apply_matrix(x.matrix())?;
        Ok(HermitianOperator::from_hermitian_unchecked(
            m.hermitian_part(),
        ))
    }

    pub fn dual_apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_square(x, self.dim_out)?;
        let (din, dout, r) = (self.dim_in, self.dim_out, self.n_kraus());
        let xw = x.as_faer() * self.wide.as_ref();
        let xs = Mat::from_fn(r * dout, din, |row, j| {
            xw[(row % dout, (row / dout) * din + j)]
        });
        Ok(ComplexMatrix::from_faer(self.stack.adjoint() * xs.as_ref()))
    }

    /// Environment state `(Φ_E[S])_{kl} = Tr(A_k S A_l†)`.
    pub fn complementary_apply(&self, s: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_trusted(
            self.complementary_matrix(s.matrix())?,
        ))
    }

    pub fn complementary_matrix(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(s)?;
        let (din, dout, r) = (self.dim_in, self.dim_out, self.n_kraus());
        let ts = self.stack.as_ref() * s.as_faer();
        let tf = Mat::from_fn(r, dout * din, |k, c| ts[(k * dout + c / din, c % din)]);
        Ok(ComplexMatrix::from_faer(tf.as_ref() * self.flat.adjoint()))
    }

    /// Dual of the complementary channel, `Y ↦ Σ_{kl} Y_{lk} A_l† A_k`.
    pub fn complementary_dual_matrix(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (din, dout, r) = (self.dim_in, self.dim_out, self.n_kraus());
        check_square(y, r)?;
        let m = y.as_faer() * self.flat.as_ref();
        let ms = Mat::from_fn(r * dout, din, |row, j| {
            m[(row / dout, (row % dout) * din + j)]
        });
        Ok(ComplexMatrix::from_faer(self.stack.adjoint() * ms.as_ref()))
    }

    /// Choi-type matrix `Σ_k vec(A_k) vec(A_k)†` with row-major `vec`.
    pub fn choi(&self) -> ComplexMatrix {
        ComplexMatrix::from_faer(self.flat.transpose() * self.flat.conjugate())
    }

    /// Minimal Kraus family from the eigendecomposition of [`Self::choi`].
    ///
    /// Eigenvalues below `1e-14` of the largest are dropped and the result is
    /// renormalized, so the channel changes by at most that dropped mass.
    /// With fewer operators than `dim_in · dim_out` the same spectrum is read
    /// off the smaller Gram matrix of the operators instead.
    pub fn reduce_kraus_rank(&self) -> Result<Self> {
        let (din, dout) = (self.dim_in, self.dim_out);
        let r = self.n_kraus();
        let kraus: Vec<ComplexMatrix> = if r < din * dout {
            // Choi = Fᵀ F̄ and conj(F F†) share their nonzero spectrum; an
            // eigenvector w of the latter gives the Kraus row wᵀF.
            let gram = ComplexMatrix::from_faer(self.flat.as_ref() * self.flat.adjoint()).conj();
            let spec = eigh(&gram.hermitian_part())?;
            let top = spec.max().max(0.0);
            let kept: Vec<usize> = (0..r)
                .rev()
                .filter(|&k| spec.eigenvalues()[k] > 1e-14 * top)
                .collect();
            let w = spec.eigenvectors();
            let wt = Mat::from_fn(kept.len(), r, |a, k| w.get(k, kept[a]));
            let rows = wt * self.flat.as_ref();
            (0..kept.len())
                .map(|a| ComplexMatrix::from_fn(dout, din, |i, j| rows[(a, i * din + j)]))
                .collect()
        } else {
            let spec = eigh(&self.choi().hermitian_part())?;
            let top = spec.max().max(0.0);
            let vecs = spec.eigenvectors();
            spec.eigenvalues()
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &mu)| mu > 1e-14 * top)
                .map(|(k, &mu)| {
                    let w = mu.sqrt();
                    ComplexMatrix::from_fn(dout, din, |i, j| vecs.get(i * din + j, k) * w)
                })
                .collect()
        };
        Self::renormalized(kraus)
    }

    /// Applies [`Self::reduce_kraus_rank`] only when it would shrink the
    /// environment, i.e. when there are more than `dim_in · dim_out` operators.
    pub fn compact(self) -> Result<Self> {
        if self.n_kraus() > self.dim_in * self.dim_out {
            self.reduce_kraus_rank()
        } else {
            Ok(self)
        }
    }

    /// `Φ ⊗ Ψ` with Kraus set `{A_i ⊗ B_j}`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_cap(self.dim_in * other.dim_in)?;
        check_cap(self.dim_out * other.dim_out)?;
        let mut kraus = Vec::with_capacity(self.n_kraus() * other.n_kraus());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Self::from_kraus_unchecked(kraus)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: inner.dim_out,
            });
        }
        let mut kraus = Vec::with_capacity(self.n_kraus() * inner.n_kraus());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a.matmul(b));
            }
        }
        Self::from_kraus_unchecked(kraus)
    }

    /// Restriction to the range of an isometry `V` (`dim_in × g`, `V†V = I`):
    /// Kraus set `{A_k V}`.
    pub fn restrict_input(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.nrows() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: v.nrows(),
            });
        }
        Self::from_kraus_unchecked(self.kraus.iter().map(|a| a.matmul(v)).collect())
    }
}

fn check_square(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    Ok(())
}

/// `F⁽ⁿ⁾ = F⊗I⊗…⊗I + … + I⊗…⊗I⊗F` on `n` copies.
pub fn constraint_tensor(f: &ConstraintObservable, n: usize) -> Result<ConstraintObservable> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "number of copies must be positive",
        });
    }
    let d = f.dim();
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d));
    check_cap(total.unwrap_or(usize::MAX))?;
    let mut acc = f.matrix().clone();
    let mut dim = d;
    for _ in 1..n {
        acc =
            &acc.kron(&ComplexMatrix::identity(d)) + &ComplexMatrix::identity(dim).kron(f.matrix());
        dim *= d;
    }
    ConstraintObservable::from_matrix(acc.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use crate::random::{random_channel, random_density, random_hermitian, seeded};

    #[test]
    fn layouts_agree_with_kraus_sums() {
        let mut rng = seeded(3);
        let ch = random_channel(&mut rng, 3, 2, 4);
        let s = random_density(&mut rng, 3, 3);
        let direct = ch
            .kraus_ops()
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, a| {
                &acc + &a.matmul(s.matrix()).matmul(&a.adjoint())
            });
        assert!((&direct - &ch.apply_matrix(s.matrix()).unwrap()).max_abs() < 1e-12);

        let x = random_hermitian(&mut rng, 2);
        let dual = ch
            .kraus_ops()
            .iter()
            .fold(ComplexMatrix::zeros(3, 3), |acc, a| {
                &acc + &a.adjoint().matmul(x.matrix()).matmul(a)
            });
        assert!((&dual - &ch.dual_apply_matrix(x.matrix()).unwrap()).max_abs() < 1e-12);

        let env = ch.complementary_matrix(s.matrix()).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let a = &ch.kraus_ops()[k];
                let b = &ch.kraus_ops()[l];
                let want = a.matmul(s.matrix()).matmul(&b.adjoint()).trace();
                assert!((env.get(k, l) - want).norm() < 1e-12);
            }
        }

        // pairing for the complementary dual
        let y = random_hermitian(&mut rng, 4);
        let lhs = env.trace_product(y.matrix());
        let rhs = s
            .matrix()
            .trace_product(&ch.complementary_dual_matrix(y.matrix()).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn reduction_preserves_the_channel() {
        let mut rng = seeded(11);
        let ch = random_channel(&mut rng, 2, 2, 7);
        let small = ch.reduce_kraus_rank().unwrap();
        assert!(small.n_kraus() <= 4);
        let s = random_density(&mut rng, 2, 2);
        let a = ch.apply(&s).unwrap();
        let b = small.apply(&s).unwrap();
        assert!((a.matrix() - b.matrix()).max_abs() < 1e-10);
        assert!(small.tp_defect() < 1e-12);
    }

    #[test]
    fn duplicated_operators_reduce_through_the_gram_route() {
        let ad = amplitude_damping(0.3).unwrap();
        let [a0, a1] = [&ad.kraus_ops()[0], &ad.kraus_ops()[1]];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ch = KrausChannel::new(vec![a0.scale(h), a0.scale(h), a1.clone()]).unwrap();
        let small = ch.reduce_kraus_rank().unwrap();
        assert_eq!(small.n_kraus(), 2);
        assert!((&small.choi() - &ad.choi()).max_abs() < 1e-12);
    }

    #[test]
    fn constraint_tensor_spectrum() {
        let f = ConstraintObservable::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let f2 = constraint_tensor(&f, 2).unwrap();
        let ev = eigvalsh(f2.matrix()).unwrap();
        let want = [0.0, 1.0, 1.0, 2.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let f1 = constraint_tensor(&f, 1).unwrap();
        assert!((f1.matrix() - f.matrix()).max_abs() < 1e-15);
        let f3 = constraint_tensor(&f, 3).unwrap();
        assert!(f3.min_eigenvalue().abs() < 1e-12);
    }

    #[test]
    fn non_complete_family_is_rejected() {
        let a = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            KrausChannel::new(vec![a]),
            Err(Error::NotTracePreserving { .. })
        ));
        assert!(matches!(
            KrausChannel::new(vec![]),
            Err(Error::EmptyChannel)
        ));
    }
}
