//! Seeded random instances: states, Hermitian operators and channels.
//!
//! Used by the verification suites, the property tests and the examples.
//! Everything is driven by a [`ChaCha8Rng`] so results are reproducible
//! across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::linalg::{eigh, ComplexMatrix, C64};
use crate::state::{DensityMatrix, HermitianOperator};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Induced-measure random state `G G† / Tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, rank.max(1));
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    DensityMatrix::from_matrix_trusted(m.scale(1.0 / t))
}

/// Full-rank random state whose smallest eigenvalue is at least `floor`.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, floor: f64) -> DensityMatrix {
    let s = random_density(rng, dim, dim);
    let mixed = DensityMatrix::maximally_mixed(dim);
    let w = (floor * dim as f64).min(1.0);
    s.mix(&mixed, w).expect("same dimension")
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = ginibre(rng, dim, dim);
    HermitianOperator::from_hermitian_unchecked(&g + &g.adjoint())
}

/// Random Hermitian direction with zero trace and unit Frobenius norm.
pub fn random_trace_zero_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let h = random_hermitian(rng, dim);
    let shift = h.matrix().trace().re / dim as f64;
    let m = &h.into_matrix() - &ComplexMatrix::identity(dim).scale(shift);
    let n = m.frobenius_norm();
    HermitianOperator::from_hermitian_unchecked(m.scale(1.0 / n))
}

/// Haar-random unitary via eigenvectors of a GUE matrix with random phases.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim);
    let spec = eigh(h.matrix()).expect("hermitian eigensolve");
    let phases: Vec<f64> = (0..dim)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    let v = spec.eigenvectors();
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        v.get(i, j) * C64::from_polar(1.0, phases[j])
    })
}

/// Random channel from a random isometry `C^din → C^dout ⊗ C^r`.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    dim_in: usize,
    dim_out: usize,
    n_kraus: usize,
) -> KrausChannel {
    let g = ginibre(rng, dim_out * n_kraus, dim_in);
    let gram = HermitianOperator::from_hermitian_unchecked(g.adjoint().matmul(&g));
    let inv_sqrt = eigh(gram.matrix())
        .expect("gram eigensolve")
        .map(|x| 1.0 / x.sqrt());
    let iso = g.matmul(&inv_sqrt);
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |i, j| iso.get(k * dim_out + i, j)))
        .collect();
    KrausChannel::new(kraus).expect("isometry gives a trace-preserving family")
}

/// Positive observable with the given spectrum in a random basis.
pub fn random_observable_matrix<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> ComplexMatrix {
    let u = random_unitary(rng, spectrum.len());
    let d = ComplexMatrix::from_real_diagonal(spectrum);
    u.matmul(&d).matmul(&u.adjoint()).hermitian_part()
}
