//! Fock-truncated bosonic channel `a → a + ξ` with complex Gaussian noise.
//!
//! The channel is the noise average of displacements,
//! `Φ[S] = ∫ D(ζ) S D(ζ)† (πN)⁻¹ e^{−|ζ|²/N} d²ζ`, discretized with a polar
//! product rule: Gauss–Laguerre in `x = |ζ|²/N` and the trapezoid rule in
//! the angle. Each node contributes one Kraus operator `√w D(ζ)` restricted
//! to the lowest `cutoff` Fock states. Truncation leaks weight out of the
//! cutoff space, so the family is renormalized by `(Σ A†A)^{-1/2}`.

use serde::{Deserialize, Serialize};

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{eigh, real, ComplexMatrix, C64, ZERO};
use crate::state::DensityMatrix;

/// Largest completeness defect tolerated after renormalization.
pub const GAUSSIAN_TP_TOL: f64 = 1e-6;

fn default_buffer() -> usize {
    8
}
fn default_radial() -> usize {
    24
}
fn default_angular() -> usize {
    32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianNoiseSpec {
    /// Mean photon number `N` of the noise.
    pub noise_photons: f64,
    pub cutoff: usize,
    #[serde(default = "default_buffer")]
    pub buffer: usize,
    #[serde(default = "default_radial")]
    pub radial_nodes: usize,
    #[serde(default = "default_angular")]
    pub angular_nodes: usize,
}

impl GaussianNoiseSpec {
    /// Default quadrature (24 × 32 nodes) and buffer 8.
    pub fn new(noise_photons: f64, cutoff: usize) -> Self {
        Self {
            noise_photons,
            cutoff,
            buffer: default_buffer(),
            radial_nodes: default_radial(),
            angular_nodes: default_angular(),
        }
    }

    pub fn with_nodes(mut self, radial: usize, angular: usize) -> Self {
        self.radial_nodes = radial;
        self.angular_nodes = angular;
        self
    }

    pub fn with_buffer(mut self, buffer: usize) -> Self {
        self.buffer = buffer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, reason| {
            Err(Error::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if !(self.noise_photons > 0.0 && self.noise_photons.is_finite()) {
            return bad(
                "noise_photons",
                self.noise_photons,
                "must be positive and finite",
            );
        }
        if self.cutoff < 2 {
            return bad("cutoff", self.cutoff as f64, "must be at least 2");
        }
        if self.buffer < 4 {
            return bad("buffer", self.buffer as f64, "must be at least 4");
        }
        if self.radial_nodes == 0 {
            return bad("radial_nodes", 0.0, "must be positive");
        }
        if self.angular_nodes == 0 {
            return bad("angular_nodes", 0.0, "must be positive");
        }
        Ok(())
    }
}

/// Channel plus the leakage measured before renormalization.
#[derive(Clone, Debug)]
pub struct GaussianBuild {
    pub channel: KrausChannel,
    /// `max |Σ A†A − I|` of the truncated displacements before rescaling.
    pub raw_defect: f64,
}

/// Gauss–Laguerre nodes and weights for `∫₀^∞ f(x) e^{−x} dx`
/// (Golub–Welsch). Weights sum to one.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let jacobi = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            real((2 * i + 1) as f64)
        } else if i.abs_diff(j) == 1 {
            real((i.max(j)) as f64)
        } else {
            ZERO
        }
    });
    let spec = eigh(&jacobi)?;
    let vecs = spec.eigenvectors();
    let nodes = spec.eigenvalues().to_vec();
    let weights = (0..n).map(|k| vecs.get(0, k).norm_sqr()).collect();
    Ok((nodes, weights))
}

/// Displacement operator `exp(ζa† − ζ̄a)` in Fock dimension `dim`, computed
/// by exact exponentiation of the Hermitian generator.
pub fn displacement(zeta: C64, dim: usize) -> Result<ComplexMatrix> {
    let r = zeta.norm();
    let theta = zeta.arg();
    let d_r = real_displacement(r, dim)?;
    Ok(ComplexMatrix::from_fn(dim, dim, |m, n| {
        d_r.get(m, n) * C64::from_polar(1.0, theta * (m as f64 - n as f64))
    }))
}

fn real_displacement(r: f64, dim: usize) -> Result<ComplexMatrix> {
    // exp(r(a† − a)) = exp(iH) with H = −i r (a† − a)
    let h = ComplexMatrix::from_fn(dim, dim, |m, n| {
        if m == n + 1 {
            C64::new(0.0, -r * (m as f64).sqrt())
        } else if n == m + 1 {
            C64::new(0.0, r * (n as f64).sqrt())
        } else {
            ZERO
        }
    });
    Ok(eigh(&h)?.map_complex(|x| C64::from_polar(1.0, x)))
}

/// Builds the truncated classical-noise channel.
pub fn gaussian_classical_noise(spec: &GaussianNoiseSpec) -> Result<KrausChannel> {
    Ok(build_gaussian(spec)?.channel)
}

/// Like [`gaussian_classical_noise`] but also reports the raw leakage.
pub fn build_gaussian(spec: &GaussianNoiseSpec) -> Result<GaussianBuild> {
    spec.validate()?;
    let d = spec.cutoff;
    let big = d + spec.buffer;
    let na = spec.angular_nodes;
    let (nodes, weights) = gauss_laguerre(spec.radial_nodes)?;
    let mut kraus = Vec::with_capacity(nodes.len() * na);
    for (&x, &w) in nodes.iter().zip(&weights) {
        let d_r = real_displacement((spec.noise_photons * x).sqrt(), big)?;
        for k in 0..na {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / na as f64;
            let s = (w / na as f64).sqrt();
            kraus.push(ComplexMatrix::from_fn(d, d, |m, n| {
                d_r.get(m, n) * C64::from_polar(s, theta * (m as f64 - n as f64))
            }));
        }
    }
    let raw_defect = KrausChannel::from_kraus_unchecked(kraus.clone())?.tp_defect();
    // the quadrature family is far from minimal; shrinking it speeds up every
    // later environment computation
    let channel = KrausChannel::renormalized(kraus)?.reduce_kraus_rank()?;
    if !(channel.tp_defect() <= GAUSSIAN_TP_TOL) {
        return Err(Error::GaussianDefect {
            defect: channel.tp_defect(),
        });
    }
    Ok(GaussianBuild {
        channel,
        raw_defect,
    })
}

/// `g(x) = (x+1) ln(x+1) − x ln x`, the entropy of a thermal state with mean
/// photon number `x`.
pub fn thermal_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).ln() - x * x.ln()
}

/// Thermal state of mean photon number `mean`, truncated to `dim` levels
/// and renormalized.
pub fn thermal_state(mean: f64, dim: usize) -> Result<DensityMatrix> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mean",
            value: mean,
            reason: "must be nonnegative and finite",
        });
    }
    let q = mean / (mean + 1.0);
    let p: Vec<f64> = (0..dim).map(|n| q.powi(n as i32)).collect();
    let total: f64 = p.iter().sum();
    DensityMatrix::from_diagonal(&p.iter().map(|x| x / total).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::ConstraintObservable;

    fn entropy(s: &DensityMatrix) -> f64 {
        s.eigenvalues()
            .unwrap()
            .iter()
            .filter(|&&x| x > 1e-12)
            .map(|x| -x * x.ln())
            .sum()
    }

    #[test]
    fn laguerre_rule_integrates_moments() {
        let (x, w) = gauss_laguerre(12).unwrap();
        // ∫ x^k e^{-x} = k!
        let mut fact = 1.0;
        for k in 0..10 {
            if k > 0 {
                fact *= k as f64;
            }
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - fact).abs() < 1e-9 * fact, "moment {k}: {q} vs {fact}");
        }
    }

    #[test]
    fn displacement_moves_the_vacuum() {
        let z = C64::new(0.3, -0.4);
        let d = displacement(z, 30).unwrap();
        // coherent state amplitudes e^{-|z|²/2} z^n / √n!
        let mut amp = (-z.norm_sqr() / 2.0).exp();
        for n in 0..6 {
            if n > 0 {
                amp /= (n as f64).sqrt();
            }
            let want = z.powu(n as u32) * amp;
            assert!((d.get(n, 0) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn weak_noise_is_nearly_identity() {
        let ch = gaussian_classical_noise(&GaussianNoiseSpec::new(1e-9, 6)).unwrap();
        let s = thermal_state(0.2, 6).unwrap();
        let out = ch.apply(&s).unwrap();
        assert!(out.trace_norm_distance(&s).unwrap() <= 1e-4);
    }

    #[test]
    fn vacuum_gains_noise_photons() {
        let ch = gaussian_classical_noise(&GaussianNoiseSpec::new(1.0, 30)).unwrap();
        let out = ch.apply(&DensityMatrix::basis(30, 0)).unwrap();
        let n = ConstraintObservable::number_operator(30).unwrap();
        let mean = n.operator().expectation(&out);
        assert!((mean - 1.0).abs() < 2e-3, "mean {mean}");
    }

    #[test]
    fn refinement_ladder_improves_the_entropy_oracle() {
        let target = thermal_entropy(2.0);
        let mut last = f64::INFINITY;
        for (nr, na) in [(4, 8), (12, 16), (24, 32)] {
            let spec = GaussianNoiseSpec::new(1.0, 24).with_nodes(nr, na);
            let b = build_gaussian(&spec).unwrap();
            assert!(b.channel.tp_defect() <= GAUSSIAN_TP_TOL);
            let out = b.channel.apply(&thermal_state(1.0, 24).unwrap()).unwrap();
            let err = (entropy(&out) - target).abs();
            assert!(err <= last + 1e-9, "{nr}x{na}: {err} after {last}");
            last = err;
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(GaussianNoiseSpec::new(1.0, 1).validate().is_err());
        assert!(GaussianNoiseSpec::new(0.0, 4).validate().is_err());
        assert!(GaussianNoiseSpec::new(1.0, 4)
            .with_buffer(2)
            .validate()
            .is_err());
    }
}
