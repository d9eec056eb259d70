//! Seeded random matrices for the verification suites.
//!
//! The generator is xoshiro256** (Blackman & Vigna). Every sample of a suite draws from its
//! own stream, seeded by `splitmix64(master_seed ^ splitmix64(sample_index))` through
//! [`derive_rng`], so a sample's content does not depend on which samples were drawn before
//! it or on the thread that evaluates it. Streams are reproducible within this
//! implementation; bit equality with other implementations is not promised.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64, ZERO};

/// Reproducibility contract of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub master_seed: u64,
    pub dims: Vec<usize>,
    pub samples: usize,
    #[serde(with = "crate::report::float17")]
    pub tol: f64,
    #[serde(with = "crate::report::float17")]
    pub floor: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            dims: vec![2, 2, 2],
            samples: 200,
            tol: 1e-9,
            floor: 1e-12,
        }
    }
}

impl SampleConfig {
    pub fn new(master_seed: u64, dims: Vec<usize>, samples: usize) -> Self {
        Self {
            master_seed,
            dims,
            samples,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "dims must be a non-empty list of positive integers, got {:?}",
                self.dims
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!("tol {} not in (0, 1)", self.tol)));
        }
        if !(self.floor > 0.0 && self.floor <= self.tol) {
            return Err(Error::InvalidConfig(format!(
                "floor {} not in (0, tol]",
                self.floor
            )));
        }
        Ok(())
    }
}

/// One splitmix64 step: the finalizer applied to `z + golden gamma`.
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256** stream with the floating-point draws the samplers need.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256StarStar,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize % n
    }

    /// Standard complex Gaussian (E|z|² = 1) by Box-Muller.
    pub fn complex_normal(&mut self) -> C64 {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        C64::new(r * theta.cos(), r * theta.sin())
    }
}

pub fn derive_rng(master_seed: u64, sample_index: u64) -> Rng {
    Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(sample_index)))
}

/// `rows × cols` matrix of independent standard complex Gaussians.
pub fn random_gaussian(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

/// Square Ginibre matrix.
pub fn random_ginibre(d: usize, rng: &mut Rng) -> ComplexMatrix {
    random_gaussian(d, d, rng)
}

/// `G G* / Tr(G G*)` for Ginibre `G` (Hilbert-Schmidt measure).
pub fn random_density(d: usize, rng: &mut Rng) -> HermitianMatrix {
    let g = random_ginibre(d, rng);
    let gram = &g * &g.adjoint();
    let tr = gram.trace().re;
    HermitianMatrix::symmetrize(gram.scale(1.0 / tr))
}

/// Rank-one projector onto a uniformly random unit vector.
pub fn random_pure(d: usize, rng: &mut Rng) -> HermitianMatrix {
    let v: Vec<C64> = (0..d).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
    HermitianMatrix::symmetrize(ComplexMatrix::outer(&v, &v))
}

/// Haar unitary: Gram-Schmidt QR of a Ginibre matrix.
///
/// Modified Gram-Schmidt makes every diagonal entry of R real and positive, which is the
/// phase normalization that turns the Q factor into a Haar sample. One re-orthogonalization
/// pass keeps `U*U = I` at rounding level.
pub fn random_unitary(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = random_ginibre(d, rng);
    let mut cols: Vec<Vec<C64>> = (0..d).map(|j| g.column(j)).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `U diag(λ) U*` with λ uniform in `[lo, hi]` and Haar `U`.
pub fn random_pd(d: usize, rng: &mut Rng, lo: f64, hi: f64) -> HermitianMatrix {
    let lambdas: Vec<f64> = (0..d).map(|_| rng.uniform_in(lo, hi)).collect();
    let u = random_unitary(d, rng);
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = ZERO;
            for (k, &l) in lambdas.iter().enumerate() {
                acc += u[(i, k)] * u[(j, k)].conj() * l;
            }
            out[(i, j)] = acc;
        }
    }
    HermitianMatrix::symmetrize(out)
}

/// Default spectrum window for positive definite samples.
pub const PD_SPECTRUM: (f64, f64) = (0.1, 10.0);

/// Identity weight used to push sampled states to full rank in log-based suites.
pub const EPSILON_MIX: f64 = 1e-3;

/// `(1 − ε)ρ + ε I/d`.
pub fn mix_with_identity(rho: &HermitianMatrix, eps: f64) -> HermitianMatrix {
    let d = rho.dim();
    rho.mix(&HermitianMatrix::identity(d).scale(1.0 / d as f64), 1.0 - eps)
}

/// Random Hermitian matrix `(G + G*)/2`.
pub fn random_hermitian(d: usize, rng: &mut Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrize(random_ginibre(d, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, min_eigenvalue};

    #[test]
    fn derived_streams_are_deterministic_and_distinct() {
        let mut a = derive_rng(42, 0);
        let mut b = derive_rng(42, 0);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(derive_rng(42, 0).next_u64(), derive_rng(42, 1).next_u64());
        assert_ne!(derive_rng(42, 0).next_u64(), derive_rng(43, 0).next_u64());
    }

    #[test]
    fn derived_stream_ignores_prior_draws() {
        let mut prev = derive_rng(9, 4);
        let _ = random_ginibre(3, &mut prev);
        let fresh = random_ginibre(3, &mut derive_rng(9, 5));
        let again = random_ginibre(3, &mut derive_rng(9, 5));
        assert_eq!(fresh, again);
    }

    #[test]
    fn ginibre_shape_and_bit_determinism() {
        let g = random_ginibre(2, &mut derive_rng(42, 0));
        assert_eq!(g.shape(), (2, 2));
        let h = random_ginibre(2, &mut derive_rng(42, 0));
        let bits = |m: &ComplexMatrix| -> Vec<(u64, u64)> {
            m.data().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
        };
        assert_eq!(bits(&g), bits(&h));
    }

    #[test]
    fn ginibre_mean_vanishes() {
        // Law of large numbers: mean of N·d² unit-variance entries within 5/√(N·d²).
        let n = 10_000;
        let d = 2;
        let mut rng = derive_rng(1, 0);
        let mut sum = ZERO;
        let mut second = 0.0;
        for _ in 0..n {
            let g = random_ginibre(d, &mut rng);
            for z in g.data() {
                sum += z;
                second += z.norm_sqr();
            }
        }
        let count = (n * d * d) as f64;
        assert!((sum / count).norm() < 5.0 / count.sqrt());
        assert!((second / count - 1.0).abs() < 0.05);
    }

    #[test]
    fn density_invariants() {
        assert_eq!(
            random_density(1, &mut derive_rng(3, 3)).as_matrix(),
            &ComplexMatrix::identity(1)
        );
        for d in 1..=6 {
            for s in 0..10 {
                let rho = random_density(d, &mut derive_rng(s, d as u64));
                assert!((rho.real_trace() - 1.0).abs() < 1e-14);
                assert!(min_eigenvalue(&rho).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn pd_spectrum_window() {
        let mut rng = derive_rng(5, 0);
        for d in 1..=5 {
            let a = random_pd(d, &mut rng, 0.1, 10.0);
            let sd = hermitian_eig(&a).unwrap();
            assert!(sd.min() >= 0.1 - 1e-10 && sd.max() <= 10.0 + 1e-10);
        }
        let two = random_pd(1, &mut rng, 2.0, 2.0);
        assert!((two[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = derive_rng(11, 0);
        for d in 1..=8 {
            let u = random_unitary(d, &mut rng);
            let err = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(d)).max_abs();
            assert!(err < 1e-12, "d={d} err={err}");
        }
        let u1 = random_unitary(1, &mut rng);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixing_lifts_spectrum() {
        let mut rng = derive_rng(2, 2);
        let pure = random_pure(4, &mut rng);
        let mixed = mix_with_identity(&pure, EPSILON_MIX);
        assert!(min_eigenvalue(&mixed).unwrap() >= EPSILON_MIX / 4.0 - 1e-12);
        assert!((mixed.real_trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(SampleConfig::default().validate().is_ok());
        let c = SampleConfig { samples: 0, ..SampleConfig::default() };
        assert!(c.validate().is_err());
        let c = SampleConfig::default().with_tol(2.0);
        assert!(c.validate().is_err());
        let c = SampleConfig { floor: 1e-6, ..SampleConfig::default() };
        assert!(c.validate().is_err());
        let c = SampleConfig::new(1, vec![], 3);
        assert!(c.validate().is_err());
    }
}
