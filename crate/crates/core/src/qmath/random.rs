//! Seeded sampling for property checks.
//!
//! The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
//! Each standard complex-Gaussian entry consumes two uniforms `u₁, u₂`
//! and applies Box–Muller: `r = √(−2 ln(1 − u₁))`, real part `r·cos(2πu₂)/√2`,
//! imaginary part `r·sin(2πu₂)/√2` (unit total variance). Entries are drawn
//! in row-major order.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::ComplexMatrix;
use super::state::{DensityOperator, DimProfile};
use super::DEFAULT_TOL;
use crate::error::Result;

/// Deterministic random stream; identical seeds give bit-identical draws.
#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c * FRAC_1_SQRT_2, r * s * FRAC_1_SQRT_2)
    }

    pub fn ginibre_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// `G·G† / Tr(G·G†)` for a square Ginibre `G`.
    pub fn ginibre_state(&mut self, profile: &DimProfile) -> DensityOperator {
        let d = profile.total();
        let g = self.ginibre_matrix(d, d);
        let gg = g.matmul(&g.adjoint());
        let tr = gg.trace().re;
        DensityOperator::trusted(gg.scale_real(1.0 / tr), profile.clone(), DEFAULT_TOL)
    }

    /// Haar-random pure state (normalized Gaussian vector).
    pub fn pure_state(&mut self, profile: &DimProfile) -> DensityOperator {
        let d = profile.total();
        let v: Vec<Complex64> = (0..d).map(|_| self.complex_gaussian()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        DensityOperator::trusted(ComplexMatrix::outer(&v, &v), profile.clone(), DEFAULT_TOL)
    }

    /// Random Hermitian matrix `(G + G†)/2`.
    pub fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        self.ginibre_matrix(dim, dim).hermitian_part()
    }

    /// Random probability vector of length `n` (normalized exponentials).
    pub fn probabilities(&mut self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }
}

/// Ginibre density operator of dimension `dim` drawn from the stream seeded by `seed`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityOperator> {
    let profile = DimProfile::single(dim)?;
    Ok(SeededStream::new(seed).ginibre_state(&profile))
}
