use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::eig_hermitian;
use super::matrix::{kron, ComplexMatrix};
use super::{DEFAULT_TOL, MAX_HILBERT_DIM};
use crate::error::{Error, Result};

/// Local dimensions of the tensor factors of a Hilbert space.
///
/// The leftmost factor is the most significant: a joint index is
/// `i = i₁·d₂⋯d_N + i₂·d₃⋯d_N + … + i_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimProfile {
    dims: Vec<usize>,
}

impl DimProfile {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("dimension profile is empty".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "dimension profile {dims:?} contains a zero"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > MAX_HILBERT_DIM {
            return Err(Error::DimensionCap(total));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    pub fn concat_all<'a>(profiles: impl IntoIterator<Item = &'a DimProfile>) -> Result<Self> {
        let dims: Vec<usize> = profiles
            .into_iter()
            .flat_map(|p| p.dims.iter().copied())
            .collect();
        Self::new(dims)
    }

    /// Profile restricted to the given subsystems, in their original order.
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        let mut idx = keep.to_vec();
        idx.sort_unstable();
        idx.dedup();
        for &k in &idx {
            self.check_index(k)?;
        }
        Self::new(idx.iter().map(|&k| self.dims[k]).collect())
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::InvalidSubsystem {
                index,
                len: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Splits a joint index into per-subsystem digits.
    pub(crate) fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub(crate) fn join(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

impl TryFrom<Vec<usize>> for DimProfile {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<DimProfile> for Vec<usize> {
    fn from(p: DimProfile) -> Self {
        p.dims
    }
}

impl fmt::Display for DimProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityViolation {
    NotSquare,
    ProfileMismatch,
    NotHermitian,
    TraceNotOne,
    NegativeEigenvalue,
}

/// Outcome of [`is_density`], with the measured quantities behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub violations: Vec<DensityViolation>,
}

impl DensityCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v {
                DensityViolation::NotSquare => "matrix is not square".to_string(),
                DensityViolation::ProfileMismatch => "profile does not match dimension".to_string(),
                DensityViolation::NotHermitian => {
                    format!("not Hermitian (deviation {:e})", self.hermitian_deviation)
                }
                DensityViolation::TraceNotOne => {
                    format!("trace deviates from 1 by {:e}", self.trace_deviation)
                }
                DensityViolation::NegativeEigenvalue => {
                    format!("negative eigenvalue {:e}", self.min_eigenvalue)
                }
            })
            .collect();
        parts.join("; ")
    }
}

/// Checks the three density-operator invariants at tolerance `tol`.
pub fn is_density(m: &ComplexMatrix, profile: &DimProfile, tol: f64) -> DensityCheck {
    let mut check = DensityCheck {
        hermitian_deviation: f64::NAN,
        trace_deviation: f64::NAN,
        min_eigenvalue: f64::NAN,
        violations: Vec::new(),
    };
    if !m.is_square() {
        check.violations.push(DensityViolation::NotSquare);
        return check;
    }
    if profile.total() != m.rows() {
        check.violations.push(DensityViolation::ProfileMismatch);
    }
    check.hermitian_deviation = m.hermitian_deviation();
    if check.hermitian_deviation > tol {
        check.violations.push(DensityViolation::NotHermitian);
    }
    check.trace_deviation = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    if check.trace_deviation > tol {
        check.violations.push(DensityViolation::TraceNotOne);
    }
    // Eigenvalues of the Hermitian part; an anti-Hermitian residue is already reported.
    if let Ok(eig) = eig_hermitian(&m.hermitian_part()) {
        check.min_eigenvalue = eig.values[0];
        if check.min_eigenvalue < -tol {
            check.violations.push(DensityViolation::NegativeEigenvalue);
        }
    }
    check
}

/// Hermitian, positive semidefinite, unit-trace matrix with a subsystem profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    profile: DimProfile,
    tolerance: f64,
}

impl DensityOperator {
    /// Validates at the default tolerance.
    pub fn new(matrix: ComplexMatrix, profile: DimProfile) -> Result<Self> {
        Self::with_tolerance(matrix, profile, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        matrix: ComplexMatrix,
        profile: DimProfile,
        tolerance: f64,
    ) -> Result<Self> {
        if profile.total() != matrix.rows() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "profile {profile} does not describe a {}x{} matrix",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let check = is_density(&matrix, &profile, tolerance);
        if !check.is_valid() {
            return Err(Error::NotDensity(check.describe()));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            profile,
            tolerance,
        })
    }

    /// Density operator on a single subsystem of dimension `matrix.rows()`.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let profile = DimProfile::single(matrix.rows())?;
        Self::new(matrix, profile)
    }

    /// Wraps the output of an operation that provably preserves the density
    /// invariants; only Hermitian symmetrization is applied.
    pub(crate) fn trusted(matrix: ComplexMatrix, profile: DimProfile, tolerance: f64) -> Self {
        debug_assert_eq!(matrix.rows(), profile.total());
        Self {
            matrix: matrix.hermitian_part(),
            profile,
            tolerance,
        }
    }

    pub fn pure(amplitudes: &[Complex64], profile: DimProfile) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new(ComplexMatrix::outer(&psi, &psi), profile)
    }

    pub fn maximally_mixed(profile: DimProfile) -> Self {
        let d = profile.total();
        Self::trusted(
            ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            profile,
            DEFAULT_TOL,
        )
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Same matrix under a different factorization of the same dimension.
    pub fn with_profile(&self, profile: DimProfile) -> Result<Self> {
        if profile.total() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "profile {profile} does not match dimension {}",
                self.dim()
            )));
        }
        Ok(Self {
            matrix: self.matrix.clone(),
            profile,
            tolerance: self.tolerance,
        })
    }

    /// `self ⊗ other` with concatenated profiles.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let profile = self.profile.concat(&other.profile)?;
        Ok(Self::trusted(
            kron(&self.matrix, &other.matrix),
            profile,
            self.tolerance.max(other.tolerance),
        ))
    }

    pub fn tensor_all<'a>(states: impl IntoIterator<Item = &'a DensityOperator>) -> Result<Self> {
        let mut it = states.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty tensor product".into()))?
            .clone();
        it.try_fold(first, |acc, s| acc.tensor(s))
    }
}

/// `|index⟩⟨index|` in dimension `dim`.
pub fn basis_projector(dim: usize, index: usize) -> Result<ComplexMatrix> {
    if dim == 0 || index >= dim {
        return Err(Error::InvalidArgument(format!(
            "basis index {index} out of range for dimension {dim}"
        )));
    }
    let mut diag = vec![0.0; dim];
    diag[index] = 1.0;
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Computational basis vector `|index⟩`.
pub fn basis_ket(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// `|φ⁺⟩ = Σ_i |ii⟩/√d` as a density operator on `d ⊗ d`.
pub fn max_entangled(d: usize) -> Result<DensityOperator> {
    let mut amp = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amp[i * d + i] = Complex64::new(1.0, 0.0);
    }
    DensityOperator::pure(&amp, DimProfile::new(vec![d, d])?)
}

/// Uniform superposition `Σ_x |x⟩/√d`.
pub fn max_coherent(d: usize) -> Result<DensityOperator> {
    let amp = vec![Complex64::new(1.0, 0.0); d];
    DensityOperator::pure(&amp, DimProfile::single(d)?)
}
