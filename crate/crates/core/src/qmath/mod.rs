//! Dense complex linear algebra on small Hilbert spaces.

mod eig;
mod matrix;
mod opspace;
mod random;
mod state;
mod subsystems;

pub use eig::{eig_hermitian, min_eigenvalue, HermitianEigen, HERMITIAN_INPUT_TOL};
pub use matrix::{kron, kron_all, ComplexMatrix};
pub use opspace::{from_hermitian_coords, hermitian_basis_element, hermitian_coords};
pub use random::{random_density, SeededStream};
pub use state::{
    basis_ket, basis_projector, is_density, max_coherent, max_entangled, DensityCheck,
    DensityOperator, DensityViolation, DimProfile,
};
pub use subsystems::{
    partial_trace, partial_trace_matrix, partial_transpose, partial_transpose_matrix,
};

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute validation tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest total Hilbert-space dimension any profile may describe.
pub const MAX_HILBERT_DIM: usize = 64;

/// `½ Σ |λ_k(ρ − σ)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    trace_distance_matrices(rho.matrix(), sigma.matrix())
}

/// Trace distance between two Hermitian matrices of equal size.
pub fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let diff = (a - b).hermitian_part();
    if diff.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let eig = eig_hermitian(&diff)?;
    Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
}
