//! Real coordinates for Hermitian operators.
//!
//! The orthonormal basis (under `Tr(A†B)`) is `E_jj` for each `j`, followed by
//! `(E_jk + E_kj)/√2` and `i(E_jk − E_kj)/√2` for each `j < k` in
//! lexicographic order. Coordinates of a Hermitian `X` are therefore
//! `X_jj`, `√2·Re X_jk`, `√2·Im X_jk`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

pub fn hermitian_coords(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(m.get(j, j).re);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            // Hermitian part of the pair, so near-Hermitian noise averages out.
            let z = (m.get(j, k) + m.get(k, j).conj()) * 0.5;
            out.push(SQRT_2 * z.re);
            out.push(SQRT_2 * z.im);
        }
    }
    out
}

pub fn from_hermitian_coords(coords: &[f64], d: usize) -> ComplexMatrix {
    assert_eq!(coords.len(), d * d, "coordinate vector length");
    let mut m = ComplexMatrix::zeros(d, d);
    for (j, &x) in coords[..d].iter().enumerate() {
        m.set(j, j, Complex64::new(x, 0.0));
    }
    let mut pos = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = Complex64::new(coords[pos], coords[pos + 1]) / SQRT_2;
            m.set(j, k, z);
            m.set(k, j, z.conj());
            pos += 2;
        }
    }
    m
}

/// Basis element `k` of the Hermitian operator basis in dimension `d`.
pub fn hermitian_basis_element(d: usize, k: usize) -> ComplexMatrix {
    let mut coords = vec![0.0; d * d];
    coords[k] = 1.0;
    from_hermitian_coords(&coords, d)
}
