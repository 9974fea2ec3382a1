//! Affine- and convex-hull feasibility over a finite generator set.
//!
//! Operators are mapped to real Hermitian coordinates, so `Σ t_a σ_a = ρ`
//! becomes a real linear system `A t = b`; the normalization `Σ t_a = 1` is
//! appended as one more row. The affine case is a least-squares solve; the
//! convex case adds `t ≥ 0` and is solved by Lawson–Hanson active-set NNLS.

use nalgebra::{DMatrix, DVector};

use super::{Certificate, GeneratorSet, MembershipVerdict, Verdict};
use crate::error::{Error, Result};
use crate::qmath::{hermitian_coords, Complex64, ComplexMatrix, DensityOperator};

/// Default residual bound for hull membership.
pub const HULL_TOL: f64 = 1e-8;

fn system(rho: &DensityOperator, gens: &GeneratorSet) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let d = rho.dim();
    if gens.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {d} against generators of dimension {}",
            gens.dim()
        )));
    }
    let m = gens.len();
    let n = d * d + 1;
    let mut a = DMatrix::<f64>::zeros(n, m);
    for (j, g) in gens.states().iter().enumerate() {
        for (i, c) in hermitian_coords(g.matrix()).into_iter().enumerate() {
            a[(i, j)] = c;
        }
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    for (i, c) in hermitian_coords(rho.matrix()).into_iter().enumerate() {
        b[i] = c;
    }
    b[n - 1] = 1.0;
    Ok((a, b))
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    svd.solve(b, eps)
        .map_err(|e| Error::Numerical(e.to_string()))
}

/// Lawson–Hanson non-negative least squares: `min ‖A x − b‖` s.t. `x ≥ 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let grad_tol = 1e-14 * (a.norm() * b.norm()).max(1.0);
    let max_outer = 30 * n.max(1);

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let j = match candidate {
            Some(j) if w[j] > grad_tol => j,
            _ => break,
        };
        passive[j] = true;

        loop {
            let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(&cols);
            let zp = least_squares(&sub, b)?;
            let mut z = DVector::<f64>::zeros(n);
            for (pos, &k) in cols.iter().enumerate() {
                z[k] = zp[pos];
            }
            if cols.iter().all(|&k| z[k] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &k in &cols {
                if z[k] <= 0.0 {
                    let denom = x[k] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x = &x + (&z - &x) * alpha;
            let mut dropped = false;
            for &k in &cols {
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                    dropped = true;
                }
            }
            if !dropped || passive.iter().all(|p| !p) {
                break;
            }
        }
    }
    Ok(x)
}

fn verdict_from(
    coeffs: DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
) -> MembershipVerdict {
    let residual = (a * &coeffs - b).norm();
    let coefficients: Vec<f64> = coeffs.iter().copied().collect();
    if residual <= tol {
        MembershipVerdict {
            verdict: Verdict::Member,
            certificate: Certificate::HullCoefficients {
                coefficients,
                residual,
            },
        }
    } else {
        MembershipVerdict {
            verdict: Verdict::NonMember,
            certificate: Certificate::HullResidual {
                residual,
                best_coefficients: coefficients,
            },
        }
    }
}

/// Whether `rho = Σ t_a σ_a` for real `t_a` summing to one.
///
/// `rho` is a [`DensityOperator`], so the intersection with the state space
/// is enforced by its construction.
pub fn affine_hull_membership(
    rho: &DensityOperator,
    gens: &GeneratorSet,
    tol: f64,
) -> Result<MembershipVerdict> {
    let (a, b) = system(rho, gens)?;
    let t = least_squares(&a, &b)?;
    Ok(verdict_from(t, &a, &b, tol))
}

/// Whether `rho = Σ t_a σ_a` with `t_a ≥ 0` summing to one.
pub fn convex_hull_membership(
    rho: &DensityOperator,
    gens: &GeneratorSet,
    tol: f64,
) -> Result<MembershipVerdict> {
    let (a, b) = system(rho, gens)?;
    let t = nnls(&a, &b)?;
    Ok(verdict_from(t, &a, &b, tol))
}

/// Re-evaluates `Σ t_a σ_a` and returns its max-entry distance to `rho`
/// together with `|Σ t_a − 1|`.
pub fn substitute(rho: &DensityOperator, gens: &GeneratorSet, coefficients: &[f64]) -> (f64, f64) {
    let d = rho.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for (g, &t) in gens.states().iter().zip(coefficients) {
        sum.add_scaled(g.matrix(), Complex64::new(t, 0.0));
    }
    (
        sum.max_abs_diff(rho.matrix()),
        (coefficients.iter().sum::<f64>() - 1.0).abs(),
    )
}
