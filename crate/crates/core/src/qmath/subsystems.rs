use super::matrix::ComplexMatrix;
use super::state::{DensityOperator, DimProfile};
use crate::error::{Error, Result};

fn check_square_profile(m: &ComplexMatrix, profile: &DimProfile) -> Result<()> {
    if !m.is_square() || m.rows() != profile.total() {
        return Err(Error::DimensionMismatch(format!(
            "profile {profile} does not describe a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn normalized_subset(profile: &DimProfile, subsystems: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; profile.len()];
    for &s in subsystems {
        profile.check_index(s)?;
        mask[s] = true;
    }
    Ok(mask)
}

/// Partial trace of an arbitrary square operator, keeping `keep`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    profile: &DimProfile,
    keep: &[usize],
) -> Result<(ComplexMatrix, DimProfile)> {
    check_square_profile(m, profile)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    let kept = normalized_subset(profile, keep)?;
    let out_profile = profile.select(keep)?;
    let n = m.rows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| profile.digits(i)).collect();
    let split = |d: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let mut k = Vec::new();
        let mut t = Vec::new();
        for (x, &is_kept) in d.iter().zip(&kept) {
            if is_kept {
                k.push(*x);
            } else {
                t.push(*x);
            }
        }
        (k, t)
    };
    let parts: Vec<(usize, Vec<usize>)> = digits
        .iter()
        .map(|d| {
            let (k, t) = split(d);
            (out_profile.join(&k), t)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(out_profile.total(), out_profile.total());
    for (i, (ri, ti)) in parts.iter().enumerate() {
        for (j, (rj, tj)) in parts.iter().enumerate() {
            if ti == tj {
                *out.entry_mut(*ri, *rj) += m.get(i, j);
            }
        }
    }
    Ok((out, out_profile))
}

/// Reduced state on the subsystems listed in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let (m, profile) = partial_trace_matrix(rho.matrix(), rho.profile(), keep)?;
    Ok(DensityOperator::trusted(m, profile, rho.tolerance()))
}

/// Transposes the listed subsystems of `m`.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    profile: &DimProfile,
    subsystems: &[usize],
) -> Result<ComplexMatrix> {
    check_square_profile(m, profile)?;
    let mask = normalized_subset(profile, subsystems)?;
    let n = m.rows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| profile.digits(i)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut di = vec![0; profile.len()];
    let mut dj = vec![0; profile.len()];
    for i in 0..n {
        for j in 0..n {
            for s in 0..profile.len() {
                if mask[s] {
                    di[s] = digits[j][s];
                    dj[s] = digits[i][s];
                } else {
                    di[s] = digits[i][s];
                    dj[s] = digits[j][s];
                }
            }
            out.set(i, j, m.get(profile.join(&di), profile.join(&dj)));
        }
    }
    Ok(out)
}

/// Partial transpose on one subsystem.
pub fn partial_transpose(rho: &DensityOperator, subsystem: usize) -> Result<ComplexMatrix> {
    partial_transpose_matrix(rho.matrix(), rho.profile(), &[subsystem])
}
