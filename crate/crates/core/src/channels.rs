//! Quantum channels in Kraus form and their matrix representations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    eig_hermitian, from_hermitian_coords, hermitian_basis_element, hermitian_coords, kron,
    partial_trace_matrix, partial_transpose_matrix, trace_distance, Complex64, ComplexMatrix,
    DensityOperator, DimProfile, DEFAULT_TOL,
};

/// Trace-preservation slack accepted by [`KrausChannel::new`].
pub const TP_TOL: f64 = 1e-9;

/// Singular values of `Λ − id` at or below this bound span the fixed-point space.
pub const FIXED_POINT_WINDOW: f64 = 1e-8;

/// Largest `d_in · d_out` for which PPT decides separability of a Choi matrix.
pub const PPT_CONCLUSIVE_DIM: usize = 6;

/// Completely positive map `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    in_profile: DimProfile,
    out_profile: DimProfile,
}

impl KrausChannel {
    /// Builds a channel and requires `Σ K†K = I` within [`TP_TOL`].
    pub fn new(
        kraus: Vec<ComplexMatrix>,
        in_profile: DimProfile,
        out_profile: DimProfile,
    ) -> Result<Self> {
        let ch = Self::from_raw(kraus, in_profile, out_profile)?;
        let dev = ch.tp_deviation();
        if dev > TP_TOL {
            return Err(Error::InvalidChannel(format!(
                "not trace preserving: max |Σ K†K − I| = {dev:e}"
            )));
        }
        Ok(ch)
    }

    /// Builds a map from Kraus operators checking only their shapes.
    ///
    /// Use [`is_cptp`] to decide whether the result is a channel.
    pub fn from_raw(
        kraus: Vec<ComplexMatrix>,
        in_profile: DimProfile,
        out_profile: DimProfile,
    ) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
        let shape = (first.rows(), first.cols());
        if shape != (out_profile.total(), in_profile.total()) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators are {}x{} but profiles are {} -> {}",
                shape.0, shape.1, in_profile, out_profile
            )));
        }
        if let Some(k) = kraus.iter().position(|k| (k.rows(), k.cols()) != shape) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator {k} has a different shape from operator 0"
            )));
        }
        Ok(Self {
            kraus,
            in_profile,
            out_profile,
        })
    }

    pub fn identity(profile: DimProfile) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(profile.total())],
            in_profile: profile.clone(),
            out_profile: profile,
        }
    }

    pub fn unitary(u: ComplexMatrix, profile: DimProfile) -> Result<Self> {
        Self::new(vec![u], profile.clone(), profile)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn in_profile(&self) -> &DimProfile {
        &self.in_profile
    }

    pub fn out_profile(&self) -> &DimProfile {
        &self.out_profile
    }

    pub fn in_dim(&self) -> usize {
        self.in_profile.total()
    }

    pub fn out_dim(&self) -> usize {
        self.out_profile.total()
    }

    /// Re-labels the tensor factorization of the input and output spaces.
    pub fn with_profiles(
        mut self,
        in_profile: DimProfile,
        out_profile: DimProfile,
    ) -> Result<Self> {
        if in_profile.total() != self.in_dim() || out_profile.total() != self.out_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot relabel {} -> {} as {} -> {}",
                self.in_profile, self.out_profile, in_profile, out_profile
            )));
        }
        self.in_profile = in_profile;
        self.out_profile = out_profile;
        Ok(self)
    }

    /// Max-entry deviation of `Σ K†K` from the identity.
    pub fn tp_deviation(&self) -> f64 {
        let d = self.in_dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            sum.add_scaled(&k.adjoint().matmul(k), Complex64::new(1.0, 0.0));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// Applies the map to an arbitrary operator of matching size.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            x.rows(),
            self.in_dim(),
            "operator size does not match channel input"
        );
        let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out.add_scaled(&k.sandwich(x), Complex64::new(1.0, 0.0));
        }
        out
    }

    fn check_input(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.in_dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} fed to a channel on {}",
                rho.dim(),
                self.in_profile
            )));
        }
        Ok(())
    }
}

/// `Σ_k K_k ρ K_k†`.
///
/// Outputs of trace-preserving maps keep the density invariants by
/// construction; other maps are validated and rejected if they break them.
pub fn apply(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.check_input(rho)?;
    let out = ch.apply_operator(rho.matrix());
    if ch.tp_deviation() <= TP_TOL {
        Ok(DensityOperator::trusted(
            out,
            ch.out_profile.clone(),
            rho.tolerance(),
        ))
    } else {
        DensityOperator::with_tolerance(out, ch.out_profile.clone(), 1e-8)
    }
}

/// `after ∘ before`, Kraus operators `{A_j·B_k}`.
pub fn compose(after: &KrausChannel, before: &KrausChannel) -> Result<KrausChannel> {
    if before.out_dim() != after.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose {} -> {} after {} -> {}",
            after.in_profile, after.out_profile, before.in_profile, before.out_profile
        )));
    }
    let kraus = after
        .kraus
        .iter()
        .flat_map(|a| before.kraus.iter().map(move |b| a.matmul(b)))
        .collect();
    Ok(KrausChannel {
        kraus,
        in_profile: before.in_profile.clone(),
        out_profile: after.out_profile.clone(),
    })
}

/// `Λ₁ ⊗ Λ₂ ⊗ ⋯`, profiles concatenated in order.
pub fn tensor_channels(chs: &[KrausChannel]) -> Result<KrausChannel> {
    let (first, rest) = chs
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor product of no channels".into()))?;
    let mut acc = first.clone();
    for ch in rest {
        let kraus = acc
            .kraus
            .iter()
            .flat_map(|a| ch.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        acc = KrausChannel {
            kraus,
            in_profile: acc.in_profile.concat(&ch.in_profile)?,
            out_profile: acc.out_profile.concat(&ch.out_profile)?,
        };
    }
    Ok(acc)
}

/// Matrix acting on column-stacked operators: `M·vec(ρ) = vec(Λ(ρ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    in_dim: usize,
    out_dim: usize,
}

impl Superoperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = self.matrix.mat_vec(&x.vectorize());
        ComplexMatrix::unvectorize(&v, self.out_dim, self.out_dim)
            .expect("superoperator output shape")
    }

    /// Max-entry distance between two superoperators of equal shape.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperators {}->{} and {}->{}",
                self.in_dim, self.out_dim, other.in_dim, other.out_dim
            )));
        }
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }
}

/// `Σ_k conj(K_k) ⊗ K_k`, the column-stacking representation.
pub fn superoperator_of(ch: &KrausChannel) -> Result<Superoperator> {
    let (n_in, n_out) = (ch.in_dim(), ch.out_dim());
    let mut matrix = ComplexMatrix::zeros(n_out * n_out, n_in * n_in);
    for k in &ch.kraus {
        matrix.add_scaled(&kron(&k.conj(), k), Complex64::new(1.0, 0.0));
    }
    Ok(Superoperator {
        matrix,
        in_dim: n_in,
        out_dim: n_out,
    })
}

/// Superoperator max-entry distance between two channels.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    superoperator_of(a)?.distance(&superoperator_of(b)?)
}

/// Max-entry distance between `Λ∘Λ` and `Λ` at the superoperator level.
pub fn idempotence_defect(ch: &KrausChannel) -> Result<f64> {
    if ch.in_dim() != ch.out_dim() {
        return Err(Error::DimensionMismatch(
            "idempotence needs equal input and output".into(),
        ));
    }
    let s = superoperator_of(ch)?;
    let squared = s.matrix.matmul(&s.matrix);
    Ok(squared.max_abs_diff(&s.matrix))
}

pub fn is_idempotent(ch: &KrausChannel, tol: f64) -> Result<bool> {
    Ok(idempotence_defect(ch)? <= tol)
}

/// Normalized Choi state `(id ⊗ Λ)(|Ω⟩⟨Ω|)`, `|Ω⟩ = Σ_i |ii⟩/√d`, on `(in, out)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    profile: DimProfile,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn profile(&self) -> &DimProfile {
        &self.profile
    }

    /// Max deviation of `Tr_out J` from `I/d_in`.
    pub fn marginal_deviation(&self) -> Result<f64> {
        let (m, p) = partial_trace_matrix(&self.matrix, &self.profile, &[0])?;
        let d = p.total();
        Ok(m.max_abs_diff(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)))
    }

    pub fn as_density(&self) -> Result<DensityOperator> {
        DensityOperator::with_tolerance(self.matrix.clone(), self.profile.clone(), DEFAULT_TOL)
    }
}

pub fn choi_of(ch: &KrausChannel) -> Result<ChoiMatrix> {
    let (n_in, n_out) = (ch.in_dim(), ch.out_dim());
    let profile = DimProfile::new(vec![n_in, n_out])?;
    let mut matrix = ComplexMatrix::zeros(n_in * n_out, n_in * n_out);
    let scale = Complex64::new(1.0 / n_in as f64, 0.0);
    for i in 0..n_in {
        for j in 0..n_in {
            let mut eij = ComplexMatrix::zeros(n_in, n_in);
            eij.set(i, j, Complex64::new(1.0, 0.0));
            let block = ch.apply_operator(&eij);
            for a in 0..n_out {
                for b in 0..n_out {
                    *matrix.entry_mut(i * n_out + a, j * n_out + b) += block.get(a, b) * scale;
                }
            }
        }
    }
    Ok(ChoiMatrix { matrix, profile })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    pub is_cptp: bool,
    pub tp_deviation: f64,
    /// `None` when the Choi matrix exceeds the dimension cap; Kraus form is CP regardless.
    pub choi_min_eigenvalue: Option<f64>,
}

pub fn is_cptp(ch: &KrausChannel, tol: f64) -> CptpReport {
    let tp_deviation = ch.tp_deviation();
    let choi_min_eigenvalue = choi_of(ch)
        .ok()
        .and_then(|c| eig_hermitian(&c.matrix.hermitian_part()).ok())
        .map(|e| e.min());
    let cp = choi_min_eigenvalue.is_none_or(|m| m >= -tol);
    CptpReport {
        is_cptp: tp_deviation <= tol && cp,
        tp_deviation,
        choi_min_eigenvalue,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EbVerdict {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbClassification {
    pub verdict: EbVerdict,
    /// Smallest eigenvalue of the Choi partial transpose, when computed.
    pub min_pt_eigenvalue: Option<f64>,
    pub reason: String,
}

/// Decides separability of the Choi matrix across `(in | out)`.
///
/// A diagonal or product Choi matrix is separable in any dimension; otherwise
/// a negative partial transpose gives `No`, and a positive one gives `Yes`
/// only when `d_in · d_out ≤ 6`.
pub fn is_entanglement_breaking(ch: &KrausChannel) -> EbClassification {
    let choi = match choi_of(ch) {
        Ok(c) => c,
        Err(e) => {
            return EbClassification {
                verdict: EbVerdict::Inconclusive,
                min_pt_eigenvalue: None,
                reason: format!("Choi matrix unavailable: {e}"),
            }
        }
    };
    let tol = DEFAULT_TOL;
    if choi.matrix.is_diagonal(tol) {
        return EbClassification {
            verdict: EbVerdict::Yes,
            min_pt_eigenvalue: None,
            reason: "Choi matrix is diagonal in the product basis".into(),
        };
    }
    if let Ok(true) = is_product_operator(&choi.matrix, &choi.profile, tol) {
        return EbClassification {
            verdict: EbVerdict::Yes,
            min_pt_eigenvalue: None,
            reason: "Choi matrix is a product operator".into(),
        };
    }
    let pt = partial_transpose_matrix(&choi.matrix, &choi.profile, &[0])
        .and_then(|pt| eig_hermitian(&pt.hermitian_part()));
    let min = match pt {
        Ok(e) => e.min(),
        Err(e) => {
            return EbClassification {
                verdict: EbVerdict::Inconclusive,
                min_pt_eigenvalue: None,
                reason: format!("partial transpose failed: {e}"),
            }
        }
    };
    let total = choi.profile.total();
    let (verdict, reason) = if min < -tol {
        (
            EbVerdict::No,
            "Choi partial transpose has a negative eigenvalue".to_string(),
        )
    } else if total <= PPT_CONCLUSIVE_DIM {
        (
            EbVerdict::Yes,
            format!("PPT Choi matrix in total dimension {total} <= {PPT_CONCLUSIVE_DIM}"),
        )
    } else {
        (
            EbVerdict::Inconclusive,
            format!("PPT Choi matrix in total dimension {total} > {PPT_CONCLUSIVE_DIM}"),
        )
    };
    EbClassification {
        verdict,
        min_pt_eigenvalue: Some(min),
        reason,
    }
}

/// Whether `m` equals the product of its two marginals (scaled by its trace).
fn is_product_operator(m: &ComplexMatrix, profile: &DimProfile, tol: f64) -> Result<bool> {
    let tr = m.trace();
    if tr.norm() < tol {
        return Ok(false);
    }
    let (a, _) = partial_trace_matrix(m, profile, &[0])?;
    let (b, _) = partial_trace_matrix(m, profile, &[1])?;
    let prod = kron(&a, &b).scale(tr.inv());
    Ok(prod.max_abs_diff(m) <= tol)
}

/// Orthonormal Hermitian basis of the operators left invariant by a channel.
#[derive(Clone, Debug)]
pub struct FixedPointSubspace {
    basis: Vec<ComplexMatrix>,
    operator_dim: usize,
}

impl FixedPointSubspace {
    /// Builds the span of Hermitian operators, orthonormalizing them.
    pub fn from_spanning_set(ops: &[ComplexMatrix], operator_dim: usize, tol: f64) -> Self {
        let coords: Vec<Vec<f64>> = ops.iter().map(hermitian_coords).collect();
        let basis = orthonormal_span(&coords, operator_dim * operator_dim, tol)
            .into_iter()
            .map(|c| from_hermitian_coords(&c, operator_dim))
            .collect();
        Self {
            basis,
            operator_dim,
        }
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Side length of the operators in the subspace.
    pub fn operator_dim(&self) -> usize {
        self.operator_dim
    }

    /// Orthogonal projection (Hilbert–Schmidt) of a Hermitian operator.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.operator_dim, self.operator_dim);
        for b in &self.basis {
            out.add_scaled(b, b.inner(x));
        }
        out
    }

    /// Max-entry distance from `x` to its projection.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        self.project(x).max_abs_diff(x)
    }

    /// `span{A ⊗ B}` over both bases; for idempotent `Λ₁`, `Λ₂` this is the
    /// fixed space of `Λ₁ ⊗ Λ₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        let basis = self
            .basis
            .iter()
            .flat_map(|a| other.basis.iter().map(move |b| kron(a, b)))
            .collect();
        Self {
            basis,
            operator_dim: self.operator_dim * other.operator_dim,
        }
    }

    /// Mutual containment within `tol`.
    pub fn same_span(&self, other: &Self, tol: f64) -> bool {
        self.operator_dim == other.operator_dim
            && self.dimension() == other.dimension()
            && self.basis.iter().all(|b| other.residual(b) <= tol)
            && other.basis.iter().all(|b| self.residual(b) <= tol)
    }
}

/// Orthonormal basis (as coordinate vectors) of the span of `vectors`.
fn orthonormal_span(vectors: &[Vec<f64>], len: usize, tol: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let a = DMatrix::from_fn(len, vectors.len(), |i, j| vectors[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let scale = svd.singular_values.max().max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * scale)
        .map(|(k, _)| u.column(k).iter().copied().collect())
        .collect()
}

/// Null space of `R − I`, where `R` is the channel in Hermitian coordinates.
pub fn fixed_point_subspace(ch: &KrausChannel) -> Result<FixedPointSubspace> {
    if ch.in_dim() != ch.out_dim() {
        return Err(Error::DimensionMismatch(
            "fixed points need equal input and output dimensions".into(),
        ));
    }
    let d = ch.in_dim();
    let n = d * d;
    let mut r = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let image = ch.apply_operator(&hermitian_basis_element(d, k));
        for (i, c) in hermitian_coords(&image).into_iter().enumerate() {
            r[(i, k)] = c;
        }
        r[(k, k)] -= 1.0;
    }
    let svd = r.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= FIXED_POINT_WINDOW {
            let coords: Vec<f64> = v_t.row(k).iter().copied().collect();
            basis.push(from_hermitian_coords(&coords, d));
        }
    }
    // Deterministic ordering: by the coordinate vectors, sign fixed so the
    // largest-magnitude coordinate is positive.
    let mut basis: Vec<ComplexMatrix> = basis
        .into_iter()
        .map(|b| {
            let c = hermitian_coords(&b);
            let pivot =
                c.iter().copied().fold(
                    0.0f64,
                    |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc },
                );
            if pivot < 0.0 {
                b.scale_real(-1.0)
            } else {
                b
            }
        })
        .collect();
    basis.sort_by(|a, b| {
        hermitian_coords(a)
            .iter()
            .zip(hermitian_coords(b).iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(FixedPointSubspace {
        basis,
        operator_dim: d,
    })
}

/// `trace_distance(Λ(ρ), ρ) ≤ tol`.
pub fn is_fixed_point(ch: &KrausChannel, rho: &DensityOperator, tol: f64) -> Result<bool> {
    Ok(fixed_point_distance(ch, rho)? <= tol)
}

pub fn fixed_point_distance(ch: &KrausChannel, rho: &DensityOperator) -> Result<f64> {
    if ch.in_dim() != ch.out_dim() {
        return Err(Error::DimensionMismatch(
            "fixed points need equal input and output dimensions".into(),
        ));
    }
    let out = apply(ch, rho)?;
    trace_distance(&out, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{basis_projector, max_coherent, max_entangled, SeededStream};

    fn qubit() -> DimProfile {
        DimProfile::single(2).unwrap()
    }

    fn dephasing2() -> KrausChannel {
        KrausChannel::new(
            vec![
                basis_projector(2, 0).unwrap(),
                basis_projector(2, 1).unwrap(),
            ],
            qubit(),
            qubit(),
        )
        .unwrap()
    }

    /// Column-by-column oracle: column `c` of the superoperator is vec(Λ(E_c)).
    fn superoperator_by_columns(ch: &KrausChannel) -> ComplexMatrix {
        let (di, dout) = (ch.in_dim(), ch.out_dim());
        let mut m = ComplexMatrix::zeros(dout * dout, di * di);
        for c in 0..di * di {
            let mut e = vec![Complex64::new(0.0, 0.0); di * di];
            e[c] = Complex64::new(1.0, 0.0);
            let x = ComplexMatrix::unvectorize(&e, di, di).unwrap();
            let col = ch.apply_operator(&x).vectorize();
            for (r, v) in col.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    #[test]
    fn identity_apply_and_superoperator() {
        let id = KrausChannel::identity(qubit());
        let rho = SeededStream::new(1).ginibre_state(&qubit());
        assert_eq!(apply(&id, &rho).unwrap().matrix(), rho.matrix());
        assert_eq!(
            superoperator_of(&id).unwrap().matrix(),
            &ComplexMatrix::identity(4)
        );
    }

    #[test]
    fn dephasing_superoperator_matches_column_oracle() {
        let ch = dephasing2();
        let oracle = superoperator_by_columns(&ch);
        assert_eq!(oracle, ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0, 1.0]));
        assert!(
            superoperator_of(&ch)
                .unwrap()
                .matrix()
                .max_abs_diff(&oracle)
                < 1e-15
        );
    }

    #[test]
    fn superoperator_agrees_with_apply_on_random_states() {
        let ch = dephasing2();
        let s = superoperator_of(&ch).unwrap();
        let mut stream = SeededStream::new(2);
        for _ in 0..50 {
            let rho = stream.ginibre_state(&qubit());
            let a = apply(&ch, &rho).unwrap();
            assert!(s.apply(rho.matrix()).max_abs_diff(a.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn dephasing_on_plus_is_maximally_mixed() {
        let out = apply(&dephasing2(), &max_coherent(2).unwrap()).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = KrausChannel::identity(qubit());
        let b = KrausChannel::identity(DimProfile::single(3).unwrap());
        assert!(matches!(compose(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn compose_dephasing_is_idempotent_at_superoperator_level() {
        let d = dephasing2();
        let dd = compose(&d, &d).unwrap();
        let oracle = superoperator_by_columns(&d);
        assert!(
            superoperator_of(&dd)
                .unwrap()
                .matrix()
                .max_abs_diff(&oracle)
                < 1e-15
        );
        assert!(idempotence_defect(&d).unwrap() < 1e-15);
    }

    #[test]
    fn choi_examples() {
        let id = KrausChannel::identity(qubit());
        let choi = choi_of(&id).unwrap();
        assert!(
            choi.matrix()
                .max_abs_diff(max_entangled(2).unwrap().matrix())
                < 1e-15
        );

        // Oracle: apply dephasing to half of |Ω⟩⟨Ω| entry by entry.
        let omega = max_entangled(2).unwrap();
        let oracle = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (a, b) = (r % 2, c % 2);
            if a == b {
                omega.matrix().get(r, c)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!(oracle.max_abs_diff(&ComplexMatrix::from_diagonal(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        let choi = choi_of(&dephasing2()).unwrap();
        assert!(choi.matrix().max_abs_diff(&oracle) < 1e-15);
        assert!(choi.marginal_deviation().unwrap() < 1e-15);
    }

    #[test]
    fn cptp_detects_doubled_identity() {
        assert!(is_cptp(&dephasing2(), 1e-9).is_cptp);
        let doubled = KrausChannel::from_raw(
            vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)],
            qubit(),
            qubit(),
        )
        .unwrap();
        let report = is_cptp(&doubled, 1e-9);
        assert!(!report.is_cptp);
        assert!((report.tp_deviation - 1.0).abs() < 1e-15);
        assert!(KrausChannel::new(doubled.kraus_ops().to_vec(), qubit(), qubit()).is_err());
    }

    #[test]
    fn entanglement_breaking_examples() {
        let eb = is_entanglement_breaking(&dephasing2());
        assert_eq!(eb.verdict, EbVerdict::Yes);
        let eb = is_entanglement_breaking(&KrausChannel::identity(qubit()));
        assert_eq!(eb.verdict, EbVerdict::No);
        assert!((eb.min_pt_eigenvalue.unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dephasing_fixed_points_are_diagonal_projectors() {
        let fix = fixed_point_subspace(&dephasing2()).unwrap();
        assert_eq!(fix.dimension(), 2);
        let expected = FixedPointSubspace::from_spanning_set(
            &[
                basis_projector(2, 0).unwrap(),
                basis_projector(2, 1).unwrap(),
            ],
            2,
            1e-12,
        );
        assert!(fix.same_span(&expected, 1e-8));
        for b in fix.basis() {
            assert!(dephasing2().apply_operator(b).max_abs_diff(b) <= 1e-8);
            assert!(b.hermitian_deviation() < 1e-15);
        }
    }

    #[test]
    fn fixed_point_of_tensor_square() {
        let dd = tensor_channels(&[dephasing2(), dephasing2()]).unwrap();
        let fix = fixed_point_subspace(&dd).unwrap();
        assert_eq!(fix.dimension(), 4);
        let projectors: Vec<_> = (0..4).map(|i| basis_projector(4, i).unwrap()).collect();
        let expected = FixedPointSubspace::from_spanning_set(&projectors, 4, 1e-12);
        assert!(fix.same_span(&expected, 1e-8));
    }

    #[test]
    fn fixed_point_membership() {
        let diag = DensityOperator::from_matrix(ComplexMatrix::from_diagonal(&[0.3, 0.7])).unwrap();
        assert!(is_fixed_point(&dephasing2(), &diag, 1e-9).unwrap());
        assert!(!is_fixed_point(&dephasing2(), &max_coherent(2).unwrap(), 1e-9).unwrap());
    }
}
