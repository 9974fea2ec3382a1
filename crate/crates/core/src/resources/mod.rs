//! Free-state families and membership verdicts.
//!
//! Every verdict is three-valued. `Member` and `NonMember` carry a
//! certificate that can be re-checked by hand; `Inconclusive` carries the
//! reason no decision was possible (typically a PPT state above the
//! dimension where PPT implies separability).

mod hull;

pub use hull::{affine_hull_membership, convex_hull_membership, substitute, HULL_TOL};

use serde::Serialize;

use crate::censors::{cq_censor_channel, dephasing_channel, twirl_channel, TwirlGroup};
use crate::channels::{
    apply, fixed_point_subspace, idempotence_defect, tensor_channels, FixedPointSubspace,
    KrausChannel, PPT_CONCLUSIVE_DIM,
};
use crate::error::{Error, Result};
use crate::qmath::{
    eig_hermitian, kron_all, partial_trace_matrix, partial_transpose_matrix,
    trace_distance_matrices, ComplexMatrix, DensityOperator, DimProfile, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Largest entry outside the allowed block pattern.
    OffDiagonal {
        max_magnitude: f64,
        row: usize,
        col: usize,
    },
    /// Trace distance between the state and its image under the projector
    /// onto the free set.
    InvarianceDistance {
        distance: f64,
    },
    /// Smallest partial-transpose eigenvalue over the tested cuts, attained
    /// when transposing the listed subsystems.
    PartialTranspose {
        transposed: Vec<usize>,
        min_eigenvalue: f64,
    },
    /// Member by a structural fact about the state.
    Structure {
        reason: String,
    },
    HullCoefficients {
        coefficients: Vec<f64>,
        residual: f64,
    },
    HullResidual {
        residual: f64,
        best_coefficients: Vec<f64>,
    },
    Undecided {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

impl MembershipVerdict {
    fn inconclusive(reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Inconclusive,
            certificate: Certificate::Undecided {
                reason: reason.into(),
            },
        }
    }

    fn structural(reason: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Member,
            certificate: Certificate::Structure {
                reason: reason.into(),
            },
        }
    }

    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    pub fn is_non_member(&self) -> bool {
        self.verdict == Verdict::NonMember
    }
}

#[derive(Debug, Clone)]
pub enum OracleKind {
    Incoherent(usize),
    TwirlInvariant(TwirlGroup),
    ClassicalQuantum { x_dim: usize, y_dim: usize },
    SeparablePpt(DimProfile),
    AffineComposite(Vec<FreeSetOracle>),
    ConvexComposite(Vec<FreeSetOracle>),
}

/// A free-state family with its decision tolerance.
#[derive(Debug, Clone)]
pub struct FreeSetOracle {
    kind: OracleKind,
    tolerance: f64,
    leaves: DimProfile,
}

/// How a family that is cut out by linear constraints is tested.
enum LinearForm {
    /// Entries allowed only where every classical leaf has equal indices.
    Mask(Vec<bool>),
    /// Invariance under an idempotent channel.
    Projector(KrausChannel),
}

impl FreeSetOracle {
    fn build(kind: OracleKind) -> Result<Self> {
        let leaves = match &kind {
            OracleKind::Incoherent(d) => DimProfile::single(*d)?,
            OracleKind::TwirlInvariant(g) => DimProfile::single(g.dim())?,
            OracleKind::ClassicalQuantum { x_dim, y_dim } => DimProfile::new(vec![*x_dim, *y_dim])?,
            OracleKind::SeparablePpt(p) => p.clone(),
            OracleKind::AffineComposite(fs) | OracleKind::ConvexComposite(fs) => {
                if fs.is_empty() {
                    return Err(Error::InvalidArgument(
                        "composite oracle with no factors".into(),
                    ));
                }
                if fs.iter().any(|f| f.factors().is_some()) {
                    return Err(Error::Unsupported("nested composite oracles".into()));
                }
                DimProfile::concat_all(fs.iter().map(|f| &f.leaves))?
            }
        };
        Ok(Self {
            kind,
            tolerance: DEFAULT_TOL,
            leaves,
        })
    }

    pub fn incoherent(dim: usize) -> Result<Self> {
        Self::build(OracleKind::Incoherent(dim))
    }

    pub fn twirl_invariant(group: TwirlGroup) -> Result<Self> {
        Self::build(OracleKind::TwirlInvariant(group))
    }

    pub fn classical_quantum(x_dim: usize, y_dim: usize) -> Result<Self> {
        Self::build(OracleKind::ClassicalQuantum { x_dim, y_dim })
    }

    pub fn separable_ppt(profile: DimProfile) -> Result<Self> {
        Self::build(OracleKind::SeparablePpt(profile))
    }

    /// `Aff(F₁ ⊗ ⋯ ⊗ F_N) ∩ D`, one factor per party.
    pub fn affine_composite(factors: Vec<FreeSetOracle>) -> Result<Self> {
        Self::build(OracleKind::AffineComposite(factors))
    }

    /// `Conv(F₁ ⊗ ⋯ ⊗ F_N)`, one factor per party.
    pub fn convex_composite(factors: Vec<FreeSetOracle>) -> Result<Self> {
        Self::build(OracleKind::ConvexComposite(factors))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Finest subsystem structure the oracle knows about.
    pub fn leaf_profile(&self) -> &DimProfile {
        &self.leaves
    }

    pub fn dim(&self) -> usize {
        self.leaves.total()
    }

    pub fn factors(&self) -> Option<&[FreeSetOracle]> {
        match &self.kind {
            OracleKind::AffineComposite(fs) | OracleKind::ConvexComposite(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn is_composite(&self) -> bool {
        self.factors().is_some()
    }

    pub fn label(&self) -> String {
        let list =
            |fs: &[FreeSetOracle]| fs.iter().map(|f| f.label()).collect::<Vec<_>>().join(", ");
        match &self.kind {
            OracleKind::Incoherent(d) => format!("incoherent:{d}"),
            OracleKind::TwirlInvariant(g) => format!("twirl:{}", g.label()),
            OracleKind::ClassicalQuantum { x_dim, y_dim } => format!("cq:{x_dim}x{y_dim}"),
            OracleKind::SeparablePpt(p) => format!("separable_ppt:{p}"),
            OracleKind::AffineComposite(fs) => format!("affine[{}]", list(fs)),
            OracleKind::ConvexComposite(fs) => format!("convex[{}]", list(fs)),
        }
    }

    /// Short tag of the family, shared by all its dimensions.
    pub fn family(&self) -> &'static str {
        match &self.kind {
            OracleKind::Incoherent(_) => "incoherent",
            OracleKind::TwirlInvariant(_) => "twirl",
            OracleKind::ClassicalQuantum { .. } => "cq",
            OracleKind::SeparablePpt(_) => "separable_ppt",
            OracleKind::AffineComposite(_) => "affine",
            OracleKind::ConvexComposite(_) => "convex",
        }
    }

    fn classical_flags(&self) -> Option<Vec<bool>> {
        match &self.kind {
            OracleKind::Incoherent(_) => Some(vec![true]),
            OracleKind::ClassicalQuantum { .. } => Some(vec![true, false]),
            _ => None,
        }
    }

    fn projector(&self) -> Option<Result<KrausChannel>> {
        match &self.kind {
            OracleKind::Incoherent(d) => Some(dephasing_channel(*d)),
            OracleKind::ClassicalQuantum { x_dim, y_dim } => {
                Some(cq_censor_channel(*x_dim, *y_dim))
            }
            OracleKind::TwirlInvariant(g) => Some(Ok(twirl_channel(g))),
            _ => None,
        }
    }

    fn linear_form(&self) -> Option<Result<LinearForm>> {
        let all_incoherent = |fs: &[FreeSetOracle]| {
            fs.iter()
                .all(|f| matches!(f.kind, OracleKind::Incoherent(_)))
        };
        match &self.kind {
            OracleKind::Incoherent(_) | OracleKind::ClassicalQuantum { .. } => {
                self.classical_flags().map(|f| Ok(LinearForm::Mask(f)))
            }
            OracleKind::TwirlInvariant(_) => self.projector().map(|r| r.map(LinearForm::Projector)),
            OracleKind::SeparablePpt(_) => None,
            // Convex mixtures of jointly diagonal states are exactly the
            // jointly diagonal states, so this family is linear as well.
            OracleKind::ConvexComposite(fs) if all_incoherent(fs) => {
                Some(Ok(LinearForm::Mask(vec![true; fs.len()])))
            }
            OracleKind::ConvexComposite(_) => None,
            OracleKind::AffineComposite(fs) => {
                if let Some(flags) = fs
                    .iter()
                    .map(|f| f.classical_flags())
                    .collect::<Option<Vec<_>>>()
                {
                    return Some(Ok(LinearForm::Mask(flags.concat())));
                }
                let chans = fs
                    .iter()
                    .map(|f| f.projector())
                    .collect::<Option<Vec<_>>>()?;
                Some(
                    chans
                        .into_iter()
                        .collect::<Result<Vec<_>>>()
                        .and_then(|cs| tensor_channels(&cs))
                        .map(LinearForm::Projector),
                )
            }
        }
    }

    /// For families cut out of the state space by linear constraints, the
    /// max-entry violation of those constraints by `x`; `None` otherwise.
    ///
    /// A density operator is a member exactly when this is within tolerance,
    /// and the constraint set is closed under linear combinations, which is
    /// what makes subspace containment arguments possible.
    pub fn linear_constraint_residual(&self, x: &ComplexMatrix) -> Option<Result<f64>> {
        let form = self.linear_form()?;
        Some(form.and_then(|form| {
            self.check_dim(x.rows())?;
            Ok(match form {
                LinearForm::Mask(flags) => mask_violation(x, &self.leaves, &flags).0,
                LinearForm::Projector(p) => p.apply_operator(x).max_abs_diff(x),
            })
        }))
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {d} tested against {} on {}",
                self.label(),
                self.leaves
            )));
        }
        Ok(())
    }
}

/// Finite set of density operators sharing one dimension.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    states: Vec<DensityOperator>,
}

impl GeneratorSet {
    pub fn new(states: Vec<DensityOperator>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty generator set".into()))?;
        let d = first.dim();
        if let Some(k) = states.iter().position(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "generator {k} has dimension {}, generator 0 has {d}",
                states[k].dim()
            )));
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn profile(&self) -> &DimProfile {
        self.states[0].profile()
    }

    /// Linear span of the generators as Hermitian operators.
    pub fn span(&self, tol: f64) -> FixedPointSubspace {
        let ops: Vec<ComplexMatrix> = self.states.iter().map(|s| s.matrix().clone()).collect();
        FixedPointSubspace::from_spanning_set(&ops, self.dim(), tol)
    }

    /// `{g₁ ⊗ h₁, g₁ ⊗ h₂, …}` over all pairs, in lexicographic order.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut states = Vec::with_capacity(self.len() * other.len());
        for a in &self.states {
            for b in &other.states {
                states.push(a.tensor(b)?);
            }
        }
        Self::new(states)
    }
}

/// Largest entry of `x` connecting different indices on a classical leaf.
fn mask_violation(
    x: &ComplexMatrix,
    leaves: &DimProfile,
    classical: &[bool],
) -> (f64, usize, usize) {
    let n = x.rows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| leaves.digits(i)).collect();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let allowed = classical
                .iter()
                .enumerate()
                .all(|(s, &c)| !c || digits[i][s] == digits[j][s]);
            if !allowed {
                let v = x.get(i, j).norm();
                if v > worst.0 {
                    worst = (v, i, j);
                }
            }
        }
    }
    worst
}

fn mask_verdict(
    rho: &ComplexMatrix,
    leaves: &DimProfile,
    classical: &[bool],
    tol: f64,
) -> MembershipVerdict {
    let (max_magnitude, row, col) = mask_violation(rho, leaves, classical);
    MembershipVerdict {
        verdict: if max_magnitude <= tol {
            Verdict::Member
        } else {
            Verdict::NonMember
        },
        certificate: Certificate::OffDiagonal {
            max_magnitude,
            row,
            col,
        },
    }
}

fn invariance_verdict(
    p: &KrausChannel,
    rho: &DensityOperator,
    tol: f64,
) -> Result<MembershipVerdict> {
    let image = apply(p, rho)?;
    let distance = trace_distance_matrices(image.matrix(), rho.matrix())?;
    Ok(MembershipVerdict {
        verdict: if distance <= tol {
            Verdict::Member
        } else {
            Verdict::NonMember
        },
        certificate: Certificate::InvarianceDistance { distance },
    })
}

/// Whether `m` is the tensor product of its single-leaf marginals.
fn is_leaf_product(m: &ComplexMatrix, leaves: &DimProfile, tol: f64) -> Result<bool> {
    let marginals = (0..leaves.len())
        .map(|s| partial_trace_matrix(m, leaves, &[s]).map(|(r, _)| r))
        .collect::<Result<Vec<_>>>()?;
    let prod = kron_all(marginals.iter()).expect("profile is nonempty");
    Ok(prod.max_abs_diff(m) <= tol)
}

/// Full separability across `leaves`, decided by PPT where that is exact.
///
/// `groups` lists the leaves of each party; cuts between parties are tested
/// first so that a certificate names a party cut when one exists.
fn separable_verdict(
    m: &ComplexMatrix,
    leaves: &DimProfile,
    groups: &[Vec<usize>],
    tol: f64,
) -> Result<MembershipVerdict> {
    let n = leaves.len();
    if n == 1 {
        return Ok(MembershipVerdict::structural(
            "single subsystem: every state is separable",
        ));
    }
    if m.is_diagonal(tol) {
        return Ok(MembershipVerdict::structural(
            "diagonal in the product basis",
        ));
    }
    if is_leaf_product(m, leaves, tol)? {
        return Ok(MembershipVerdict::structural(
            "product of single-subsystem states",
        ));
    }

    // Each bipartition is visited once, as the side not containing leaf 0.
    let mut cuts: Vec<Vec<usize>> = Vec::new();
    if groups.len() > 1 {
        for mask in 1..(1usize << (groups.len() - 1)) {
            let cut: Vec<usize> = (1..groups.len())
                .filter(|p| mask >> (p - 1) & 1 == 1)
                .flat_map(|p| groups[p].iter().copied())
                .collect();
            cuts.push(cut);
        }
    }
    for mask in 1..(1usize << (n - 1)) {
        let cut: Vec<usize> = (1..n).filter(|s| mask >> (s - 1) & 1 == 1).collect();
        if !cuts.contains(&cut) {
            cuts.push(cut);
        }
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    for cut in cuts {
        let pt = partial_transpose_matrix(m, leaves, &cut)?;
        let min = eig_hermitian(&pt.hermitian_part())?.min();
        if best.as_ref().is_none_or(|(_, b)| min < b - 1e-12) {
            best = Some((cut, min));
        }
    }
    let (transposed, min_eigenvalue) = best.expect("at least one cut for two or more subsystems");
    let certificate = Certificate::PartialTranspose {
        transposed,
        min_eigenvalue,
    };
    let total = leaves.total();
    if min_eigenvalue < -tol {
        Ok(MembershipVerdict {
            verdict: Verdict::NonMember,
            certificate,
        })
    } else if n == 2 && total <= PPT_CONCLUSIVE_DIM {
        Ok(MembershipVerdict {
            verdict: Verdict::Member,
            certificate,
        })
    } else {
        Ok(MembershipVerdict::inconclusive(format!(
            "positive partial transpose on every cut, but {n} subsystems of total dimension {total} \
             (PPT decides separability only for two subsystems up to dimension {PPT_CONCLUSIVE_DIM}); \
             smallest partial-transpose eigenvalue {min_eigenvalue:e}"
        )))
    }
}

/// Decides whether `rho` belongs to the family described by `oracle`.
pub fn membership(oracle: &FreeSetOracle, rho: &DensityOperator) -> Result<MembershipVerdict> {
    oracle.check_dim(rho.dim())?;
    let tol = oracle.tolerance;
    match &oracle.kind {
        OracleKind::Incoherent(_) => Ok(mask_verdict(rho.matrix(), &oracle.leaves, &[true], tol)),
        OracleKind::ClassicalQuantum { .. } => Ok(mask_verdict(
            rho.matrix(),
            &oracle.leaves,
            &[true, false],
            tol,
        )),
        OracleKind::TwirlInvariant(g) => invariance_verdict(&twirl_channel(g), rho, tol),
        OracleKind::SeparablePpt(p) => separable_verdict(rho.matrix(), p, &[], tol),
        OracleKind::AffineComposite(_) | OracleKind::ConvexComposite(_) => {
            composite_membership(oracle, rho)
        }
    }
}

/// Membership in a composite family, decided from the block structure the
/// factor families impose rather than by enumerating product states.
///
/// Combinations without such a characterization are `Inconclusive`.
pub fn composite_membership(
    oracle: &FreeSetOracle,
    rho: &DensityOperator,
) -> Result<MembershipVerdict> {
    oracle.check_dim(rho.dim())?;
    let factors = oracle.factors().ok_or_else(|| {
        Error::InvalidArgument(format!("{} is not a composite oracle", oracle.label()))
    })?;
    let tol = oracle.tolerance;

    if let OracleKind::ConvexComposite(_) = oracle.kind {
        if factors
            .iter()
            .all(|f| matches!(f.kind, OracleKind::SeparablePpt(_)))
        {
            let mut groups = Vec::with_capacity(factors.len());
            let mut next = 0;
            for f in factors {
                groups.push((next..next + f.leaves.len()).collect());
                next += f.leaves.len();
            }
            return separable_verdict(rho.matrix(), &oracle.leaves, &groups, tol);
        }
    }
    match oracle.linear_form() {
        Some(Ok(LinearForm::Mask(flags))) => {
            Ok(mask_verdict(rho.matrix(), &oracle.leaves, &flags, tol))
        }
        Some(Ok(LinearForm::Projector(p))) => {
            let p = p.with_profiles(rho.profile().clone(), rho.profile().clone())?;
            invariance_verdict(&p, rho, tol)
        }
        Some(Err(e)) => Err(e),
        None => Ok(MembershipVerdict::inconclusive(format!(
            "no structural decision procedure for {}",
            oracle.label()
        ))),
    }
}

/// Comparison of a censor's fixed operators with the span of its
/// authorized generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanComparison {
    pub equal: bool,
    pub fixed_dimension: usize,
    pub generator_dimension: usize,
    /// Largest distance from a fixed-space basis element to the generator span.
    pub fixed_outside_generators: f64,
    /// Largest distance from a generator-span basis element to the fixed space.
    pub generators_outside_fixed: f64,
}

/// Whether the operators fixed by `censor` are exactly the span of `gens`.
pub fn fixed_set_equals_affine_hull_check(
    censor: &KrausChannel,
    gens: &GeneratorSet,
) -> Result<SpanComparison> {
    let defect = idempotence_defect(censor)?;
    if defect > DEFAULT_TOL {
        return Err(Error::Unsupported(format!(
            "censor is not idempotent (superoperator defect {defect:e})"
        )));
    }
    if gens.dim() != censor.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "generators of dimension {} for a censor on {}",
            gens.dim(),
            censor.in_profile()
        )));
    }
    let fixed = fixed_point_subspace(censor)?;
    let span = gens.span(1e-10);
    let worst = |a: &FixedPointSubspace, b: &FixedPointSubspace| {
        a.basis()
            .iter()
            .map(|x| b.residual(x))
            .fold(0.0f64, f64::max)
    };
    let fixed_outside_generators = worst(&fixed, &span);
    let generators_outside_fixed = worst(&span, &fixed);
    let tol = 1e-8;
    Ok(SpanComparison {
        equal: fixed.dimension() == span.dimension()
            && fixed_outside_generators <= tol
            && generators_outside_fixed <= tol,
        fixed_dimension: fixed.dimension(),
        generator_dimension: span.dimension(),
        fixed_outside_generators,
        generators_outside_fixed,
    })
}
