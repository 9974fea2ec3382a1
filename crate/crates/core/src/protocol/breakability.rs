//! Can collaborating senders get a non-free state through the censors?
//!
//! Censorship is broken exactly when some state fixed by the product of
//! local censors lies outside the composite free set. Structural arguments
//! settle the standard cases; otherwise a known witness is tried and, last,
//! random states of the fixed space are searched. A failed search is
//! reported as `NoWitnessFound`, never as a proof.

use serde::Serialize;

use super::{Party, Scenario, PROTOCOL_TOL};
use crate::censors::cq_censor_channel;
use crate::channels::{
    channel_distance, fixed_point_distance, fixed_point_subspace, idempotence_defect,
    is_entanglement_breaking, EbClassification, EbVerdict, FixedPointSubspace,
};
use crate::error::{Error, Result};
use crate::qmath::{
    is_density, kron, kron_all, Complex64, ComplexMatrix, DensityOperator, DimProfile,
    SeededStream, DEFAULT_TOL,
};
use crate::resources::{membership, FreeSetOracle, MembershipVerdict, OracleKind, Verdict};

/// Number of fixed-space samples searched when no structural rule applies.
pub const DEFAULT_BUDGET: usize = 256;

/// Entry magnitude below which a fixed-space basis element counts as zero.
const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BreakabilityOptions {
    pub budget: usize,
    pub seed: u64,
}

impl Default for BreakabilityOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BreakabilityStatus {
    UnbreakableProved,
    BrokenWitness,
    NoWitnessFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// Every fixed operator satisfies the linear constraints that cut the
    /// composite free set out of the state space.
    LinearContainment {
        constraints: String,
        max_residual: f64,
    },
    /// Every fixed operator is block diagonal in the computational basis of
    /// all but at most one subsystem, so fixed states are mixtures of
    /// products whose party factors are free.
    ClassicalLeaves {
        classical: Vec<bool>,
        reason: String,
    },
    /// The fixed space holds a single state, and it is free.
    UniqueFixedState {
        state: DensityOperator,
        certificate: MembershipVerdict,
    },
    /// A fixed state outside the composite free set.
    Witness {
        construction: String,
        state: DensityOperator,
        fixed_point_distance: f64,
        certificate: MembershipVerdict,
    },
    Sampling {
        budget: usize,
        seed: u64,
        accepted: usize,
        discarded: usize,
        members: usize,
        inconclusive: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakabilityVerdict {
    pub status: BreakabilityStatus,
    pub fixed_dimension: usize,
    pub evidence: Evidence,
    #[serde(skip)]
    pub fixed_subspace: FixedPointSubspace,
}

pub fn breakability_analysis(s: &Scenario) -> Result<BreakabilityVerdict> {
    breakability_analysis_with(s, &BreakabilityOptions::default())
}

pub fn breakability_analysis_with(
    s: &Scenario,
    opts: &BreakabilityOptions,
) -> Result<BreakabilityVerdict> {
    for p in s.parties() {
        let defect = idempotence_defect(p.censor())?;
        if defect > DEFAULT_TOL {
            return Err(Error::Unsupported(format!(
                "censor of party {} is not idempotent (superoperator defect {defect:e})",
                p.label()
            )));
        }
    }
    // For idempotent censors the fixed space of the product is the product
    // of the local fixed spaces.
    let mut fixed = fixed_point_subspace(s.parties()[0].censor())?;
    for p in &s.parties()[1..] {
        fixed = fixed.tensor(&fixed_point_subspace(p.censor())?);
    }
    let oracle = s.composite_free_oracle();
    let verdict = |status, evidence| BreakabilityVerdict {
        status,
        fixed_dimension: fixed.dimension(),
        evidence,
        fixed_subspace: fixed.clone(),
    };

    if let Some(evidence) = linear_containment(oracle, &fixed)? {
        return Ok(verdict(BreakabilityStatus::UnbreakableProved, evidence));
    }
    if let Some(evidence) = classical_leaves(oracle, &fixed) {
        return Ok(verdict(BreakabilityStatus::UnbreakableProved, evidence));
    }
    if let Some((status, evidence)) = unique_fixed_state(s, &fixed)? {
        return Ok(verdict(status, evidence));
    }
    if let Some(evidence) = cq_witness(s)? {
        return Ok(verdict(BreakabilityStatus::BrokenWitness, evidence));
    }
    let (status, evidence) = search(s, &fixed, opts)?;
    Ok(verdict(status, evidence))
}

fn linear_containment(
    oracle: &FreeSetOracle,
    fixed: &FixedPointSubspace,
) -> Result<Option<Evidence>> {
    let mut max_residual = 0.0f64;
    for b in fixed.basis() {
        match oracle.linear_constraint_residual(b) {
            None => return Ok(None),
            Some(r) => max_residual = max_residual.max(r?),
        }
    }
    Ok(
        (max_residual <= PROTOCOL_TOL).then(|| Evidence::LinearContainment {
            constraints: oracle.label(),
            max_residual,
        }),
    )
}

/// Whether `m` has no entries connecting different indices of `leaf`.
fn classical_on(m: &ComplexMatrix, leaves: &DimProfile, leaf: usize) -> bool {
    let n = m.rows();
    let digits: Vec<usize> = (0..n).map(|i| leaves.digits(i)[leaf]).collect();
    (0..n).all(|i| (0..n).all(|j| digits[i] == digits[j] || m.get(i, j).norm() <= STRUCTURE_TOL))
}

fn classical_leaves(oracle: &FreeSetOracle, fixed: &FixedPointSubspace) -> Option<Evidence> {
    let factors = oracle.factors()?;
    let leaves = oracle.leaf_profile();
    let classical: Vec<bool> = (0..leaves.len())
        .map(|s| fixed.basis().iter().all(|b| classical_on(b, leaves, s)))
        .collect();
    if classical.iter().filter(|c| !**c).count() > 1 {
        return None;
    }
    let mut next = 0;
    for f in factors {
        let own = &classical[next..next + f.leaf_profile().len()];
        next += own.len();
        let admits = match f.kind() {
            OracleKind::SeparablePpt(_) => true,
            OracleKind::Incoherent(_) => own[0],
            OracleKind::ClassicalQuantum { .. } => own[0],
            _ => false,
        };
        if !admits {
            return None;
        }
    }
    Some(Evidence::ClassicalLeaves {
        reason: "fixed states are mixtures of products of basis states with at most one \
                 arbitrary subsystem state, and each party factor of such a product is free"
            .into(),
        classical,
    })
}

fn unique_fixed_state(
    s: &Scenario,
    fixed: &FixedPointSubspace,
) -> Result<Option<(BreakabilityStatus, Evidence)>> {
    if fixed.dimension() != 1 {
        return Ok(None);
    }
    let b = &fixed.basis()[0];
    let tr = b.trace().re;
    if tr.abs() < 1e-12 {
        return Ok(None);
    }
    let state = match DensityOperator::new(b.scale_real(1.0 / tr), s.joint_profile().clone()) {
        Ok(st) => st,
        Err(_) => return Ok(None),
    };
    let certificate = membership(s.composite_free_oracle(), &state)?;
    Ok(match certificate.verdict {
        Verdict::Member => Some((
            BreakabilityStatus::UnbreakableProved,
            Evidence::UniqueFixedState { state, certificate },
        )),
        Verdict::NonMember => {
            let d = fixed_point_distance(&s.product_censor()?, &state)?;
            Some((
                BreakabilityStatus::BrokenWitness,
                Evidence::Witness {
                    construction: "unique fixed state".into(),
                    state,
                    fixed_point_distance: d,
                    certificate,
                },
            ))
        }
        Verdict::Inconclusive => None,
    })
}

/// `(x_dim, y_dim)` when the party's censor is the classical-quantum censor.
fn cq_dims(p: &Party) -> Result<Option<(usize, usize)>> {
    let dims = p.local_profile().dims();
    if dims.len() != 2 || dims[0] < 2 {
        return Ok(None);
    }
    let reference = cq_censor_channel(dims[0], dims[1])?;
    Ok((channel_distance(p.censor(), &reference)? <= 1e-10).then_some((dims[0], dims[1])))
}

/// Classical registers in alternating basis states, a maximally entangled
/// pair across the quantum registers of the first two cq parties, and an
/// authorized state everywhere else.
fn cq_witness(s: &Scenario) -> Result<Option<Evidence>> {
    let mut cq_parties = Vec::new();
    for (i, p) in s.parties().iter().enumerate() {
        if let Some(d) = cq_dims(p)? {
            cq_parties.push((i, d));
        }
    }
    let [(a, (_, ya)), (b, (_, yb)), ..] = cq_parties[..] else {
        return Ok(None);
    };
    let k = ya.min(yb);
    if k < 2 {
        return Ok(None);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(s.joint_profile().total(), s.joint_profile().total());
    let mut parity = 0;
    let mut local: Vec<Option<ComplexMatrix>> = vec![None; s.parties().len()];
    for (i, p) in s.parties().iter().enumerate() {
        if i != a && i != b {
            local[i] = Some(p.authorized().states()[0].matrix().clone());
        }
    }
    let classical: Vec<ComplexMatrix> = [a, b]
        .iter()
        .map(|&i| {
            let x = s.parties()[i].local_profile().dims()[0];
            let c = parity % x;
            parity += 1;
            ComplexMatrix::from_fn(x, x, |r, q| {
                if r == c && q == c {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    // |φ⟩⟨φ| = (1/k) Σ_{ij} |ii⟩⟨jj|, spread over the two quantum registers.
    for i in 0..k {
        for j in 0..k {
            let mut factors = local.clone();
            for (slot, (&party, cl)) in [a, b].iter().zip(&classical).enumerate() {
                let y = [ya, yb][slot];
                let q = ComplexMatrix::from_fn(y, y, |r, c| {
                    if r == i && c == j {
                        one
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                factors[party] = Some(kron(cl, &q));
            }
            let term = kron_all(
                factors
                    .iter()
                    .map(|f| f.as_ref().expect("all slots filled")),
            )
            .expect("at least one party");
            m.add_scaled(&term, Complex64::new(1.0 / k as f64, 0.0));
        }
    }
    let state = DensityOperator::new(m, s.joint_profile().clone())?;
    let distance = fixed_point_distance(&s.product_censor()?, &state)?;
    if distance > PROTOCOL_TOL {
        return Ok(None);
    }
    let certificate = membership(s.composite_free_oracle(), &state)?;
    if certificate.verdict != Verdict::NonMember {
        return Ok(None);
    }
    Ok(Some(Evidence::Witness {
        construction: format!(
            "classical registers of parties {} and {} in basis states, maximally entangled pair across their quantum registers",
            s.parties()[a].label(),
            s.parties()[b].label()
        ),
        state,
        fixed_point_distance: distance,
        certificate,
    }))
}

pub(super) fn search(
    s: &Scenario,
    fixed: &FixedPointSubspace,
    opts: &BreakabilityOptions,
) -> Result<(BreakabilityStatus, Evidence)> {
    let profile = s.joint_profile();
    let censor = s.product_censor()?;
    let mut stream = SeededStream::new(opts.seed);
    let (mut accepted, mut discarded, mut members, mut inconclusive) = (0, 0, 0, 0);
    for k in 0..opts.budget {
        let g = stream.ginibre_state(profile);
        let x = fixed.project(g.matrix()).hermitian_part();
        let tr = x.trace().re;
        if tr <= 1e-12 {
            discarded += 1;
            continue;
        }
        let x = x.scale_real(1.0 / tr);
        if !is_density(&x, profile, DEFAULT_TOL).is_valid() {
            discarded += 1;
            continue;
        }
        let state = DensityOperator::new(x, profile.clone())?;
        accepted += 1;
        let certificate = membership(s.composite_free_oracle(), &state)?;
        match certificate.verdict {
            Verdict::Member => members += 1,
            Verdict::Inconclusive => inconclusive += 1,
            Verdict::NonMember => {
                let d = fixed_point_distance(&censor, &state)?;
                if d <= PROTOCOL_TOL {
                    return Ok((
                        BreakabilityStatus::BrokenWitness,
                        Evidence::Witness {
                            construction: format!("fixed-space projection of random sample {k}"),
                            state,
                            fixed_point_distance: d,
                            certificate,
                        },
                    ));
                }
            }
        }
    }
    Ok((
        BreakabilityStatus::NoWitnessFound,
        Evidence::Sampling {
            budget: opts.budget,
            seed: opts.seed,
            accepted,
            discarded,
            members,
            inconclusive,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EbCheckStatus {
    /// Every censor breaks entanglement and the free set is convex, so the
    /// censorship cannot be broken.
    UnbreakableProved,
    NotApplicable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbUnbreakabilityReport {
    pub status: EbCheckStatus,
    pub classifications: Vec<EbClassification>,
    pub analysis: BreakabilityStatus,
    /// False when the entanglement-breaking argument and the breakability
    /// analysis disagree; that is a hard failure.
    pub consistent: bool,
    pub reason: String,
}

/// Cross-checks the entanglement-breaking argument for convex free sets
/// against [`breakability_analysis_with`].
pub fn eb_unbreakability_check(
    s: &Scenario,
    opts: &BreakabilityOptions,
) -> Result<EbUnbreakabilityReport> {
    let classifications: Vec<EbClassification> = s
        .parties()
        .iter()
        .map(|p| is_entanglement_breaking(p.censor()))
        .collect();
    let analysis = breakability_analysis_with(s, opts)?.status;
    let convex = matches!(
        s.composite_free_oracle().kind(),
        OracleKind::ConvexComposite(_)
    );
    let (status, reason) = if !convex {
        (
            EbCheckStatus::NotApplicable,
            "composite free set is not convex".to_string(),
        )
    } else if classifications
        .iter()
        .any(|c| c.verdict == EbVerdict::Inconclusive)
    {
        (
            EbCheckStatus::Inconclusive,
            "entanglement-breaking classification inconclusive for some censor".to_string(),
        )
    } else if classifications.iter().any(|c| c.verdict == EbVerdict::No) {
        (
            EbCheckStatus::NotApplicable,
            "some censor does not break entanglement".to_string(),
        )
    } else {
        (
            EbCheckStatus::UnbreakableProved,
            "every censor breaks entanglement and the composite free set is convex".to_string(),
        )
    };
    let consistent = status != EbCheckStatus::UnbreakableProved
        || analysis == BreakabilityStatus::UnbreakableProved;
    Ok(EbUnbreakabilityReport {
        status,
        classifications,
        analysis,
        consistent,
        reason,
    })
}
