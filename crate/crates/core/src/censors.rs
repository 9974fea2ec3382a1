//! Censor channels and verifiers for their two defining conditions.
//!
//! Classical bases are always the computational basis; a two-level optical
//! encoding maps horizontal to index 0 and vertical to index 1.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::channels::{apply, KrausChannel};
use crate::error::{Error, Result};
use crate::qmath::{
    basis_ket, basis_projector, eig_hermitian, kron, trace_distance_matrices, Complex64,
    ComplexMatrix, DensityOperator, DimProfile, SeededStream,
};
use crate::resources::{membership, FreeSetOracle, GeneratorSet, MembershipVerdict, Verdict};

const UNITARY_TOL: f64 = 1e-10;
const PHASE_TOL: f64 = 1e-9;

/// Finite group of unitaries, closed up to global phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwirlGroup {
    unitaries: Vec<ComplexMatrix>,
    label: String,
}

/// `B = e^{iφ} A` for unitaries of dimension `d`, via `|Tr(A†B)| = d`.
fn equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let d = a.rows() as f64;
    (a.inner(b).norm() - d).abs() <= PHASE_TOL * d
}

impl TwirlGroup {
    pub fn new(unitaries: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let first = unitaries
            .first()
            .ok_or_else(|| Error::GroupAxiom(format!("{label}: no elements")))?;
        let d = first.rows();
        for (k, u) in unitaries.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{label}: element {k} is {}x{}, element 0 is {d}x{d}",
                    u.rows(),
                    u.cols()
                )));
            }
            let dev = u
                .adjoint()
                .matmul(u)
                .max_abs_diff(&ComplexMatrix::identity(d));
            if dev > UNITARY_TOL {
                return Err(Error::GroupAxiom(format!(
                    "{label}: element {k} is not unitary (max |U†U − I| = {dev:e})"
                )));
            }
        }
        let find = |m: &ComplexMatrix| unitaries.iter().position(|u| equal_up_to_phase(u, m));
        for (i, a) in unitaries.iter().enumerate() {
            if let Some(j) = unitaries[..i].iter().position(|u| equal_up_to_phase(u, a)) {
                return Err(Error::GroupAxiom(format!(
                    "{label}: elements {j} and {i} coincide up to phase"
                )));
            }
            if find(&a.adjoint()).is_none() {
                return Err(Error::GroupAxiom(format!(
                    "{label}: inverse of element {i} missing"
                )));
            }
            for (j, b) in unitaries.iter().enumerate() {
                if find(&a.matmul(b)).is_none() {
                    return Err(Error::GroupAxiom(format!(
                        "{label}: product of elements {i} and {j} missing"
                    )));
                }
            }
        }
        Ok(Self { unitaries, label })
    }

    /// `{I}` in dimension `d`.
    pub fn trivial(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Self::new(vec![ComplexMatrix::identity(d)], format!("trivial:{d}"))
    }

    /// Looks up a named group: `trivial[:D]`, `z2`, `x2`, `pauli1`.
    pub fn named(name: &str) -> Result<Self> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = |v: [Complex64; 4]| ComplexMatrix::new(2, 2, v.to_vec()).expect("2x2");
        let i2 = ComplexMatrix::identity(2);
        let x = m([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let y = m([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let z = m([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        match name {
            "trivial" => Self::trivial(2),
            "z2" => Self::new(vec![i2, z], "z2"),
            "x2" => Self::new(vec![i2, x], "x2"),
            "pauli1" => Self::new(vec![i2, x, y, z], "pauli1"),
            _ => match name.strip_prefix("trivial:").map(str::parse::<usize>) {
                Some(Ok(d)) => Self::trivial(d),
                _ => Err(Error::InvalidArgument(format!(
                    "unknown group '{name}' (expected trivial[:D], z2, x2 or pauli1)"
                ))),
            },
        }
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn order(&self) -> usize {
        self.unitaries.len()
    }
}

/// `ρ ↦ Σ_x |x⟩⟨x|ρ|x⟩⟨x|`.
pub fn dephasing_channel(dim: usize) -> Result<KrausChannel> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "dephasing needs dimension >= 2, got {dim}"
        )));
    }
    let p = DimProfile::single(dim)?;
    let kraus = (0..dim)
        .map(|x| basis_projector(dim, x))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(kraus, p.clone(), p)
}

/// `ρ ↦ (1/|G|) Σ_a U_a ρ U_a†`.
pub fn twirl_channel(group: &TwirlGroup) -> KrausChannel {
    let s = Complex64::new(1.0 / (group.order() as f64).sqrt(), 0.0);
    let kraus = group.unitaries.iter().map(|u| u.scale(s)).collect();
    let p = DimProfile::single(group.dim()).expect("group dimension was validated");
    // Unitarity was checked on construction, so the average is trace preserving.
    KrausChannel::from_raw(kraus, p.clone(), p).expect("equal shapes were validated")
}

/// `ρ ↦ Σ_x (|x⟩⟨x| ⊗ I) ρ (|x⟩⟨x| ⊗ I)` on `X ⊗ Y`.
pub fn cq_censor_channel(x_dim: usize, y_dim: usize) -> Result<KrausChannel> {
    if x_dim < 2 || y_dim < 1 {
        return Err(Error::InvalidArgument(format!(
            "cq censor needs x_dim >= 2 and y_dim >= 1, got {x_dim}x{y_dim}"
        )));
    }
    let p = DimProfile::new(vec![x_dim, y_dim])?;
    let id = ComplexMatrix::identity(y_dim);
    let kraus = (0..x_dim)
        .map(|x| basis_projector(x_dim, x).map(|px| kron(&px, &id)))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(kraus, p.clone(), p)
}

/// `ρ ↦ Tr(ρ) σ`, realized by `K_{ij} = √λ_i |v_i⟩⟨j|` for `σ = Σ λ_i |v_i⟩⟨v_i|`.
pub fn replacement_channel(target: &DensityOperator) -> Result<KrausChannel> {
    let d = target.dim();
    let eig = eig_hermitian(target.matrix())?;
    let mut kraus = Vec::new();
    for (i, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-15 {
            continue;
        }
        let v = eig.vectors.column(i);
        let root = Complex64::new(lambda.sqrt(), 0.0);
        for j in 0..d {
            kraus.push(ComplexMatrix::outer(&v, &basis_ket(d, j)).scale(root));
        }
    }
    KrausChannel::new(kraus, target.profile().clone(), target.profile().clone())
}

/// One of the four censor families.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensorSpec {
    Dephasing { dim: usize },
    Twirl { group: TwirlGroup },
    CqCensor { x_dim: usize, y_dim: usize },
    Replacement { target: DensityOperator },
}

impl CensorSpec {
    pub fn channel(&self) -> Result<KrausChannel> {
        match self {
            Self::Dephasing { dim } => dephasing_channel(*dim),
            Self::Twirl { group } => Ok(twirl_channel(group)),
            Self::CqCensor { x_dim, y_dim } => cq_censor_channel(*x_dim, *y_dim),
            Self::Replacement { target } => replacement_channel(target),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Dephasing { dim } => format!("dephasing:{dim}"),
            Self::Twirl { group } => format!("twirl:{}", group.label()),
            Self::CqCensor { x_dim, y_dim } => format!("cq:{x_dim}x{y_dim}"),
            Self::Replacement { target } => format!("replacement:{}", target.profile()),
        }
    }

    pub fn profile(&self) -> Result<DimProfile> {
        match self {
            Self::Dephasing { dim } => DimProfile::single(*dim),
            Self::Twirl { group } => DimProfile::single(group.dim()),
            Self::CqCensor { x_dim, y_dim } => DimProfile::new(vec![*x_dim, *y_dim]),
            Self::Replacement { target } => Ok(target.profile().clone()),
        }
    }

    /// Generators of the authorized subspace each censor leaves untouched.
    pub fn authorized_generators(&self) -> Result<GeneratorSet> {
        match self {
            Self::Dephasing { dim } => diagonal_generators(*dim),
            Self::Twirl { group } => twirled_generators(group),
            Self::CqCensor { x_dim, y_dim } => cq_generators(*x_dim, *y_dim),
            Self::Replacement { target } => GeneratorSet::new(vec![target.clone()]),
        }
    }

    /// The free family each censor is designed against.
    pub fn default_free_oracle(&self) -> Result<FreeSetOracle> {
        match self {
            Self::Dephasing { dim } => FreeSetOracle::incoherent(*dim),
            Self::Twirl { group } => FreeSetOracle::twirl_invariant(group.clone()),
            Self::CqCensor { x_dim, y_dim } => {
                FreeSetOracle::separable_ppt(DimProfile::new(vec![*x_dim, *y_dim])?)
            }
            Self::Replacement { target } => FreeSetOracle::separable_ppt(target.profile().clone()),
        }
    }
}

/// `|j⟩`, then `(|j⟩ + |k⟩)/√2` and `(|j⟩ + i|k⟩)/√2` for `j < k`: `d²` pure
/// states whose span is every operator.
pub fn informationally_complete_states(d: usize) -> Result<Vec<DensityOperator>> {
    let p = DimProfile::single(d)?;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(DensityOperator::pure(&basis_ket(d, j), p.clone())?);
    }
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for j in 0..d {
        for k in (j + 1)..d {
            for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                v[j] = h;
                v[k] = h * phase;
                out.push(DensityOperator::pure(&v, p.clone())?);
            }
        }
    }
    Ok(out)
}

pub fn diagonal_generators(d: usize) -> Result<GeneratorSet> {
    let p = DimProfile::single(d)?;
    GeneratorSet::new(
        (0..d)
            .map(|x| DensityOperator::new(basis_projector(d, x)?, p.clone()))
            .collect::<Result<_>>()?,
    )
}

/// `|x⟩⟨x| ⊗ τ` for every `x` and every informationally complete `τ`.
pub fn cq_generators(x_dim: usize, y_dim: usize) -> Result<GeneratorSet> {
    let xs = diagonal_generators(x_dim)?;
    let ys = GeneratorSet::new(informationally_complete_states(y_dim)?)?;
    xs.tensor(&ys)
}

pub fn twirled_generators(group: &TwirlGroup) -> Result<GeneratorSet> {
    let ch = twirl_channel(group);
    GeneratorSet::new(
        informationally_complete_states(group.dim())?
            .iter()
            .map(|s| apply(&ch, s))
            .collect::<Result<_>>()?,
    )
}

/// Version of the fixed adversarial input list used by
/// [`verify_resource_destroying`].
pub const ADVERSARIAL_SET_VERSION: u32 = 1;

/// Labelled inputs that random sampling tends to miss: maximally coherent
/// and basis states, maximally entangled states across the first subsystem,
/// a product of local maximally coherent states and seeded random pure states.
pub fn adversarial_states(profile: &DimProfile) -> Result<Vec<(String, DensityOperator)>> {
    let d = profile.total();
    let one = Complex64::new(1.0, 0.0);
    let mut out = vec![
        (
            "max_coherent".to_string(),
            DensityOperator::pure(&vec![one; d], profile.clone())?,
        ),
        (
            "basis_0".to_string(),
            DensityOperator::pure(&basis_ket(d, 0), profile.clone())?,
        ),
        (
            format!("basis_{}", d - 1),
            DensityOperator::pure(&basis_ket(d, d - 1), profile.clone())?,
        ),
    ];
    if profile.len() >= 2 {
        let da = profile.dims()[0];
        let db = d / da;
        let k = da.min(db);
        let families: [(&str, usize, bool); 4] = [
            ("phi_plus", 0, false),
            ("phi_minus", 0, true),
            ("psi_plus", 1, false),
            ("psi_minus", 1, true),
        ];
        for (name, shift, alternate) in families {
            if shift == 1 && k < 2 {
                continue;
            }
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            for i in 0..k {
                let sign = if alternate && i % 2 == 1 { -1.0 } else { 1.0 };
                v[i * db + (i + shift) % k] = Complex64::new(sign, 0.0);
            }
            out.push((
                name.to_string(),
                DensityOperator::pure(&v, profile.clone())?,
            ));
        }
        let mut local = Vec::new();
        for &dk in profile.dims() {
            local.push(DensityOperator::pure(
                &vec![one; dk],
                DimProfile::single(dk)?,
            )?);
        }
        let prod = DensityOperator::tensor_all(local.iter())?.with_profile(profile.clone())?;
        out.push(("plus_product".to_string(), prod));
    }
    for seed in 0..4u64 {
        let psi = SeededStream::new(0xAD5E_0000 + seed).pure_state(profile);
        out.push((format!("random_pure_{seed}"), psi));
    }
    Ok(out)
}

/// An input whose image was not certified free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdWitness {
    pub label: String,
    pub input: ComplexMatrix,
    pub output: ComplexMatrix,
    pub verdict: MembershipVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceDestroyingReport {
    /// Every tested output was certified free.
    pub pass: bool,
    pub random_samples: usize,
    pub adversarial_inputs: usize,
    pub adversarial_set_version: u32,
    pub members: usize,
    pub non_members: usize,
    pub inconclusive: usize,
    /// First few non-member outputs.
    pub failures: Vec<RdWitness>,
    /// First few undecided outputs; these never count towards a pass.
    pub undecided: Vec<RdWitness>,
}

const WITNESS_CAP: usize = 8;

/// Checks that `ch` maps every tested input into the free set.
pub fn verify_resource_destroying(
    ch: &KrausChannel,
    free: &FreeSetOracle,
    samples: usize,
    seed: u64,
) -> Result<ResourceDestroyingReport> {
    if ch.out_dim() != free.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel output dimension {} against free set {}",
            ch.out_dim(),
            free.label()
        )));
    }
    let profile = ch.in_profile().clone();
    let adversarial = adversarial_states(&profile)?;
    let mut stream = SeededStream::new(seed);
    let mut inputs: Vec<(String, DensityOperator)> =
        Vec::with_capacity(samples + adversarial.len());
    inputs.extend(adversarial);
    let adversarial_inputs = inputs.len();
    for k in 0..samples {
        inputs.push((format!("ginibre_{k}"), stream.ginibre_state(&profile)));
    }

    let mut report = ResourceDestroyingReport {
        pass: false,
        random_samples: samples,
        adversarial_inputs,
        adversarial_set_version: ADVERSARIAL_SET_VERSION,
        members: 0,
        non_members: 0,
        inconclusive: 0,
        failures: Vec::new(),
        undecided: Vec::new(),
    };
    for (label, rho) in inputs {
        let out = apply(ch, &rho)?;
        let verdict = membership(free, &out)?;
        let witness = |verdict| RdWitness {
            label,
            input: rho.matrix().clone(),
            output: out.matrix().clone(),
            verdict,
        };
        match verdict.verdict {
            Verdict::Member => report.members += 1,
            Verdict::NonMember => {
                report.non_members += 1;
                if report.failures.len() < WITNESS_CAP {
                    report.failures.push(witness(verdict));
                }
            }
            Verdict::Inconclusive => {
                report.inconclusive += 1;
                if report.undecided.len() < WITNESS_CAP {
                    report.undecided.push(witness(verdict));
                }
            }
        }
    }
    report.pass = report.non_members == 0 && report.inconclusive == 0;
    Ok(report)
}

/// Seed of the affine combinations drawn by [`verify_freeness_preserving`].
pub const FREENESS_SEED: u64 = 0xF0F0_2024;
/// Number of affine combinations drawn by [`verify_freeness_preserving`].
pub const FREENESS_COMBINATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreenessWitness {
    pub label: String,
    pub input: ComplexMatrix,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreenessReport {
    pub pass: bool,
    pub generators_checked: usize,
    pub combinations_checked: usize,
    /// Affine combinations that were not density operators.
    pub combinations_skipped: usize,
    pub max_distance: f64,
    /// The input moved furthest, when it exceeds the tolerance.
    pub witness: Option<FreenessWitness>,
}

/// Checks that every generator, and random affine combinations of them,
/// are left unchanged by `ch` within `tol` in trace distance.
///
/// Combination weights are drawn from `[-0.25, 1)` and rescaled to sum to
/// one, so they may be negative; combinations that fail to be density
/// operators are skipped and counted.
pub fn verify_freeness_preserving(
    ch: &KrausChannel,
    gens: &GeneratorSet,
    tol: f64,
) -> Result<FreenessReport> {
    if gens.dim() != ch.in_dim() || ch.in_dim() != ch.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "generators of dimension {} for a channel {} -> {}",
            gens.dim(),
            ch.in_profile(),
            ch.out_profile()
        )));
    }
    let mut report = FreenessReport {
        pass: false,
        generators_checked: 0,
        combinations_checked: 0,
        combinations_skipped: 0,
        max_distance: 0.0,
        witness: None,
    };
    let check = |label: String, rho: &DensityOperator, report: &mut FreenessReport| -> Result<()> {
        let out = apply(ch, rho)?;
        let distance = trace_distance_matrices(out.matrix(), rho.matrix())?;
        if distance > report.max_distance {
            report.max_distance = distance;
            if distance > tol {
                report.witness = Some(FreenessWitness {
                    label,
                    input: rho.matrix().clone(),
                    distance,
                });
            }
        }
        Ok(())
    };
    for (k, g) in gens.states().iter().enumerate() {
        check(format!("generator_{k}"), g, &mut report)?;
        report.generators_checked += 1;
    }

    let mut stream = SeededStream::new(FREENESS_SEED);
    let d = gens.dim();
    for c in 0..FREENESS_COMBINATIONS {
        let w: Vec<f64> = (0..gens.len())
            .map(|_| stream.uniform_range(-0.25, 1.0))
            .collect();
        let total: f64 = w.iter().sum();
        if total < 0.1 {
            report.combinations_skipped += 1;
            continue;
        }
        let mut m = ComplexMatrix::zeros(d, d);
        for (g, wi) in gens.states().iter().zip(&w) {
            m.add_scaled(g.matrix(), Complex64::new(wi / total, 0.0));
        }
        match DensityOperator::new(m, gens.profile().clone()) {
            Ok(rho) => {
                check(format!("combination_{c}"), &rho, &mut report)?;
                report.combinations_checked += 1;
            }
            Err(_) => report.combinations_skipped += 1,
        }
    }
    report.pass = report.max_distance <= tol;
    Ok(report)
}
