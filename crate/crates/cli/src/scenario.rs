//! Scenario files and their resolution into protocol scenarios.

use censorlab::censors::CensorSpec;
use censorlab::protocol::{CompositeKind, Party, Scenario};
use censorlab::qmath::{Complex64, ComplexMatrix, DensityOperator, DimProfile};
use serde::{Deserialize, Serialize};

use crate::specs::{parse_censor, parse_free, parse_noise, parse_state, profile};
use crate::CliError;

/// The only scenario (and report) schema version understood so far.
pub const SCHEMA_VERSION: u32 = 1;

fn default_samples() -> usize {
    16
}

fn default_budget() -> usize {
    censorlab::protocol::DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub parties: Vec<PartyFile>,
    pub input_state: StateField,
    #[serde(default)]
    pub composite: CompositeField,
    /// One free-set name per party; empty keeps each censor's default.
    #[serde(default)]
    pub oracles: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Random mixtures of authorized states used by the noise checks.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub censor: CensorField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseField>,
    /// Local subsystem dimensions; defaults to the censor's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CensorField {
    Named(String),
    /// Replacement towards an explicit state on the party's `dims`.
    Replacement {
        replacement: StateField,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseField {
    Named(String),
    Unitary { unitary: MatrixField },
}

/// Rows of `[re, im]` pairs.
pub type MatrixField = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateField {
    Named(String),
    Matrix {
        matrix: MatrixField,
    },
    /// One state per subsystem, in order.
    Product {
        product: Vec<StateField>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeField {
    #[default]
    Affine,
    Convex,
}

/// A resolved scenario plus the names used to build it.
pub struct Resolved {
    pub scenario: Scenario,
    pub parties: Vec<PartySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartySummary {
    pub label: String,
    pub censor: String,
    pub noise: Option<String>,
    pub dims: Vec<usize>,
    pub free_set: String,
}

pub fn matrix_from_field(rows: &MatrixField) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Validation(format!(
            "explicit matrices must be square; got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    ComplexMatrix::new(n, n, data).map_err(CliError::from)
}

pub fn resolve_state(field: &StateField, p: &DimProfile) -> Result<DensityOperator, CliError> {
    match field {
        StateField::Named(name) => parse_state(name, p),
        StateField::Matrix { matrix } => {
            DensityOperator::new(matrix_from_field(matrix)?, p.clone()).map_err(CliError::from)
        }
        StateField::Product { product } => {
            if product.len() != p.len() {
                return Err(CliError::Validation(format!(
                    "product state has {} factors for {} subsystems {p}",
                    product.len(),
                    p.len()
                )));
            }
            let factors: Vec<DensityOperator> = product
                .iter()
                .zip(p.dims())
                .map(|(f, &d)| resolve_state(f, &profile(&[d])?))
                .collect::<Result<_, _>>()?;
            DensityOperator::tensor_all(factors.iter())
                .and_then(|s| s.with_profile(p.clone()))
                .map_err(CliError::from)
        }
    }
}

/// Basis states on the classical registers and a maximally entangled pair
/// across the two quantum registers, for two parties with profiles `[x, y]`.
fn cq_breaking_state(
    locals: &[DimProfile],
    joint: &DimProfile,
) -> Result<DensityOperator, CliError> {
    let (x, y) = match locals {
        [a, b] if a.dims().len() == 2 && a.dims() == b.dims() => (a.dims()[0], a.dims()[1]),
        _ => {
            return Err(CliError::Validation(
                "cq_breaking needs two parties with equal [X, Y] profiles".into(),
            ))
        }
    };
    let mut amp = vec![Complex64::new(0.0, 0.0); joint.total()];
    for k in 0..y {
        // Order X₁ Y₁ X₂ Y₂ with X₁ = 0 and X₂ = 1.
        amp[(k * x + 1) * y + k] = Complex64::new(1.0, 0.0);
    }
    DensityOperator::pure(&amp, joint.clone()).map_err(CliError::from)
}

fn censor_spec(field: &CensorField, dims: Option<&[usize]>) -> Result<CensorSpec, CliError> {
    match field {
        CensorField::Named(name) => parse_censor(name),
        CensorField::Replacement { replacement } => {
            let dims = dims.ok_or_else(|| {
                CliError::Parse("an explicit replacement target needs the party's dims".into())
            })?;
            let target = resolve_state(replacement, &profile(dims)?)?;
            Ok(CensorSpec::Replacement { target })
        }
    }
}

fn noise_label(field: &NoiseField) -> String {
    match field {
        NoiseField::Named(name) => name.clone(),
        NoiseField::Unitary { .. } => "unitary".into(),
    }
}

pub fn resolve(file: &ScenarioFile) -> Result<Resolved, CliError> {
    if file.version != SCHEMA_VERSION {
        return Err(CliError::Parse(format!(
            "version: unsupported scenario version {} (expected {SCHEMA_VERSION})",
            file.version
        )));
    }
    if file.parties.is_empty() {
        return Err(CliError::Validation(
            "parties: at least one party is required".into(),
        ));
    }
    if !file.oracles.is_empty() && file.oracles.len() != file.parties.len() {
        return Err(CliError::Validation(format!(
            "oracles: {} names for {} parties",
            file.oracles.len(),
            file.parties.len()
        )));
    }
    let mut parties = Vec::new();
    let mut summaries = Vec::new();
    for (i, pf) in file.parties.iter().enumerate() {
        let label = pf.label.clone().unwrap_or_else(|| format!("A{}", i + 1));
        let spec = censor_spec(&pf.censor, pf.dims.as_deref())?;
        let local = match &pf.dims {
            Some(d) => profile(d)?,
            None => spec.profile()?,
        };
        let oracle = match file.oracles.get(i) {
            Some(name) => parse_free(name, &local)?,
            None => spec.default_free_oracle()?,
        };
        let mut party = Party::new(
            label.clone(),
            local.clone(),
            spec.channel()?,
            spec.authorized_generators()?,
            oracle.clone(),
        )?;
        if let Some(noise) = &pf.noise {
            let ch = match noise {
                NoiseField::Named(name) => parse_noise(name, &local)?,
                NoiseField::Unitary { unitary } => censorlab::channels::KrausChannel::unitary(
                    matrix_from_field(unitary)?,
                    local.clone(),
                )?,
            };
            party = party.with_noise(ch)?;
        }
        summaries.push(PartySummary {
            label,
            censor: spec.label(),
            noise: pf.noise.as_ref().map(noise_label),
            dims: local.dims().to_vec(),
            free_set: oracle.label(),
        });
        parties.push(party);
    }
    let locals: Vec<DimProfile> = parties.iter().map(|p| p.local_profile().clone()).collect();
    let joint = DimProfile::concat_all(locals.iter())?;
    let input = match &file.input_state {
        StateField::Named(name) if name == "cq_breaking" => cq_breaking_state(&locals, &joint)?,
        other => resolve_state(other, &joint)?,
    };
    let kind = match file.composite {
        CompositeField::Affine => CompositeKind::Affine,
        CompositeField::Convex => CompositeKind::Convex,
    };
    let scenario = Scenario::with_composite(parties, input, kind)?;
    Ok(Resolved {
        scenario,
        parties: summaries,
    })
}
