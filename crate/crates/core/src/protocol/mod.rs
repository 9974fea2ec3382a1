//! The censorship protocol over `N` sender/receiver links.
//!
//! Each sender's system passes through optional noise and then through the
//! sender's censor; receivers get the product of the local outputs. Noise is
//! always applied before the censor.

mod breakability;
mod noise;

pub use breakability::{
    breakability_analysis, breakability_analysis_with, eb_unbreakability_check,
    BreakabilityOptions, BreakabilityStatus, BreakabilityVerdict, EbCheckStatus,
    EbUnbreakabilityReport, Evidence, DEFAULT_BUDGET,
};
pub use noise::{
    commutation_check, correction_effect_probe, nongenerating_check, swap_channel,
    CommutationReport, CommutationWitness, CorrectionReport, NongeneratingReport,
    NongeneratingWitness,
};

use serde::Serialize;

use crate::censors::CensorSpec;
use crate::channels::{apply, fixed_point_distance, tensor_channels, KrausChannel};
use crate::error::{Error, Result};
use crate::qmath::{trace_distance, DensityOperator, DimProfile};
use crate::resources::{membership, FreeSetOracle, GeneratorSet, MembershipVerdict};

/// Slack for fixed points and for the transcript's unaltered flag.
pub const PROTOCOL_TOL: f64 = 1e-8;

/// One sender/receiver link.
#[derive(Debug, Clone)]
pub struct Party {
    label: String,
    local_profile: DimProfile,
    noise: Option<KrausChannel>,
    censor: KrausChannel,
    authorized: GeneratorSet,
    free_oracle: FreeSetOracle,
}

impl Party {
    /// Checks dimensions and that every authorized generator passes the
    /// censor unchanged, so the user agreement is self-consistent.
    pub fn new(
        label: impl Into<String>,
        local_profile: DimProfile,
        censor: KrausChannel,
        authorized: GeneratorSet,
        free_oracle: FreeSetOracle,
    ) -> Result<Self> {
        let label = label.into();
        let d = local_profile.total();
        if censor.in_dim() != d || censor.out_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "party {label}: censor {} -> {} on local space {local_profile}",
                censor.in_profile(),
                censor.out_profile()
            )));
        }
        let censor = censor.with_profiles(local_profile.clone(), local_profile.clone())?;
        if authorized.dim() != d || free_oracle.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "party {label}: generators of dimension {} and free set {} on local space {local_profile}",
                authorized.dim(),
                free_oracle.label()
            )));
        }
        let authorized = GeneratorSet::new(
            authorized
                .states()
                .iter()
                .map(|g| g.with_profile(local_profile.clone()))
                .collect::<Result<_>>()?,
        )?;
        for (k, g) in authorized.states().iter().enumerate() {
            let dist = fixed_point_distance(&censor, g)?;
            if dist > PROTOCOL_TOL {
                return Err(Error::InvalidArgument(format!(
                    "party {label}: authorized generator {k} is moved by the censor (trace distance {dist:e})"
                )));
            }
        }
        Ok(Self {
            label,
            local_profile,
            noise: None,
            censor,
            authorized,
            free_oracle,
        })
    }

    /// A party using a standard censor with its default authorized set and
    /// free family.
    pub fn from_spec(label: impl Into<String>, spec: &CensorSpec) -> Result<Self> {
        Self::new(
            label,
            spec.profile()?,
            spec.channel()?,
            spec.authorized_generators()?,
            spec.default_free_oracle()?,
        )
    }

    pub fn with_noise(mut self, noise: KrausChannel) -> Result<Self> {
        let d = self.local_profile.total();
        if noise.in_dim() != d || noise.out_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "party {}: noise {} -> {} on local space {}",
                self.label,
                noise.in_profile(),
                noise.out_profile(),
                self.local_profile
            )));
        }
        self.noise =
            Some(noise.with_profiles(self.local_profile.clone(), self.local_profile.clone())?);
        Ok(self)
    }

    pub fn with_free_oracle(mut self, free_oracle: FreeSetOracle) -> Result<Self> {
        if free_oracle.dim() != self.local_profile.total() {
            return Err(Error::DimensionMismatch(format!(
                "party {}: free set {} on local space {}",
                self.label,
                free_oracle.label(),
                self.local_profile
            )));
        }
        self.free_oracle = free_oracle;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn local_profile(&self) -> &DimProfile {
        &self.local_profile
    }

    pub fn noise(&self) -> Option<&KrausChannel> {
        self.noise.as_ref()
    }

    pub fn censor(&self) -> &KrausChannel {
        &self.censor
    }

    pub fn authorized(&self) -> &GeneratorSet {
        &self.authorized
    }

    pub fn free_oracle(&self) -> &FreeSetOracle {
        &self.free_oracle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeKind {
    Affine,
    Convex,
}

/// Parties, a joint input, and the free family the outputs are judged by.
#[derive(Debug, Clone)]
pub struct Scenario {
    parties: Vec<Party>,
    input_state: DensityOperator,
    composite_free_oracle: FreeSetOracle,
    noisy: bool,
    joint_profile: DimProfile,
}

impl Scenario {
    /// Validates the joint profile and the composite family.
    ///
    /// The composite family needs one factor per party, of the party's
    /// dimension, all from the same family; mixed families have no agreed
    /// composite and are rejected.
    pub fn new(
        parties: Vec<Party>,
        input_state: DensityOperator,
        composite_free_oracle: FreeSetOracle,
    ) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidArgument("scenario without parties".into()));
        }
        let joint_profile = DimProfile::concat_all(parties.iter().map(|p| &p.local_profile))?;
        if input_state.dim() != joint_profile.total() {
            return Err(Error::DimensionMismatch(format!(
                "input of dimension {} for parties on {joint_profile}",
                input_state.dim()
            )));
        }
        let input_state = input_state.with_profile(joint_profile.clone())?;
        let factors = composite_free_oracle.factors().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{} is not a composite free set",
                composite_free_oracle.label()
            ))
        })?;
        if factors.len() != parties.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors in the composite free set for {} parties",
                factors.len(),
                parties.len()
            )));
        }
        for (f, p) in factors.iter().zip(&parties) {
            if f.dim() != p.local_profile.total() {
                return Err(Error::DimensionMismatch(format!(
                    "factor {} for party {} on {}",
                    f.label(),
                    p.label,
                    p.local_profile
                )));
            }
        }
        if factors.iter().any(|f| f.family() != factors[0].family()) {
            return Err(Error::Unsupported(format!(
                "composite free set {} mixes families",
                composite_free_oracle.label()
            )));
        }
        let noisy = parties.iter().any(|p| p.noise.is_some());
        Ok(Self {
            parties,
            input_state,
            composite_free_oracle,
            noisy,
            joint_profile,
        })
    }

    /// Uses the parties' own free families as the composite factors.
    pub fn with_composite(
        parties: Vec<Party>,
        input_state: DensityOperator,
        kind: CompositeKind,
    ) -> Result<Self> {
        let factors = parties.iter().map(|p| p.free_oracle.clone()).collect();
        let oracle = match kind {
            CompositeKind::Affine => FreeSetOracle::affine_composite(factors)?,
            CompositeKind::Convex => FreeSetOracle::convex_composite(factors)?,
        };
        Self::new(parties, input_state, oracle)
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn input_state(&self) -> &DensityOperator {
        &self.input_state
    }

    pub fn composite_free_oracle(&self) -> &FreeSetOracle {
        &self.composite_free_oracle
    }

    pub fn noisy(&self) -> bool {
        self.noisy
    }

    pub fn joint_profile(&self) -> &DimProfile {
        &self.joint_profile
    }

    /// `Δ′₁ ⊗ ⋯ ⊗ Δ′_N`.
    pub fn product_censor(&self) -> Result<KrausChannel> {
        let chs: Vec<KrausChannel> = self.parties.iter().map(|p| p.censor.clone()).collect();
        tensor_channels(&chs)
    }

    /// `Φ₁ ⊗ ⋯ ⊗ Φ_N`, identity where a party has no noise.
    pub fn product_noise(&self) -> Result<KrausChannel> {
        let chs: Vec<KrausChannel> = self
            .parties
            .iter()
            .map(|p| {
                p.noise
                    .clone()
                    .unwrap_or_else(|| KrausChannel::identity(p.local_profile.clone()))
            })
            .collect();
        tensor_channels(&chs)
    }

    /// Same parties and free family with a different joint input.
    pub fn with_input(&self, input_state: DensityOperator) -> Result<Self> {
        Self::new(
            self.parties.clone(),
            input_state,
            self.composite_free_oracle.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub label: String,
    pub state: DensityOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    /// `input`, then `post_noise` for noisy scenarios, then `post_censor`.
    pub stages: Vec<Stage>,
    pub transmitted_unaltered: bool,
    /// Trace distance between the input and the received state.
    pub input_output_distance: f64,
    pub output_membership: MembershipVerdict,
}

impl Transcript {
    pub fn final_state(&self) -> &DensityOperator {
        &self
            .stages
            .last()
            .expect("transcripts are never empty")
            .state
    }
}

/// Sends the input through the noise and then the censors.
pub fn run_scenario(s: &Scenario) -> Result<Transcript> {
    let mut stages = vec![Stage {
        label: "input".into(),
        state: s.input_state.clone(),
    }];
    let mut current = s.input_state.clone();
    if s.noisy {
        current = apply(&s.product_noise()?, &current)?;
        stages.push(Stage {
            label: "post_noise".into(),
            state: current.clone(),
        });
    }
    let out = apply(&s.product_censor()?, &current)?;
    stages.push(Stage {
        label: "post_censor".into(),
        state: out.clone(),
    });
    let input_output_distance = trace_distance(&s.input_state, &out)?;
    Ok(Transcript {
        stages,
        transmitted_unaltered: input_output_distance <= PROTOCOL_TOL,
        input_output_distance,
        output_membership: membership(&s.composite_free_oracle, &out)?,
    })
}

#[cfg(test)]
mod tests;
