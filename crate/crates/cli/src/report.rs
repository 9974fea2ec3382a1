//! Report assembly for `run` and `verify`.

use std::time::Instant;

use censorlab::censors::{
    replacement_channel, verify_freeness_preserving, verify_resource_destroying, CensorSpec,
    FreenessReport, ResourceDestroyingReport,
};
use censorlab::channels::{
    apply, channel_distance, idempotence_defect, is_cptp, is_entanglement_breaking, CptpReport,
    EbClassification, EbVerdict,
};
use censorlab::protocol::{
    breakability_analysis_with, commutation_check, correction_effect_probe,
    eb_unbreakability_check, nongenerating_check, run_scenario, BreakabilityOptions,
    BreakabilityVerdict, CommutationReport, CorrectionReport, EbUnbreakabilityReport,
    NongeneratingReport, Transcript,
};
use censorlab::qmath::{ComplexMatrix, DensityOperator, DEFAULT_TOL};
use censorlab::resources::FreeSetOracle;
use serde::Serialize;

use crate::scenario::{resolve, PartySummary, ScenarioFile, SCHEMA_VERSION};
use crate::{digest, CliError};

pub const TOOL_NAME: &str = "censorlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wall-clock timings, kept apart from the deterministic body.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub resolve_ms: f64,
    pub transcript_ms: f64,
    pub breakability_ms: f64,
    pub checks_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseChecks {
    pub party: String,
    pub commutation: CommutationReport,
    pub nongenerating: NongeneratingReport,
    /// Effect of the censor on the first authorized generator after noise.
    pub correction: CorrectionReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunBody {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub scenario_digest: String,
    pub seed: u64,
    pub budget: usize,
    pub parties: Vec<PartySummary>,
    pub composite_free_set: String,
    pub transcript: Transcript,
    pub breakability: BreakabilityVerdict,
    pub eb_check: EbUnbreakabilityReport,
    pub noise_checks: Vec<NoiseChecks>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub body: RunBody,
    pub timing: Timing,
}

fn ms(since: Instant) -> f64 {
    (since.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Runs the scenario, the breakability analysis and, for noisy parties,
/// the noise checks.
pub fn run(file: &ScenarioFile) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let resolved = resolve(file)?;
    let s = &resolved.scenario;
    let resolve_ms = ms(start);

    let t = Instant::now();
    let transcript = run_scenario(s)?;
    let transcript_ms = ms(t);

    let t = Instant::now();
    let opts = BreakabilityOptions {
        budget: file.budget,
        seed: file.seed,
    };
    let breakability = breakability_analysis_with(s, &opts)?;
    let eb_check = eb_unbreakability_check(s, &opts)?;
    let breakability_ms = ms(t);

    let t = Instant::now();
    let mut noise_checks = Vec::new();
    for party in s.parties() {
        let Some(noise) = party.noise() else { continue };
        let gens = party.authorized();
        noise_checks.push(NoiseChecks {
            party: party.label().to_string(),
            commutation: commutation_check(noise, party.censor(), gens, file.samples)?,
            nongenerating: nongenerating_check(noise, party.free_oracle(), gens, file.samples)?,
            correction: correction_effect_probe(noise, party.censor(), &gens.states()[0])?,
        });
    }
    let checks_ms = ms(t);

    Ok(RunReport {
        body: RunBody {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME,
            tool_version: TOOL_VERSION,
            scenario_digest: digest(file)?,
            seed: file.seed,
            budget: file.budget,
            parties: resolved.parties,
            composite_free_set: s.composite_free_oracle().label(),
            transcript,
            breakability,
            eb_check,
            noise_checks,
        },
        timing: Timing {
            resolve_ms,
            transcript_ms,
            breakability_ms,
            checks_ms,
            total_ms: ms(start),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdempotenceCheck {
    pub pass: bool,
    pub defect: f64,
}

/// Whether the channel sends every input to one fixed output.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantOutput {
    pub constant: bool,
    /// Superoperator distance to the replacement channel towards `output`.
    pub distance: f64,
    pub output: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub censor: String,
    pub free_set: String,
    pub samples: usize,
    pub seed: u64,
    pub cptp: CptpReport,
    pub idempotent: IdempotenceCheck,
    pub entanglement_breaking: EbClassification,
    pub resource_destroying: ResourceDestroyingReport,
    pub freeness_preserving: FreenessReport,
    pub constant_output: ConstantOutput,
}

/// Tolerance for calling a channel constant.
const CONSTANT_TOL: f64 = 1e-12;

pub fn verify(
    censor: &CensorSpec,
    free: &FreeSetOracle,
    samples: usize,
    seed: u64,
) -> Result<VerifyReport, CliError> {
    let ch = censor.channel()?;
    let defect = idempotence_defect(&ch)?;
    let mixed = DensityOperator::maximally_mixed(ch.in_profile().clone());
    let output = apply(&ch, &mixed)?;
    let distance = channel_distance(&ch, &replacement_channel(&output)?)?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        tool: TOOL_NAME,
        tool_version: TOOL_VERSION,
        censor: censor.label(),
        free_set: free.label(),
        samples,
        seed,
        cptp: is_cptp(&ch, DEFAULT_TOL),
        idempotent: IdempotenceCheck {
            pass: defect <= DEFAULT_TOL,
            defect,
        },
        entanglement_breaking: is_entanglement_breaking(&ch),
        resource_destroying: verify_resource_destroying(&ch, free, samples, seed)?,
        freeness_preserving: verify_freeness_preserving(
            &ch,
            &censor.authorized_generators()?,
            DEFAULT_TOL,
        )?,
        constant_output: ConstantOutput {
            constant: distance <= CONSTANT_TOL,
            distance,
            output: output.into_matrix(),
        },
    })
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Plain-text table of a verification report.
pub fn verify_table(r: &VerifyReport) -> String {
    let eb = match r.entanglement_breaking.verdict {
        EbVerdict::Yes => "YES",
        EbVerdict::No => "NO",
        EbVerdict::Inconclusive => "INCONCLUSIVE",
    };
    let rd = &r.resource_destroying;
    let fr = &r.freeness_preserving;
    let rows = [
        (
            "cptp",
            pass(r.cptp.is_cptp),
            format!("trace-preservation deviation {:.3e}", r.cptp.tp_deviation),
        ),
        (
            "idempotent",
            pass(r.idempotent.pass),
            format!("max |Λ∘Λ − Λ| {:.3e}", r.idempotent.defect),
        ),
        (
            "entanglement_breaking",
            eb,
            r.entanglement_breaking.reason.clone(),
        ),
        (
            "resource_destroying",
            pass(rd.pass),
            format!(
                "{} free, {} not free, {} undecided of {} inputs",
                rd.members,
                rd.non_members,
                rd.inconclusive,
                rd.random_samples + rd.adversarial_inputs
            ),
        ),
        (
            "freeness_preserving",
            pass(fr.pass),
            format!(
                "{} generators, {} combinations, max distance {:.3e}",
                fr.generators_checked, fr.combinations_checked, fr.max_distance
            ),
        ),
        (
            "constant_output",
            if r.constant_output.constant {
                "YES"
            } else {
                "NO"
            },
            format!("distance to replacement {:.3e}", r.constant_output.distance),
        ),
    ];
    let mut out = format!("censor {}  free set {}\n", r.censor, r.free_set);
    for (name, result, detail) in rows {
        out.push_str(&format!("{name:<22} {result:<13} {detail}\n"));
    }
    out
}
