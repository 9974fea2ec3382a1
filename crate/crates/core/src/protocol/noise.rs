//! Interplay between channel noise and the censor.

use serde::Serialize;

use super::PROTOCOL_TOL;
use crate::channels::{apply, fixed_point_distance, KrausChannel};
use crate::error::{Error, Result};
use crate::qmath::{
    trace_distance, Complex64, ComplexMatrix, DensityOperator, DimProfile, SeededStream,
};
use crate::resources::{membership, FreeSetOracle, GeneratorSet, MembershipVerdict, Verdict};

const SAMPLE_SEED: u64 = 0x0015_E000;
const WITNESS_CAP: usize = 8;

/// `ρ ⊗ σ ↦ σ ⊗ ρ` on two factors of equal dimension.
pub fn swap_channel(x_dim: usize, y_dim: usize) -> Result<KrausChannel> {
    if x_dim != y_dim {
        return Err(Error::InvalidArgument(format!(
            "swap needs equal factors, got {x_dim}x{y_dim}"
        )));
    }
    let d = x_dim;
    // U|a⟩|b⟩ = |b⟩|a⟩: entry (b·d + a, a·d + b) is one.
    let u = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (a, b) = (c / d, c % d);
        if r == b * d + a {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    KrausChannel::unitary(u, DimProfile::new(vec![d, d])?)
}

/// Generators followed by `samples` random convex mixtures of them.
fn test_inputs(gens: &GeneratorSet, samples: usize) -> Result<Vec<(String, DensityOperator)>> {
    let mut out: Vec<(String, DensityOperator)> = gens
        .states()
        .iter()
        .enumerate()
        .map(|(k, g)| (format!("generator_{k}"), g.clone()))
        .collect();
    let mut stream = SeededStream::new(SAMPLE_SEED);
    let d = gens.dim();
    for k in 0..samples {
        let w = stream.probabilities(gens.len());
        let mut m = ComplexMatrix::zeros(d, d);
        for (g, wi) in gens.states().iter().zip(&w) {
            m.add_scaled(g.matrix(), Complex64::new(*wi, 0.0));
        }
        out.push((
            format!("mixture_{k}"),
            DensityOperator::new(m, gens.profile().clone())?,
        ));
    }
    Ok(out)
}

fn check_square(ch: &KrausChannel, d: usize, what: &str) -> Result<()> {
    if ch.in_dim() != d || ch.out_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what} {} -> {} on states of dimension {d}",
            ch.in_profile(),
            ch.out_profile()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationWitness {
    pub label: String,
    pub input: ComplexMatrix,
    /// `Δ(Φ(σ))`.
    pub censor_after_noise: ComplexMatrix,
    /// `Φ(Δ(σ))`.
    pub noise_after_censor: ComplexMatrix,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationReport {
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    pub max_distance: f64,
    /// First few inputs on which the two orders differ.
    pub witnesses: Vec<CommutationWitness>,
}

/// Compares `Δ∘Φ` with `Φ∘Δ` on the generators and on `samples` random
/// convex mixtures of them.
pub fn commutation_check(
    noise: &KrausChannel,
    censor: &KrausChannel,
    free_gens: &GeneratorSet,
    samples: usize,
) -> Result<CommutationReport> {
    let d = free_gens.dim();
    check_square(noise, d, "noise")?;
    check_square(censor, d, "censor")?;
    let mut report = CommutationReport {
        pass: true,
        checked: 0,
        failed: 0,
        max_distance: 0.0,
        witnesses: Vec::new(),
    };
    for (label, sigma) in test_inputs(free_gens, samples)? {
        let a = apply(censor, &apply(noise, &sigma)?)?;
        let b = apply(noise, &apply(censor, &sigma)?)?;
        let distance = trace_distance(&a, &b)?;
        report.checked += 1;
        report.max_distance = report.max_distance.max(distance);
        if distance > PROTOCOL_TOL {
            report.pass = false;
            report.failed += 1;
            if report.witnesses.len() < WITNESS_CAP {
                report.witnesses.push(CommutationWitness {
                    label,
                    input: sigma.into_matrix(),
                    censor_after_noise: a.into_matrix(),
                    noise_after_censor: b.into_matrix(),
                    distance,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NongeneratingWitness {
    pub label: String,
    pub input: ComplexMatrix,
    pub output: ComplexMatrix,
    pub verdict: MembershipVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NongeneratingReport {
    pub pass: bool,
    pub checked: usize,
    pub members: usize,
    pub failures: Vec<NongeneratingWitness>,
    /// Outputs that could not be decided; these never count towards a pass.
    pub undecided: Vec<NongeneratingWitness>,
}

/// Whether the noise keeps free inputs free.
pub fn nongenerating_check(
    noise: &KrausChannel,
    free_oracle: &FreeSetOracle,
    free_gens: &GeneratorSet,
    samples: usize,
) -> Result<NongeneratingReport> {
    check_square(noise, free_gens.dim(), "noise")?;
    let mut report = NongeneratingReport {
        pass: false,
        checked: 0,
        members: 0,
        failures: Vec::new(),
        undecided: Vec::new(),
    };
    let (mut non_members, mut inconclusive) = (0, 0);
    for (label, sigma) in test_inputs(free_gens, samples)? {
        let out = apply(noise, &sigma)?;
        let verdict = membership(free_oracle, &out)?;
        report.checked += 1;
        let witness = |verdict| NongeneratingWitness {
            label,
            input: sigma.matrix().clone(),
            output: out.matrix().clone(),
            verdict,
        };
        match verdict.verdict {
            Verdict::Member => report.members += 1,
            Verdict::NonMember => {
                non_members += 1;
                if report.failures.len() < WITNESS_CAP {
                    report.failures.push(witness(verdict));
                }
            }
            Verdict::Inconclusive => {
                inconclusive += 1;
                if report.undecided.len() < WITNESS_CAP {
                    report.undecided.push(witness(verdict));
                }
            }
        }
    }
    report.pass = non_members == 0 && inconclusive == 0;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectionReport {
    /// `D(Φ(σ), σ)`.
    pub noisy_distance: f64,
    /// `D(Δ′(Φ(σ)), σ)`.
    pub censored_distance: f64,
    pub corrected: bool,
}

/// How far the censor pulls a noisy authorized message back towards the
/// original.
pub fn correction_effect_probe(
    noise: &KrausChannel,
    censor: &KrausChannel,
    sigma: &DensityOperator,
) -> Result<CorrectionReport> {
    check_square(noise, sigma.dim(), "noise")?;
    check_square(censor, sigma.dim(), "censor")?;
    let moved = fixed_point_distance(censor, sigma)?;
    if moved > PROTOCOL_TOL {
        return Err(Error::InvalidArgument(format!(
            "message is not authorized: the censor moves it by {moved:e}"
        )));
    }
    let noisy = apply(noise, sigma)?;
    let censored = apply(censor, &noisy)?;
    let noisy_distance = trace_distance(&noisy, sigma)?;
    let censored_distance = trace_distance(&censored, sigma)?;
    Ok(CorrectionReport {
        noisy_distance,
        censored_distance,
        corrected: censored_distance < noisy_distance,
    })
}
