//! Scenario files, presets and reports for the `censorlab` command.
//!
//! Reports are JSON objects with a deterministic `body` and a separate
//! `timing` section, so bodies can be compared byte for byte.

pub mod report;
pub mod scenario;
pub mod specs;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use report::{run, verify, verify_table, RunBody, RunReport, VerifyReport};
pub use scenario::{resolve, ScenarioFile, SCHEMA_VERSION};

/// Environment variable overriding a scenario's sampling budget.
pub const BUDGET_ENV: &str = "CENSORLAB_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 2,
            Self::Validation(_) => 3,
            Self::Internal(_) => 4,
        }
    }
}

impl From<censorlab::Error> for CliError {
    fn from(e: censorlab::Error) -> Self {
        match e {
            censorlab::Error::Numerical(_) => Self::Internal(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

/// Parses a scenario file, reporting the JSON path and position of the
/// first problem.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path == "?" {
            CliError::Parse(inner.to_string())
        } else {
            CliError::Parse(format!("{path}: {inner}"))
        }
    })
}

/// `sha256:` digest of the scenario's canonical JSON form.
pub fn digest(file: &ScenarioFile) -> Result<String, CliError> {
    let bytes = serde_json::to_vec(file).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&bytes))))
}

/// Reads the budget override from [`BUDGET_ENV`], if set.
pub fn budget_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                CliError::Parse(format!("{BUDGET_ENV}: expected an integer, got {v:?}"))
            })
        }
        Err(_) => Ok(None),
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

/// Packaged scenarios. Names are stable; new ones go at the end.
pub const PRESETS: &[Preset] = &[
    Preset {
        name: "coherence_censorship",
        description: "two polarization qubits behind dephasing filters; |+⟩|+⟩ loses its coherence",
        json: include_str!("../presets/coherence_censorship.json"),
    },
    Preset {
        name: "entanglement_break",
        description: "two cq censors pass a Bell pair hidden in the quantum registers",
        json: include_str!("../presets/entanglement_break.json"),
    },
    Preset {
        name: "swap_noise",
        description: "swap noise before a cq censor destroys the quantum register's state",
        json: include_str!("../presets/swap_noise.json"),
    },
    Preset {
        name: "reference_frame_twirl",
        description: "two qubits twirled over {I, X}, as without a shared reference frame",
        json: include_str!("../presets/reference_frame_twirl.json"),
    },
    Preset {
        name: "replacement_minimal",
        description: "three parties whose censors replace every message with |0⟩",
        json: include_str!("../presets/replacement_minimal.json"),
    },
    Preset {
        name: "entanglement_via_coherence",
        description: "dephasing censors against a separable free set; a Bell input arrives classically correlated",
        json: include_str!("../presets/entanglement_via_coherence.json"),
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
