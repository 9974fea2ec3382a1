use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use censorlab_cli::specs::{parse_censor, parse_free};
use censorlab_cli::{
    budget_from_env, parse_scenario, preset, run, to_json, verify, verify_table, CliError, PRESETS,
};

/// Simulate censored quantum channels and check whether censorship holds.
#[derive(Parser)]
#[command(name = "censorlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or packaged preset and print a JSON report.
    Run {
        /// Scenario file (JSON).
        file: Option<PathBuf>,
        /// Run a packaged preset instead of a file.
        #[arg(long, conflicts_with = "file")]
        preset: Option<String>,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print only the deterministic report body.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Check a censor channel against a free set.
    Verify {
        /// Censor, e.g. dephasing:2, cq:2x2, twirl:pauli1, replacement:2:zero.
        #[arg(long)]
        censor: String,
        /// Free set, e.g. incoherent, separable_ppt:2x2; defaults to the censor's own.
        #[arg(long)]
        free: Option<String>,
        /// Random inputs for the resource-destroying check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full JSON report instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// List packaged scenarios.
    Presets {
        /// Print the scenario file of one preset.
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
}

fn unknown_preset(name: &str) -> CliError {
    let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
    CliError::Parse(format!(
        "unknown preset {name:?}; available: {}",
        names.join(", ")
    ))
}

fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run {
            file,
            preset: name,
            seed,
            omit_timing,
        } => {
            let text = match (file, name) {
                (Some(path), _) => std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?,
                (None, Some(name)) => preset(&name)
                    .ok_or_else(|| unknown_preset(&name))?
                    .json
                    .to_string(),
                (None, None) => {
                    return Err(CliError::Parse(
                        "give a scenario file or --preset NAME".into(),
                    ))
                }
            };
            let mut scenario = parse_scenario(&text)?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            if let Some(budget) = budget_from_env()? {
                scenario.budget = budget;
            }
            let report = run(&scenario)?;
            if omit_timing {
                to_json(&report.body)
            } else {
                to_json(&report)
            }
        }
        Command::Verify {
            censor,
            free,
            samples,
            seed,
            json,
        } => {
            let spec = parse_censor(&censor)?;
            let oracle = match free {
                Some(name) => parse_free(&name, &spec.profile()?)?,
                None => spec.default_free_oracle()?,
            };
            let report = verify(&spec, &oracle, samples, seed)?;
            if json {
                to_json(&report)
            } else {
                Ok(verify_table(&report).trim_end().to_string())
            }
        }
        Command::Presets { dump } => match dump {
            Some(name) => Ok(preset(&name)
                .ok_or_else(|| unknown_preset(&name))?
                .json
                .trim_end()
                .to_string()),
            None => Ok(PRESETS
                .iter()
                .map(|p| format!("{:<28} {}", p.name, p.description))
                .collect::<Vec<_>>()
                .join("\n")),
        },
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("censorlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
