//! Short textual names for censors, noise channels, free sets and states.
//!
//! Names are `family[:argument]`; dimensions are written `AxB`.

use std::f64::consts::PI;

use censorlab::censors::{CensorSpec, TwirlGroup};
use censorlab::channels::KrausChannel;
use censorlab::protocol::swap_channel;
use censorlab::qmath::{basis_ket, Complex64, ComplexMatrix, DensityOperator, DimProfile};
use censorlab::resources::FreeSetOracle;

use crate::CliError;

fn parse_usize(text: &str, what: &str) -> Result<usize, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("{what}: expected a positive integer, got {text:?}")))
}

/// `2x3x2` as a list of dimensions.
pub fn parse_dims(text: &str) -> Result<Vec<usize>, CliError> {
    text.split('x')
        .map(|d| parse_usize(d, "dimension"))
        .collect()
}

fn split(name: &str) -> (&str, Option<&str>) {
    match name.split_once(':') {
        Some((head, rest)) => (head, Some(rest)),
        None => (name, None),
    }
}

fn require<'a>(arg: Option<&'a str>, name: &str, form: &str) -> Result<&'a str, CliError> {
    arg.ok_or_else(|| CliError::Parse(format!("{name:?}: expected {form}")))
}

pub const CENSOR_FORMS: &str =
    "dephasing:D, twirl:GROUP (trivial:D, z2, x2, pauli1), cq:XxY or replacement:AxB:STATE";

/// Parses a censor name. Replacement targets are resolved with
/// [`parse_state`] on the given dimensions.
pub fn parse_censor(name: &str) -> Result<CensorSpec, CliError> {
    let (head, arg) = split(name);
    match head {
        "dephasing" => {
            let dim = parse_usize(require(arg, name, "dephasing:D")?, "dephasing dimension")?;
            Ok(CensorSpec::Dephasing { dim })
        }
        "twirl" => {
            let group = TwirlGroup::named(require(arg, name, "twirl:GROUP")?)
                .map_err(|e| CliError::Parse(format!("{name:?}: {e}")))?;
            Ok(CensorSpec::Twirl { group })
        }
        "cq" => {
            let dims = parse_dims(require(arg, name, "cq:XxY")?)?;
            match dims[..] {
                [x_dim, y_dim] => Ok(CensorSpec::CqCensor { x_dim, y_dim }),
                _ => Err(CliError::Parse(format!("{name:?}: expected cq:XxY"))),
            }
        }
        "replacement" => {
            let rest = require(arg, name, "replacement:AxB:STATE")?;
            let (dims, state) = rest.split_once(':').ok_or_else(|| {
                CliError::Parse(format!("{name:?}: expected replacement:AxB:STATE"))
            })?;
            let profile = profile(&parse_dims(dims)?)?;
            let target = parse_state(state, &profile)?;
            Ok(CensorSpec::Replacement { target })
        }
        _ => Err(CliError::Parse(format!(
            "unknown censor {name:?}; expected one of {CENSOR_FORMS}"
        ))),
    }
}

pub fn profile(dims: &[usize]) -> Result<DimProfile, CliError> {
    DimProfile::new(dims.to_vec()).map_err(CliError::from)
}

/// Parses a free-set name. `incoherent` and `separable_ppt` without
/// dimensions take them from `context`.
pub fn parse_free(name: &str, context: &DimProfile) -> Result<FreeSetOracle, CliError> {
    let (head, arg) = split(name);
    let oracle = match head {
        "incoherent" => {
            let dim = match arg {
                Some(d) => parse_usize(d, "incoherent dimension")?,
                None => context.total(),
            };
            FreeSetOracle::incoherent(dim)
        }
        "twirl" => {
            let group = TwirlGroup::named(require(arg, name, "twirl:GROUP")?)
                .map_err(|e| CliError::Parse(format!("{name:?}: {e}")))?;
            FreeSetOracle::twirl_invariant(group)
        }
        "cq" => {
            let dims = parse_dims(require(arg, name, "cq:XxY")?)?;
            match dims[..] {
                [x, y] => FreeSetOracle::classical_quantum(x, y),
                _ => return Err(CliError::Parse(format!("{name:?}: expected cq:XxY"))),
            }
        }
        "separable_ppt" => {
            let p = match arg {
                Some(d) => profile(&parse_dims(d)?)?,
                None => context.clone(),
            };
            FreeSetOracle::separable_ppt(p)
        }
        _ => {
            return Err(CliError::Parse(format!(
                "unknown free set {name:?}; expected incoherent[:D], twirl:GROUP, cq:XxY or separable_ppt[:AxB]"
            )))
        }
    };
    oracle.map_err(CliError::from)
}

fn unitary(u: ComplexMatrix, p: &DimProfile) -> Result<KrausChannel, CliError> {
    KrausChannel::unitary(u, p.clone()).map_err(CliError::from)
}

/// Parses a noise name on a party's local space.
pub fn parse_noise(name: &str, local: &DimProfile) -> Result<KrausChannel, CliError> {
    let d = local.total();
    let (head, arg) = split(name);
    match head {
        "identity" => Ok(KrausChannel::identity(local.clone())),
        "swap" => match local.dims() {
            [a, b] => swap_channel(*a, *b).map_err(CliError::from),
            _ => Err(CliError::Validation(format!(
                "swap noise needs two subsystems, the party has {local}"
            ))),
        },
        "phase" => {
            let theta: f64 = require(arg, name, "phase:THETA")?
                .parse()
                .map_err(|_| CliError::Parse(format!("{name:?}: THETA must be a number")))?;
            let u = ComplexMatrix::from_fn(d, d, |r, c| {
                if r == c {
                    Complex64::from_polar(1.0, theta * r as f64)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            unitary(u, local)
        }
        "shift" => {
            let u = ComplexMatrix::from_fn(d, d, |r, c| {
                Complex64::new(if r == (c + 1) % d { 1.0 } else { 0.0 }, 0.0)
            });
            unitary(u, local)
        }
        "fourier" => {
            let s = 1.0 / (d as f64).sqrt();
            let u = ComplexMatrix::from_fn(d, d, |r, c| {
                Complex64::from_polar(s, 2.0 * PI * (r * c) as f64 / d as f64)
            });
            unitary(u, local)
        }
        _ => Err(CliError::Parse(format!(
            "unknown noise {name:?}; expected identity, swap, phase:THETA, shift or fourier"
        ))),
    }
}

fn pure(amp: &[Complex64], p: &DimProfile) -> Result<DensityOperator, CliError> {
    DensityOperator::pure(amp, p.clone()).map_err(CliError::from)
}

fn bell(p: &DimProfile, shift: usize, minus: bool) -> Result<DensityOperator, CliError> {
    if p.total() != 4 {
        return Err(CliError::Validation(format!(
            "Bell states need a four-dimensional space, got {p}"
        )));
    }
    let mut amp = vec![Complex64::new(0.0, 0.0); 4];
    amp[shift] = Complex64::new(1.0, 0.0);
    amp[3 - shift] = Complex64::new(if minus { -1.0 } else { 1.0 }, 0.0);
    pure(&amp, p)
}

pub const STATE_NAMES: &str = "max_mixed, max_coherent, plus, zero, one, basis:K, plus_product, \
     bell_phi_plus, bell_phi_minus, bell_psi_plus, bell_psi_minus";

/// Parses a named state on the given profile.
pub fn parse_state(name: &str, p: &DimProfile) -> Result<DensityOperator, CliError> {
    let d = p.total();
    let one = Complex64::new(1.0, 0.0);
    let (head, arg) = split(name);
    match head {
        "max_mixed" => Ok(DensityOperator::maximally_mixed(p.clone())),
        "max_coherent" | "plus" => pure(&vec![one; d], p),
        "zero" => pure(&basis_ket(d, 0), p),
        "one" | "basis" => {
            let k = match arg {
                Some(k) => parse_usize(k, "basis index")?,
                None => 1,
            };
            if k >= d {
                return Err(CliError::Validation(format!(
                    "basis index {k} outside dimension {d}"
                )));
            }
            pure(&basis_ket(d, k), p)
        }
        "plus_product" => {
            let local: Vec<DensityOperator> = p
                .dims()
                .iter()
                .map(|&dk| pure(&vec![one; dk], &profile(&[dk])?))
                .collect::<Result<_, _>>()?;
            DensityOperator::tensor_all(local.iter())
                .and_then(|s| s.with_profile(p.clone()))
                .map_err(CliError::from)
        }
        "bell_phi_plus" => bell(p, 0, false),
        "bell_phi_minus" => bell(p, 0, true),
        "bell_psi_plus" => bell(p, 1, false),
        "bell_psi_minus" => bell(p, 1, true),
        _ => Err(CliError::Parse(format!(
            "unknown state {name:?}; expected one of {STATE_NAMES}"
        ))),
    }
}
