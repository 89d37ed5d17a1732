use std::path::Path;

use anyhow::{bail, Context, Result};
use aqec_core::channel::{amplitude_damping_set, pauli_kraus_set};
use aqec_core::code::builtin;
use aqec_core::{KrausSet, QuantumCode};

/// A builtin name such as `leung4` or `repetition(3)`, or a JSON file.
pub fn load_code(source: &str) -> Result<QuantumCode> {
    if let Ok(code) = builtin(source) {
        return Ok(code);
    }
    let path = Path::new(source);
    if !path.exists() {
        bail!("{source} is neither a builtin code nor a readable file");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
    QuantumCode::from_json(&text).with_context(|| format!("loading code from {source}"))
}

/// Kraus sets for `ad` (one per gamma), `pauli` (weight classes) or a
/// JSON file.
pub fn load_channels(channel: &str, n: usize, gammas: &[f64]) -> Result<Vec<(Option<f64>, KrausSet)>> {
    match channel {
        "ad" => {
            if gammas.is_empty() {
                bail!("the ad channel needs at least one --gamma");
            }
            gammas
                .iter()
                .map(|&g| Ok((Some(g), amplitude_damping_set(n, g)?)))
                .collect()
        }
        "pauli" => Ok(vec![(None, pauli_kraus_set(n, n)?)]),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("channel {path} is not ad, pauli or a readable file"))?;
            let ks = KrausSet::from_json(&text).with_context(|| format!("loading channel from {path}"))?;
            if ks.num_qubits() != n {
                bail!("channel acts on {} qubits, code has {n}", ks.num_qubits());
            }
            Ok(vec![(None, ks)])
        }
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |g| format!("{g:e}"))
}
