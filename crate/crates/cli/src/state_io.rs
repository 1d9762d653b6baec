//! State files: JSON objects of the form
//! `{"num_qubits": n, "amplitudes": [[re, im], ...]}` with 2^n amplitude
//! pairs ordered by basis index (site 1 is the most significant bit).

use anyhow::{bail, Context};
use gybe_core::{C64, PureState};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
pub struct StateFile {
    pub num_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

pub fn read_state(path: &Path) -> anyhow::Result<PureState> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let parsed: StateFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {} as a state file", path.display()))?;
    if parsed.num_qubits > 20 {
        bail!("{}: num_qubits {} is too large", path.display(), parsed.num_qubits);
    }
    if parsed.amplitudes.len() != 1usize << parsed.num_qubits {
        bail!(
            "{}: {} amplitudes for {} qubits (need {})",
            path.display(),
            parsed.amplitudes.len(),
            parsed.num_qubits,
            1usize << parsed.num_qubits
        );
    }
    let amps: Vec<C64> = parsed
        .amplitudes
        .iter()
        .map(|&[re, im]| C64::new(re, im))
        .collect();
    PureState::from_amplitudes(parsed.num_qubits, amps)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}
