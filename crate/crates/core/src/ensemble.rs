//! The ensemble readout model: many molecules run the same circuit and only
//! per-qubit ⟨Z⟩ averaged over molecules is observable.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{enumerate_locations, sample_from, trial_rng, NoiseModel};
use crate::simcore::backend::key_bit;
use crate::simcore::run::sample_basis;
use crate::simcore::{run_circuit, Backend, Circuit, QuantumState, SimState};

/// Default sign threshold for [`decode_bits`].
pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Trials per aggregation chunk. Chunks are summed in index order, so the
/// result does not depend on how many threads ran them.
const CHUNK: u64 = 1024;

/// Layout of one molecule: `computers` registers of `register_width` qubits
/// followed by shared workspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    pub computers: usize,
    pub register_width: usize,
    pub workspace: usize,
}

impl MoleculeSpec {
    pub fn new(computers: usize, register_width: usize, workspace: usize) -> Result<MoleculeSpec> {
        if computers == 0 || register_width == 0 {
            return Err(Error::InvalidParameter(
                "a molecule needs at least one computer and one qubit".into(),
            ));
        }
        let spec = MoleculeSpec {
            computers,
            register_width,
            workspace,
        };
        if spec.total_qubits() > crate::simcore::backend::MAX_SPARSE_QUBITS {
            return Err(Error::CapExceeded {
                what: "molecule qubits",
                needed: spec.total_qubits(),
                cap: crate::simcore::backend::MAX_SPARSE_QUBITS,
            });
        }
        Ok(spec)
    }

    pub fn total_qubits(&self) -> usize {
        self.computers * self.register_width + self.workspace
    }

    /// Qubits of computer `i`, most significant first.
    pub fn computer(&self, i: usize) -> Vec<usize> {
        (i * self.register_width..(i + 1) * self.register_width).collect()
    }

    pub fn workspace_qubits(&self) -> Vec<usize> {
        (self.computers * self.register_width..self.total_qubits()).collect()
    }
}

/// Per-qubit ensemble averages of ⟨Z⟩ (λ₀ = +1, λ₁ = −1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReadout {
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Number of molecules; `None` for the M → ∞ analytic readout.
    pub molecules: Option<u64>,
    pub seed: Option<u64>,
}

impl EnsembleReadout {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("readout serializes")
    }

    /// `qubit,mean,stderr`, one row per qubit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("qubit,mean,stderr\n");
        for (q, (m, s)) in self.means.iter().zip(&self.std_errors).enumerate() {
            writeln!(out, "{q},{m},{s}").expect("write to string");
        }
        out
    }

    /// Sub-readout for the given qubits (in that order).
    pub fn select(&self, qubits: &[usize]) -> Result<EnsembleReadout> {
        let n = self.means.len();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
        Ok(EnsembleReadout {
            means: qubits.iter().map(|&q| self.means[q]).collect(),
            std_errors: qubits.iter().map(|&q| self.std_errors[q]).collect(),
            molecules: self.molecules,
            seed: self.seed,
        })
    }
}

/// Decoded value of one readout bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bit {
    Zero,
    One,
    Indeterminate,
}

impl Bit {
    pub fn value(self) -> Option<bool> {
        match self {
            Bit::Zero => Some(false),
            Bit::One => Some(true),
            Bit::Indeterminate => None,
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Bit::Zero => "0",
            Bit::One => "1",
            Bit::Indeterminate => "?",
        })
    }
}

/// 0 if mean > threshold, 1 if mean < −threshold, indeterminate otherwise.
pub fn decode_bits(
    readout: &EnsembleReadout,
    qubits: &[usize],
    threshold: f64,
) -> Result<Vec<Bit>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let sel = readout.select(qubits)?;
    Ok(sel
        .means
        .iter()
        .map(|&m| {
            if m > threshold {
                Bit::Zero
            } else if m < -threshold {
                Bit::One
            } else {
                Bit::Indeterminate
            }
        })
        .collect())
}

/// Packs decoded bits (most significant first) into an integer, or `None`
/// if any bit is indeterminate.
pub fn bits_to_value(bits: &[Bit]) -> Option<u64> {
    bits.iter()
        .try_fold(0u64, |acc, b| b.value().map(|v| (acc << 1) | u64::from(v)))
}

/// Smallest M for which 5 standard errors of a ±1 variable stay below
/// `threshold`.
pub fn min_molecules(threshold: f64) -> u64 {
    ((5.0 / threshold).powi(2)).floor() as u64 + 1
}

/// Per-qubit ⟨Z⟩ of the noise-free final state, from the circuit's input
/// labels.
pub fn run_exact(circuit: &Circuit, backend: Backend) -> Result<EnsembleReadout> {
    let mut state = SimState::from_bits(circuit.input_labels(), backend)?;
    run_circuit(&mut state, circuit, &crate::noise::FaultPattern::none())?;
    Ok(readout_of_state(&state))
}

/// Readout of an already evolved state (M → ∞).
pub fn readout_of_state<S: QuantumState>(state: &S) -> EnsembleReadout {
    let means = state.expectations();
    EnsembleReadout {
        std_errors: vec![0.0; means.len()],
        means,
        molecules: None,
        seed: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOptions {
    pub molecules: u64,
    pub seed: u64,
    pub backend: Backend,
    /// Each molecule reports one sampled basis outcome (±1 per qubit)
    /// instead of its exact expectations.
    pub sample_bits: bool,
}

impl MonteCarloOptions {
    pub fn new(molecules: u64, seed: u64) -> MonteCarloOptions {
        MonteCarloOptions {
            molecules,
            seed,
            backend: Backend::Auto,
            sample_bits: false,
        }
    }
}

/// M independent molecules, each with its own sampled fault pattern.
pub fn run_monte_carlo(
    circuit: &Circuit,
    model: &NoiseModel,
    molecules: u64,
    seed: u64,
) -> Result<EnsembleReadout> {
    run_monte_carlo_with(circuit, model, &MonteCarloOptions::new(molecules, seed))
}

pub fn run_monte_carlo_with(
    circuit: &Circuit,
    model: &NoiseModel,
    opts: &MonteCarloOptions,
) -> Result<EnsembleReadout> {
    if opts.molecules == 0 {
        return Err(Error::InvalidParameter(
            "at least one molecule is required".into(),
        ));
    }
    let locations = enumerate_locations(circuit);
    let initial = SimState::from_bits(circuit.input_labels(), opts.backend)?;
    let n = circuit.num_qubits();
    let trial = |t: u64| -> Result<Vec<f64>> {
        let mut rng = trial_rng(opts.seed, t);
        let faults = sample_from(&locations, model, &mut rng);
        let mut state = initial.clone();
        run_circuit(&mut state, circuit, &faults)?;
        if opts.sample_bits {
            let key = sample_basis(&state, &mut rng);
            Ok((0..n)
                .map(|q| if key_bit(&key, q) { -1.0 } else { 1.0 })
                .collect())
        } else {
            Ok(state.expectations())
        }
    };
    let (sum, sq) = aggregate(opts.molecules, n, trial)?;
    Ok(finish(sum, sq, opts.molecules, Some(opts.seed)))
}

/// Runs `trial(0..count)` in parallel and returns per-component sums and
/// sums of squares, combined in a fixed order.
pub fn aggregate<F>(count: u64, width: usize, trial: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; width];
            let mut sq = vec![0.0; width];
            for t in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let v = trial(t)?;
                for (i, x) in v.into_iter().enumerate() {
                    sum[i] += x;
                    sq[i] += x * x;
                }
            }
            Ok((sum, sq))
        })
        .collect::<Result<_>>()?;
    let mut sum = vec![0.0; width];
    let mut sq = vec![0.0; width];
    for (s, q) in partial {
        for i in 0..width {
            sum[i] += s[i];
            sq[i] += q[i];
        }
    }
    Ok((sum, sq))
}

/// Means and standard errors (sample stdev / √M) from sums.
pub fn finish(sum: Vec<f64>, sq: Vec<f64>, molecules: u64, seed: Option<u64>) -> EnsembleReadout {
    let m = molecules as f64;
    let means: Vec<f64> = sum.iter().map(|s| (s / m).clamp(-1.0, 1.0)).collect();
    let std_errors = sum
        .iter()
        .zip(&sq)
        .map(|(s, q)| {
            if molecules < 2 {
                return 0.0;
            }
            let var = ((q - s * s / m) / (m - 1.0)).max(0.0);
            (var / m).sqrt()
        })
        .collect();
    EnsembleReadout {
        means,
        std_errors,
        molecules: Some(molecules),
        seed,
    }
}
