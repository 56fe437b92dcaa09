//! Fault locations and Pauli error models.
//!
//! A circuit has three kinds of places where a fault can strike: each input
//! qubit, each qubit touched by an operation (right after it), and each
//! idle qubit-layer between a qubit's first and last operation.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Circuit, Pauli};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    Input,
    GateOutput,
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaultLocation {
    pub kind: FaultKind,
    pub time: usize,
    pub qubit: usize,
}

impl FaultLocation {
    pub fn input(qubit: usize) -> FaultLocation {
        FaultLocation {
            kind: FaultKind::Input,
            time: 0,
            qubit,
        }
    }

    pub fn gate_output(time: usize, qubit: usize) -> FaultLocation {
        FaultLocation {
            kind: FaultKind::GateOutput,
            time,
            qubit,
        }
    }

    pub fn delay(time: usize, qubit: usize) -> FaultLocation {
        FaultLocation {
            kind: FaultKind::Delay,
            time,
            qubit,
        }
    }
}

impl fmt::Display for FaultLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            FaultKind::Input => "input",
            FaultKind::GateOutput => "gate_output",
            FaultKind::Delay => "delay",
        };
        write!(f, "{kind}@t{}:q{}", self.time, self.qubit)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPattern {
    pub entries: Vec<(FaultLocation, Pauli)>,
}

impl FaultPattern {
    pub fn none() -> FaultPattern {
        FaultPattern::default()
    }

    pub fn single(location: FaultLocation, pauli: Pauli) -> FaultPattern {
        FaultPattern {
            entries: vec![(location, pauli)],
        }
    }

    /// Fails if a location appears twice.
    pub fn new(entries: Vec<(FaultLocation, Pauli)>) -> Result<FaultPattern> {
        let mut locs: Vec<_> = entries.iter().map(|(l, _)| *l).collect();
        locs.sort_unstable();
        if let Some(w) = locs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "location {} repeated",
                w[0]
            )));
        }
        Ok(FaultPattern { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pattern serializes")
    }

    pub fn from_json(text: &str) -> Result<FaultPattern> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    /// Weights of X, Z, Y in that order.
    pub pauli_weights: [f64; 3],
}

impl NoiseModel {
    pub fn uniform(p: f64) -> Result<NoiseModel> {
        NoiseModel::new(p, [1.0 / 3.0; 3])
    }

    pub fn new(p: f64, pauli_weights: [f64; 3]) -> Result<NoiseModel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "fault rate {p} not in [0, 1]"
            )));
        }
        if pauli_weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("negative Pauli weight".into()));
        }
        let total: f64 = pauli_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Pauli weights sum to {total}, expected 1"
            )));
        }
        Ok(NoiseModel { p, pauli_weights })
    }

    /// Only bit flips.
    pub fn bit_flip(p: f64) -> Result<NoiseModel> {
        NoiseModel::new(p, [1.0, 0.0, 0.0])
    }

    pub fn draw_pauli<R: Rng>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.random();
        let [wx, wz, _] = self.pauli_weights;
        if u < wx {
            Pauli::X
        } else if u < wx + wz {
            Pauli::Z
        } else {
            Pauli::Y
        }
    }
}

/// Every fault location of the circuit, in a fixed order: inputs by qubit,
/// then per layer the operation outputs (in step order) followed by the
/// idle qubits of that layer.
pub fn enumerate_locations(circuit: &Circuit) -> Vec<FaultLocation> {
    let n = circuit.num_qubits();
    let mut locs: Vec<FaultLocation> = (0..n).map(FaultLocation::input).collect();
    let usage = circuit.usage();
    let busy = circuit.busy_map();
    for (t, layer) in circuit.layers().iter().enumerate() {
        for step in layer {
            locs.extend(
                step.targets
                    .iter()
                    .map(|&q| FaultLocation::gate_output(t, q)),
            );
        }
        for q in 0..n {
            if let Some((first, last)) = usage[q] {
                if !busy[t][q] && first < t && t < last {
                    locs.push(FaultLocation::delay(t, q));
                }
            }
        }
    }
    locs
}

/// Independent ChaCha stream for one trial of a seeded experiment.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Includes each location independently with probability `model.p`.
pub fn sample_from<R: Rng>(
    locations: &[FaultLocation],
    model: &NoiseModel,
    rng: &mut R,
) -> FaultPattern {
    let mut entries = Vec::new();
    if model.p <= 0.0 {
        return FaultPattern { entries };
    }
    if model.p >= 1.0 {
        for &loc in locations {
            entries.push((loc, model.draw_pauli(rng)));
        }
        return FaultPattern { entries };
    }
    // Geometric skipping: draw the gap to the next faulty location directly.
    let log_q = (1.0 - model.p).ln();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if !gap.is_finite() || gap >= (locations.len() - i.min(locations.len())) as f64 {
            break;
        }
        i += gap as usize;
        if i >= locations.len() {
            break;
        }
        entries.push((locations[i], model.draw_pauli(rng)));
        i += 1;
    }
    FaultPattern { entries }
}

pub fn sample_pattern(circuit: &Circuit, model: &NoiseModel, seed: u64) -> FaultPattern {
    let locations = enumerate_locations(circuit);
    sample_from(&locations, model, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// One pattern per (location, Pauli) pair.
pub fn all_single_faults(circuit: &Circuit) -> Vec<FaultPattern> {
    single_faults_with(circuit, &Pauli::ALL)
}

/// Single faults restricted to the given Paulis.
pub fn single_faults_with(circuit: &Circuit, paulis: &[Pauli]) -> Vec<FaultPattern> {
    enumerate_locations(circuit)
        .into_iter()
        .flat_map(|loc| paulis.iter().map(move |&p| FaultPattern::single(loc, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::Gate;

    #[test]
    fn empty_circuit_has_only_inputs() {
        let c = Circuit::new(3);
        assert_eq!(enumerate_locations(&c).len(), 3);
    }

    #[test]
    fn single_cnot_locations() {
        let mut c = Circuit::new(2);
        c.push(Gate::cnot(), &[0, 1]).unwrap();
        let locs = enumerate_locations(&c);
        assert_eq!(
            locs,
            vec![
                FaultLocation::input(0),
                FaultLocation::input(1),
                FaultLocation::gate_output(0, 0),
                FaultLocation::gate_output(0, 1),
            ]
        );
        assert_eq!(all_single_faults(&c).len(), 12);
    }

    #[test]
    fn delay_between_first_and_last_use() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(), &[0]).unwrap();
        c.push(Gate::h(), &[1]).unwrap();
        c.push(Gate::x(), &[1]).unwrap();
        c.push(Gate::x(), &[1]).unwrap();
        c.push(Gate::cnot(), &[0, 1]).unwrap();
        let delays: Vec<_> = enumerate_locations(&c)
            .into_iter()
            .filter(|l| l.kind == FaultKind::Delay)
            .collect();
        assert_eq!(
            delays,
            vec![FaultLocation::delay(1, 0), FaultLocation::delay(2, 0)]
        );
    }

    #[test]
    fn extreme_rates() {
        let mut c = Circuit::new(3);
        c.push(Gate::toffoli(), &[0, 1, 2]).unwrap();
        let zero = NoiseModel::uniform(0.0).unwrap();
        let one = NoiseModel::uniform(1.0).unwrap();
        for seed in 0..20 {
            assert!(sample_pattern(&c, &zero, seed).is_empty());
            assert_eq!(sample_pattern(&c, &one, seed).len(), 6);
        }
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(NoiseModel::new(0.1, [0.5, 0.5, 0.5]).is_err());
        assert!(NoiseModel::new(1.5, [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn pattern_json_round_trip() {
        let p = FaultPattern::new(vec![
            (FaultLocation::input(1), Pauli::Y),
            (FaultLocation::delay(4, 2), Pauli::X),
        ])
        .unwrap();
        assert_eq!(FaultPattern::from_json(&p.to_json()).unwrap(), p);
        assert!(FaultPattern::new(vec![
            (FaultLocation::input(1), Pauli::Y),
            (FaultLocation::input(1), Pauli::X),
        ])
        .is_err());
    }
}
