use serde::Serialize;

use crate::ensemble::{readout_of_state, run_exact, EnsembleReadout};
use crate::error::{Error, Result};
use crate::noise::FaultPattern;
use crate::simcore::{
    reduced_fidelity, run_circuit, Backend, Circuit, Gate, SimState, StateVector,
};

/// One qubit prepared as √p|0⟩ + √(1−p)|1⟩.
pub fn rng_circuit(p: f64) -> Result<Circuit> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is not a probability"
        )));
    }
    let mut c = Circuit::new(1);
    c.push(Gate::ry(2.0 * (1.0 - p).sqrt().asin()), &[0])?;
    Ok(c)
}

/// Reads 2p − 1: the average of +1 with weight p and −1 with weight 1 − p.
pub fn rng_demo(p: f64) -> Result<EnsembleReadout> {
    run_exact(&rng_circuit(p)?, Backend::Dense)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TeleportMode {
    /// Bell measurement with no way to act on its result.
    Standard,
    /// Corrections applied as controlled gates from the dephased sender qubits.
    Quantum,
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportReport {
    pub mode: TeleportMode,
    pub readout: EnsembleReadout,
    pub sender_means: [f64; 2],
    pub receiver_fidelity: f64,
}

/// Qubit 0 holds the input, 1 and 2 the Bell pair (2 is the receiver).
/// Qubits 3 and 4 are an environment that dephases the sender qubits, which
/// stands in for the Bell measurement.
pub fn teleport_circuit(mode: TeleportMode) -> Result<Circuit> {
    let mut c = Circuit::new(5);
    c.push(Gate::h(), &[1])?;
    c.push(Gate::cnot(), &[1, 2])?;
    c.push(Gate::cnot(), &[0, 1])?;
    c.push(Gate::h(), &[0])?;
    c.push(Gate::cnot(), &[0, 3])?;
    c.push(Gate::cnot(), &[1, 4])?;
    if mode == TeleportMode::Quantum {
        c.push(Gate::cnot(), &[1, 2])?;
        c.push(Gate::cz(), &[0, 2])?;
    }
    Ok(c)
}

pub fn teleport(input: &StateVector, mode: TeleportMode) -> Result<TeleportReport> {
    if input.num_qubits() != 1 {
        return Err(Error::SizeMismatch(input.num_qubits(), 1));
    }
    let psi = SimState::Dense(input.clone());
    let mut state = SimState::product(
        &[psi.clone(), SimState::zero(4, Backend::Dense)?],
        Backend::Dense,
    )?;
    run_circuit(&mut state, &teleport_circuit(mode)?, &FaultPattern::none())?;
    let readout = readout_of_state(&state);
    Ok(TeleportReport {
        mode,
        sender_means: [readout.means[0], readout.means[1]],
        receiver_fidelity: reduced_fidelity(&state, &[2], &psi)?,
        readout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn rng_examples() {
        for (p, want) in [(1.0, 1.0), (0.5, 0.0), (0.25, -0.5), (0.0, -1.0)] {
            assert!((rng_demo(p).unwrap().means[0] - want).abs() < 1e-12);
        }
        assert!(rng_circuit(1.5).is_err());
    }

    #[test]
    fn teleport_basis_inputs() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        for s in [&zero, &one] {
            assert!(
                (teleport(s, TeleportMode::Quantum)
                    .unwrap()
                    .receiver_fidelity
                    - 1.0)
                    .abs()
                    < 1e-12
            );
            let r = teleport(s, TeleportMode::Standard).unwrap();
            assert!((r.receiver_fidelity - 0.5).abs() < 1e-12);
            assert!(r.sender_means.iter().all(|m| m.abs() < 1e-12));
        }
        let plus = StateVector::qubit(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!(
            (teleport(&plus, TeleportMode::Standard)
                .unwrap()
                .receiver_fidelity
                - 0.5)
                .abs()
                < 1e-12
        );
    }
}
