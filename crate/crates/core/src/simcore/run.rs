//! Circuit execution with fault insertion.

use rustc_hash::FxHashMap;

use super::backend::{BasisKey, QuantumState, SimState};
use super::circuit::{Circuit, CollapsePoint, Operation};
use super::gate::Pauli;
use crate::error::{Error, Result};
use crate::noise::{FaultKind, FaultLocation, FaultPattern};
use rand::Rng;

fn apply_op<S: QuantumState>(state: &mut S, op: &Operation, targets: &[usize]) -> Result<()> {
    match op {
        Operation::Gate(g) => state.apply_gate(g, targets),
        Operation::Classical(c) => state.apply_classical(c, targets),
    }
}

fn apply_pauli<S: QuantumState>(state: &mut S, pauli: Pauli, qubit: usize) -> Result<()> {
    state.apply_gate(&pauli.gate(), &[qubit])
}

/// Faults grouped by where they are inserted.
struct Schedule {
    input: Vec<(usize, Pauli)>,
    delay: FxHashMap<usize, Vec<(usize, Pauli)>>,
    output: FxHashMap<(usize, usize), Pauli>,
}

fn schedule(circuit: &Circuit, faults: &FaultPattern) -> Result<Schedule> {
    let mut s = Schedule {
        input: Vec::new(),
        delay: FxHashMap::default(),
        output: FxHashMap::default(),
    };
    if faults.is_empty() {
        return Ok(s);
    }
    let usage = circuit.usage();
    let layers = circuit.layers();
    let unknown = |loc: &FaultLocation| Error::UnknownFaultLocation(loc.to_string());
    for &(loc, pauli) in &faults.entries {
        if loc.qubit >= circuit.num_qubits() {
            return Err(unknown(&loc));
        }
        match loc.kind {
            FaultKind::Input => {
                if loc.time != 0 {
                    return Err(unknown(&loc));
                }
                s.input.push((loc.qubit, pauli));
            }
            FaultKind::GateOutput => {
                let touched = layers
                    .get(loc.time)
                    .is_some_and(|l| l.iter().any(|st| st.targets.contains(&loc.qubit)));
                if !touched || s.output.insert((loc.time, loc.qubit), pauli).is_some() {
                    return Err(unknown(&loc));
                }
            }
            FaultKind::Delay => {
                let idle = layers
                    .get(loc.time)
                    .is_some_and(|l| l.iter().all(|st| !st.targets.contains(&loc.qubit)));
                let inside = usage[loc.qubit].is_some_and(|(a, b)| a < loc.time && loc.time < b);
                if !idle || !inside {
                    return Err(unknown(&loc));
                }
                s.delay
                    .entry(loc.time)
                    .or_default()
                    .push((loc.qubit, pauli));
            }
        }
    }
    Ok(s)
}

/// Runs the circuit in time order, inserting each fault at its location.
/// Collapse marks are ignored.
pub fn run_circuit<S: QuantumState>(
    state: &mut S,
    circuit: &Circuit,
    faults: &FaultPattern,
) -> Result<()> {
    run_circuit_with(state, circuit, faults, |_, _| Ok(()))
}

/// Like [`run_circuit`], calling `on_collapse` at every collapse mark.
pub fn run_circuit_with<S, F>(
    state: &mut S,
    circuit: &Circuit,
    faults: &FaultPattern,
    on_collapse: F,
) -> Result<()>
where
    S: QuantumState,
    F: FnMut(&mut S, &CollapsePoint) -> Result<()>,
{
    run_circuit_staged(state, circuit, faults, |_, _| Ok(()), on_collapse)
}

/// Like [`run_circuit_with`], also calling `before_layer` with each layer
/// index before that layer's delay faults and steps.
pub fn run_circuit_staged<S, B, F>(
    state: &mut S,
    circuit: &Circuit,
    faults: &FaultPattern,
    mut before_layer: B,
    mut on_collapse: F,
) -> Result<()>
where
    S: QuantumState,
    B: FnMut(&mut S, usize) -> Result<()>,
    F: FnMut(&mut S, &CollapsePoint) -> Result<()>,
{
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch(
            state.num_qubits(),
            circuit.num_qubits(),
        ));
    }
    let sched = schedule(circuit, faults)?;
    for &(q, p) in &sched.input {
        apply_pauli(state, p, q)?;
    }
    let collapses = circuit.collapse_points();
    for cp in collapses.iter().filter(|c| c.after.is_none()) {
        on_collapse(state, cp)?;
    }
    for (t, layer) in circuit.layers().iter().enumerate() {
        before_layer(state, t)?;
        if let Some(d) = sched.delay.get(&t) {
            for &(q, p) in d {
                apply_pauli(state, p, q)?;
            }
        }
        for step in layer {
            apply_op(state, &step.op, &step.targets)?;
            if !sched.output.is_empty() {
                for &q in &step.targets {
                    if let Some(&p) = sched.output.get(&(t, q)) {
                        apply_pauli(state, p, q)?;
                    }
                }
            }
        }
        for cp in collapses.iter().filter(|c| c.after == Some(t)) {
            on_collapse(state, cp)?;
        }
    }
    Ok(())
}

/// Runs with deferred sampling: every collapse mark samples its qubits.
pub fn run_deferred<S: QuantumState, R: Rng>(
    state: &mut S,
    circuit: &Circuit,
    faults: &FaultPattern,
    rng: &mut R,
) -> Result<()> {
    run_circuit_with(state, circuit, faults, |s, cp| {
        for &q in &cp.qubits {
            sample_qubit(s, q, rng)?;
        }
        Ok(())
    })
}

/// Samples a computational-basis outcome for one qubit and collapses onto it.
pub fn sample_qubit<S: QuantumState, R: Rng>(
    state: &mut S,
    qubit: usize,
    rng: &mut R,
) -> Result<bool> {
    let p1 = state.prob_one(qubit)?.clamp(0.0, 1.0);
    let outcome = rng.random::<f64>() < p1;
    state.collapse(qubit, outcome)?;
    Ok(outcome)
}

/// Samples a full computational-basis outcome without changing the state.
pub fn sample_basis<R: Rng>(state: &SimState, rng: &mut R) -> BasisKey {
    let entries = state.entries();
    let u: f64 = rng.random::<f64>() * entries.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>();
    let mut acc = 0.0;
    for (key, a) in &entries {
        acc += a.norm_sqr();
        if u < acc {
            return *key;
        }
    }
    entries.last().map(|e| e.0).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::FaultLocation;
    use crate::simcore::{Gate, Pauli, StateVector};
    use num_complex::Complex64 as C64;

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(2);
        let mut s = StateVector::basis(2, 2).unwrap();
        run_circuit(&mut s, &c, &FaultPattern::none()).unwrap();
        assert_eq!(s, StateVector::basis(2, 2).unwrap());
    }

    #[test]
    fn fault_after_hadamard() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(), &[0]).unwrap();
        let mut s = StateVector::zero(1).unwrap();
        let f = FaultPattern::single(FaultLocation::gate_output(0, 0), Pauli::Z);
        run_circuit(&mut s, &c, &f).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - C64::new(h, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(1) - C64::new(-h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unknown_locations() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(), &[0]).unwrap();
        let mut s = StateVector::zero(2).unwrap();
        for loc in [
            FaultLocation::gate_output(0, 1),
            FaultLocation::delay(0, 0),
            FaultLocation::input(5),
            FaultLocation::gate_output(3, 0),
        ] {
            let f = FaultPattern::single(loc, Pauli::X);
            assert!(matches!(
                run_circuit(&mut s, &c, &f),
                Err(Error::UnknownFaultLocation(_))
            ));
        }
    }

    #[test]
    fn deferred_sampling_collapses_marked_qubits() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(), &[0]).unwrap();
        c.mark_collapse(&[0]).unwrap();
        c.push(Gate::cnot(), &[0, 1]).unwrap();
        let mut rng = crate::noise::trial_rng(7, 0);
        let mut s = StateVector::zero(2).unwrap();
        run_deferred(&mut s, &c, &FaultPattern::none(), &mut rng).unwrap();
        let z0 = s.expectation_z(0).unwrap();
        assert!((z0.abs() - 1.0).abs() < 1e-12);
        assert!((s.expectation_z(1).unwrap() - z0).abs() < 1e-12);
    }
}
