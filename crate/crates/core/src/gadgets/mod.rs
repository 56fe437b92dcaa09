//! Fault-tolerant gadgets that never measure.
//!
//! Every gadget is built as a [`GadgetProgram`]: one circuit plus the layout
//! of its input blocks, output data blocks and classical registers. Programs
//! run either exactly (all qubits stay coherent) or with deferred sampling,
//! where qubits that end up serving only as computational-basis controls are
//! collapsed by sampling as soon as they are final.

mod eigen;
mod n_gate;
mod recover;
mod sweep;
mod t_gate;
mod toffoli;

pub use eigen::{
    and_bar_target, and_target, and_u_spec, apply_factors, check_eigen, prepare_and_state,
    prepare_eigenvector, prepare_psi0, psi0_target, psi0_u_spec, psi1_target, EigenSpec, Factor,
};
pub use n_gate::{
    build_n1, fan_out, n_full, n_full_program, n_gate_contract, push_n1, push_n_full,
};
pub use recover::{push_recover, recover, recover_program};
pub use sweep::{failure_sweep, log_log_slope, SweepRow};
pub use t_gate::{t_gadget, t_gadget_program};
pub use toffoli::{toffoli_gadget, toffoli_gadget_program};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::codes::{encoder_circuit, ClassicalRegister, CodeName, CodeSpec};
use crate::error::{Error, Result};
use crate::noise::{trial_rng, FaultKind, FaultPattern};
use crate::simcore::run::sample_qubit;
use crate::simcore::sparse::DEFAULT_SUPPORT_CAP;
use crate::simcore::{
    reduced_fidelity, run_circuit, run_circuit_staged, run_deferred, subsystem_purity, Backend,
    Circuit, CollapsePoint, Gate, QuantumState, SimState, SparseState,
};

/// Default number of repetitions of 𝒩₁ and of eigenvalue rounds.
pub const DEFAULT_N_REP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Exact,
    Deferred,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub mode: SimMode,
    /// Seed for deferred sampling.
    pub seed: u64,
    pub backend: Backend,
    pub support_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: SimMode::Exact,
            seed: 0,
            backend: Backend::Auto,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }
}

impl RunOptions {
    pub fn exact() -> RunOptions {
        RunOptions::default()
    }

    pub fn deferred(seed: u64) -> RunOptions {
        RunOptions {
            mode: SimMode::Deferred,
            seed,
            ..RunOptions::default()
        }
    }
}

/// A gadget circuit together with the meaning of its qubits.
#[derive(Debug, Clone)]
pub struct GadgetProgram {
    pub circuit: Circuit,
    /// Blocks whose initial state is supplied by the caller; they occupy the
    /// lowest qubit indices, in order. All other qubits start in their
    /// circuit input label.
    pub input_blocks: Vec<Vec<usize>>,
    pub data_blocks: Vec<Vec<usize>>,
    pub registers: Vec<ClassicalRegister>,
}

#[derive(Debug, Clone)]
pub struct GadgetReport {
    pub output_state: SimState,
    pub data_blocks: Vec<Vec<usize>>,
    pub ancilla_qubits: Vec<usize>,
    pub classical_registers: Vec<ClassicalRegister>,
}

impl GadgetReport {
    pub fn data_qubits(&self) -> Vec<usize> {
        self.data_blocks.iter().flatten().copied().collect()
    }

    /// ⟨t|ρ_data|t⟩ against a target on the data qubits (block order).
    pub fn data_fidelity(&self, target: &SimState) -> Result<f64> {
        reduced_fidelity(&self.output_state, &self.data_qubits(), target)
    }

    /// Purity of the data qubits' reduced state.
    pub fn data_purity(&self) -> Result<f64> {
        let data = self.data_qubits();
        if data.len() == self.output_state.num_qubits() {
            return Ok(1.0);
        }
        subsystem_purity(&self.output_state, &data)
    }
}

impl GadgetProgram {
    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn input_width(&self) -> usize {
        self.input_blocks.iter().map(Vec::len).sum()
    }

    /// Qubits that are neither data nor register bits.
    pub fn ancilla_qubits(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_qubits()];
        for &q in self.data_blocks.iter().flatten() {
            used[q] = true;
        }
        for r in &self.registers {
            for &q in &r.bits {
                used[q] = true;
            }
        }
        (0..self.num_qubits()).filter(|&q| !used[q]).collect()
    }

    fn check_inputs(&self, inputs: &[SimState]) -> Result<()> {
        if inputs.len() != self.input_blocks.len() {
            return Err(Error::SizeMismatch(inputs.len(), self.input_blocks.len()));
        }
        let mut next = 0;
        for (block, state) in self.input_blocks.iter().zip(inputs) {
            if block.len() != state.num_qubits()
                || block.iter().enumerate().any(|(i, &q)| q != next + i)
            {
                return Err(Error::InvalidParameter(
                    "input blocks must be leading and contiguous".into(),
                ));
            }
            next += block.len();
        }
        Ok(())
    }

    /// Product of the supplied input-block states and the labelled rest.
    pub fn initial_state(&self, inputs: &[SimState], opts: &RunOptions) -> Result<SimState> {
        self.check_inputs(inputs)?;
        let n = self.num_qubits();
        let width = self.input_width();
        let backend = opts.backend.resolve(n);
        let mut factors: Vec<SimState> = inputs.to_vec();
        if width < n {
            factors.push(SimState::from_bits(
                &self.circuit.input_labels()[width..],
                Backend::Sparse,
            )?);
        }
        let state = if factors.is_empty() {
            SimState::from_bits(self.circuit.input_labels(), backend)?
        } else {
            SimState::product(&factors, backend)?
        };
        Ok(state.with_support_cap(opts.support_cap))
    }

    /// Runs the program. On the sparse backend each input block is tensored
    /// in only when the circuit first touches it, which keeps the support of
    /// independent factors from multiplying early; the result is identical.
    pub fn run(
        &self,
        inputs: &[SimState],
        opts: &RunOptions,
        faults: &FaultPattern,
    ) -> Result<GadgetReport> {
        self.check_inputs(inputs)?;
        let n = self.num_qubits();
        let mut rng = trial_rng(opts.seed, 0);
        let deferred = opts.mode == SimMode::Deferred;
        let report = |state: SimState| GadgetReport {
            output_state: state,
            data_blocks: self.data_blocks.clone(),
            ancilla_qubits: self.ancilla_qubits(),
            classical_registers: self.registers.clone(),
        };
        if opts.backend.resolve(n) == Backend::Dense {
            let mut state = self.initial_state(inputs, opts)?;
            if deferred {
                run_deferred(&mut state, &self.circuit, faults, &mut rng)?;
            } else {
                run_circuit(&mut state, &self.circuit, faults)?;
            }
            return Ok(report(state));
        }

        // Input faults on a block are applied to it before it joins.
        let width = self.input_width();
        let mut blocks: Vec<SparseState> = inputs.iter().map(SimState::to_sparse).collect();
        let mut rest = FaultPattern::none();
        for &(loc, pauli) in &faults.entries {
            if loc.kind == FaultKind::Input && loc.qubit < width && loc.time == 0 {
                let b = self
                    .input_blocks
                    .iter()
                    .position(|blk| blk.contains(&loc.qubit))
                    .expect("covered");
                let offset = self.input_blocks[b][0];
                blocks[b].apply_gate(&pauli.gate(), &[loc.qubit - offset])?;
            } else {
                rest.entries.push((loc, pauli));
            }
        }
        let usage = self.circuit.usage();
        let depth = self.circuit.depth();
        let join_time: Vec<usize> = self
            .input_blocks
            .iter()
            .map(|blk| {
                blk.iter()
                    .filter_map(|&q| usage[q].map(|u| u.0))
                    .min()
                    .unwrap_or(depth)
            })
            .collect();
        let mut labels = self.circuit.input_labels().to_vec();
        labels[..width].iter_mut().for_each(|b| *b = false);
        let mut state = SparseState::from_bits(&labels)?.with_cap(opts.support_cap);
        let mut joined = vec![false; blocks.len()];
        let mut join = |s: &mut SparseState, t: usize| -> Result<()> {
            for (b, blk) in self.input_blocks.iter().enumerate() {
                if !joined[b] && join_time[b] <= t {
                    s.join(&blocks[b], blk)?;
                    joined[b] = true;
                }
            }
            Ok(())
        };
        run_circuit_staged(
            &mut state,
            &self.circuit,
            &rest,
            &mut join,
            |s: &mut SparseState, cp: &CollapsePoint| {
                if deferred {
                    for &q in &cp.qubits {
                        sample_qubit(s, q, &mut rng)?;
                    }
                }
                Ok(())
            },
        )?;
        join(&mut state, depth)?;
        Ok(report(SimState::Sparse(state)))
    }

    /// True if any operation in the circuit is a non-unitary step. Circuits
    /// have no measurement operation, so this only reports collapse marks.
    pub fn uses_collapse(&self) -> bool {
        !self.circuit.collapse_points().is_empty()
    }
}

/// Applies `gate` at every position of the given blocks: the i-th
/// application acts on `[blocks[0][i], blocks[1][i], …]`.
pub fn bitwise(c: &mut Circuit, gate: &Gate, blocks: &[&[usize]]) -> Result<()> {
    let n = blocks[0].len();
    if blocks.iter().any(|b| b.len() != n) {
        return Err(Error::InvalidParameter("blocks differ in length".into()));
    }
    for i in 0..n {
        let targets: Vec<usize> = blocks.iter().map(|b| b[i]).collect();
        c.push(gate.clone(), &targets)?;
    }
    Ok(())
}

/// Logical Hadamard on one block. Bitwise for steane7 and unencoded1; the
/// bit-flip code has no transversal H, so the block is decoded, rotated and
/// re-encoded (not fault-tolerant).
pub fn push_logical_h(c: &mut Circuit, code: &CodeSpec, block: &[usize]) -> Result<()> {
    match code.name {
        CodeName::Steane7 | CodeName::Unencoded1 => bitwise(c, &Gate::h(), &[block]),
        CodeName::Bitflip3 => {
            let enc = encoder_circuit(code);
            c.append(&enc, block)?;
            c.push(Gate::h(), &[block[0]])?;
            c.append(&enc, block)
        }
    }
}

/// Encoded (α|0⟩ + β|1⟩) as a sparse block state.
pub fn encoded(code: &CodeSpec, alpha: C64, beta: C64) -> Result<SimState> {
    let q = crate::simcore::StateVector::qubit(alpha, beta)?;
    Ok(SimState::Sparse(SparseState::from_dense(
        &crate::codes::encode(code, &q)?,
    )))
}

/// Encoded logical basis state.
pub fn encoded_bit(code: &CodeSpec, bit: bool) -> SimState {
    let s = if bit {
        &code.logical_one
    } else {
        &code.logical_zero
    };
    SimState::Sparse(SparseState::from_dense(s))
}

/// Deviation of the state's norm² from 1.
pub fn norm_drift(state: &SimState) -> f64 {
    (state.norm_sqr() - 1.0).abs()
}
