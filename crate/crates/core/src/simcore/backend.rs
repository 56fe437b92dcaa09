//! Backend selection and the state interface shared by both representations.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::circuit::ClassicalOp;
use super::gate::Gate;
use super::sparse::SparseState;
use super::state::{StateVector, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};

/// Basis state as a bit set: bit q of the key is the value of qubit q.
pub type BasisKey = [u64; 4];

pub const MAX_SPARSE_QUBITS: usize = 256;

/// Auto mode uses the dense kernels up to this many qubits.
pub const AUTO_DENSE_LIMIT: usize = 16;

#[inline]
pub fn key_bit(key: &BasisKey, q: usize) -> bool {
    (key[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
pub fn key_flip(key: &mut BasisKey, q: usize) {
    key[q >> 6] ^= 1 << (q & 63);
}

pub(crate) fn check_targets(
    name: String,
    arity: usize,
    targets: &[usize],
    num_qubits: usize,
) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::ArityMismatch {
            gate: name,
            arity,
            targets: targets.len(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: t,
                num_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Operations every state representation supports.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;
    fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()>;
    fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()>;
    fn prob_one(&self, qubit: usize) -> Result<f64>;
    fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64>;
    fn norm_sqr(&self) -> f64;

    fn expectation_z(&self, qubit: usize) -> Result<f64> {
        Ok(1.0 - 2.0 * self.prob_one(qubit)?)
    }

    fn expectations(&self) -> Vec<f64> {
        (0..self.num_qubits())
            .map(|q| self.expectation_z(q).expect("qubit in range"))
            .collect()
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        StateVector::num_qubits(self)
    }
    fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        StateVector::apply_gate(self, gate, targets)
    }
    fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()> {
        StateVector::apply_classical(self, op, targets)
    }
    fn prob_one(&self, qubit: usize) -> Result<f64> {
        StateVector::prob_one(self, qubit)
    }
    fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        StateVector::collapse(self, qubit, outcome)
    }
    fn norm_sqr(&self) -> f64 {
        StateVector::norm_sqr(self)
    }
}

impl QuantumState for SparseState {
    fn num_qubits(&self) -> usize {
        SparseState::num_qubits(self)
    }
    fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        SparseState::apply_gate(self, gate, targets)
    }
    fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()> {
        SparseState::apply_classical(self, op, targets)
    }
    fn prob_one(&self, qubit: usize) -> Result<f64> {
        SparseState::prob_one(self, qubit)
    }
    fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        SparseState::collapse(self, qubit, outcome)
    }
    fn norm_sqr(&self) -> f64 {
        SparseState::norm_sqr(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Sparse,
    #[default]
    Auto,
}

impl Backend {
    pub fn resolve(self, num_qubits: usize) -> Backend {
        match self {
            Backend::Auto if num_qubits <= AUTO_DENSE_LIMIT => Backend::Dense,
            Backend::Auto => Backend::Sparse,
            b => b,
        }
    }
}

/// A state held by whichever backend was selected.
#[derive(Debug, Clone)]
pub enum SimState {
    Dense(StateVector),
    Sparse(SparseState),
}

impl SimState {
    /// Computational basis state, qubit 0 first.
    pub fn from_bits(bits: &[bool], backend: Backend) -> Result<SimState> {
        match backend.resolve(bits.len()) {
            Backend::Dense => {
                if bits.len() > DEFAULT_DENSE_CAP {
                    return Err(Error::CapExceeded {
                        what: "dense qubit count",
                        needed: bits.len(),
                        cap: DEFAULT_DENSE_CAP,
                    });
                }
                Ok(SimState::Dense(StateVector::from_bits(bits)?))
            }
            _ => Ok(SimState::Sparse(SparseState::from_bits(bits)?)),
        }
    }

    pub fn zero(num_qubits: usize, backend: Backend) -> Result<SimState> {
        SimState::from_bits(&vec![false; num_qubits], backend)
    }

    /// Product of the given factors (first factor holds the lowest qubit indices).
    pub fn product(factors: &[SimState], backend: Backend) -> Result<SimState> {
        let n: usize = factors.iter().map(|f| f.num_qubits()).sum();
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        match backend.resolve(n) {
            Backend::Dense => {
                let mut acc = factors[0].to_dense()?;
                for f in &factors[1..] {
                    acc = acc.tensor(&f.to_dense()?)?;
                }
                Ok(SimState::Dense(acc))
            }
            _ => {
                let mut acc = factors[0].to_sparse();
                for f in &factors[1..] {
                    acc = acc.tensor(&f.to_sparse())?;
                }
                Ok(SimState::Sparse(acc))
            }
        }
    }

    pub fn to_dense(&self) -> Result<StateVector> {
        match self {
            SimState::Dense(s) => Ok(s.clone()),
            SimState::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> SparseState {
        match self {
            SimState::Dense(s) => SparseState::from_dense(s),
            SimState::Sparse(s) => s.clone(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            SimState::Dense(_) => Backend::Dense,
            SimState::Sparse(_) => Backend::Sparse,
        }
    }

    /// Nonzero entries as (key, amplitude) pairs.
    pub fn entries(&self) -> Vec<(BasisKey, C64)> {
        match self {
            SimState::Dense(s) => s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 0.0)
                .map(|(i, a)| (s.key_of(i), *a))
                .collect(),
            SimState::Sparse(s) => s.entries().to_vec(),
        }
    }

    /// Sets the support cap on a sparse state; no effect on dense states.
    pub fn with_support_cap(self, cap: usize) -> SimState {
        match self {
            SimState::Sparse(s) => SimState::Sparse(s.with_cap(cap)),
            d => d,
        }
    }
}

impl From<StateVector> for SimState {
    fn from(s: StateVector) -> SimState {
        SimState::Dense(s)
    }
}

impl From<SparseState> for SimState {
    fn from(s: SparseState) -> SimState {
        SimState::Sparse(s)
    }
}

impl QuantumState for SimState {
    fn num_qubits(&self) -> usize {
        match self {
            SimState::Dense(s) => s.num_qubits(),
            SimState::Sparse(s) => s.num_qubits(),
        }
    }
    fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        match self {
            SimState::Dense(s) => s.apply_gate(gate, targets),
            SimState::Sparse(s) => s.apply_gate(gate, targets),
        }
    }
    fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()> {
        match self {
            SimState::Dense(s) => s.apply_classical(op, targets),
            SimState::Sparse(s) => s.apply_classical(op, targets),
        }
    }
    fn prob_one(&self, qubit: usize) -> Result<f64> {
        match self {
            SimState::Dense(s) => s.prob_one(qubit),
            SimState::Sparse(s) => s.prob_one(qubit),
        }
    }
    fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        match self {
            SimState::Dense(s) => s.collapse(qubit, outcome),
            SimState::Sparse(s) => s.collapse(qubit, outcome),
        }
    }
    fn norm_sqr(&self) -> f64 {
        match self {
            SimState::Dense(s) => s.norm_sqr(),
            SimState::Sparse(s) => s.norm_sqr(),
        }
    }
}
