//! Sparse-support state: only basis states with nonzero amplitude are stored.
//!
//! Gadget circuits run on well over a hundred qubits, but stay classical on
//! most of them, so the support stays small even though 2^n does not.

use num_complex::Complex64 as C64;
use rustc_hash::FxHashMap;

use super::backend::{check_targets, key_bit, key_flip, BasisKey, MAX_SPARSE_QUBITS};
use super::circuit::ClassicalOp;
use super::gate::{Gate, GateForm};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Default limit on the number of stored basis states.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 22;

/// Amplitudes below this magnitude are dropped after interfering gates.
const PRUNE: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct SparseState {
    num_qubits: usize,
    entries: Vec<(BasisKey, C64)>,
    cap: usize,
}

#[inline]
fn extract(key: &BasisKey, targets: &[usize]) -> usize {
    targets
        .iter()
        .fold(0usize, |acc, &t| (acc << 1) | key_bit(key, t) as usize)
}

#[inline]
fn deposit(mut key: BasisKey, targets: &[usize], s: usize) -> BasisKey {
    let k = targets.len();
    for (j, &t) in targets.iter().enumerate() {
        let want = (s >> (k - 1 - j)) & 1 == 1;
        if key_bit(&key, t) != want {
            key_flip(&mut key, t);
        }
    }
    key
}

impl SparseState {
    pub fn zero(num_qubits: usize) -> Result<SparseState> {
        SparseState::from_bits(&vec![false; num_qubits])
    }

    /// Basis state from per-qubit bits, qubit 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<SparseState> {
        let n = bits.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a state needs at least one qubit".into(),
            ));
        }
        if n > MAX_SPARSE_QUBITS {
            return Err(Error::CapExceeded {
                what: "sparse qubit count",
                needed: n,
                cap: MAX_SPARSE_QUBITS,
            });
        }
        let mut key = [0u64; 4];
        for (q, &b) in bits.iter().enumerate() {
            if b {
                key_flip(&mut key, q);
            }
        }
        Ok(SparseState {
            num_qubits: n,
            entries: vec![(key, C64::new(1.0, 0.0))],
            cap: DEFAULT_SUPPORT_CAP,
        })
    }

    pub fn from_dense(state: &StateVector) -> SparseState {
        let entries = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, a)| (state.key_of(i), *a))
            .collect();
        SparseState {
            num_qubits: state.num_qubits(),
            entries,
            cap: DEFAULT_SUPPORT_CAP,
        }
    }

    pub fn to_dense(&self) -> Result<StateVector> {
        let layout = StateVector::zero(self.num_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << self.num_qubits];
        for (key, a) in &self.entries {
            amps[layout.index_of(key)] = *a;
        }
        StateVector::from_unnormalized(amps)
    }

    pub fn with_cap(mut self, cap: usize) -> SparseState {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(BasisKey, C64)] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &SparseState) -> Result<SparseState> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_SPARSE_QUBITS {
            return Err(Error::CapExceeded {
                what: "sparse qubit count",
                needed: n,
                cap: MAX_SPARSE_QUBITS,
            });
        }
        let needed = self.entries.len() * other.entries.len();
        if needed > self.cap {
            return Err(Error::CapExceeded {
                what: "sparse support",
                needed,
                cap: self.cap,
            });
        }
        let mut entries = Vec::with_capacity(needed);
        for (ka, a) in &self.entries {
            for (kb, b) in &other.entries {
                let mut key = *ka;
                for q in 0..other.num_qubits {
                    if key_bit(kb, q) {
                        key_flip(&mut key, self.num_qubits + q);
                    }
                }
                entries.push((key, a * b));
            }
        }
        Ok(SparseState {
            num_qubits: n,
            entries,
            cap: self.cap,
        })
    }

    /// Replaces the |0…0⟩ factor on `qubits` by `block` (block qubit i goes
    /// to `qubits[i]`). Every basis key must have those qubits clear.
    pub fn join(&mut self, block: &SparseState, qubits: &[usize]) -> Result<()> {
        if block.num_qubits != qubits.len() {
            return Err(Error::SizeMismatch(block.num_qubits, qubits.len()));
        }
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if self.entries.iter().any(|(k, _)| key_bit(k, q)) {
                return Err(Error::InvalidParameter(format!("qubit {q} is not in |0⟩")));
            }
        }
        let needed = self.entries.len() * block.entries.len();
        if needed > self.cap {
            return Err(Error::CapExceeded {
                what: "sparse support",
                needed,
                cap: self.cap,
            });
        }
        let mut entries = Vec::with_capacity(needed);
        for (ka, a) in &self.entries {
            for (kb, b) in &block.entries {
                let mut key = *ka;
                for (i, &q) in qubits.iter().enumerate() {
                    if key_bit(kb, i) {
                        key_flip(&mut key, q);
                    }
                }
                entries.push((key, a * b));
            }
        }
        entries.sort_unstable_by_key(|x| x.0);
        self.entries = entries;
        Ok(())
    }

    pub(crate) fn set_entries(&mut self, entries: Vec<(BasisKey, C64)>) {
        self.entries = entries;
    }

    /// Builds a state from (key, amplitude) pairs, merging repeated keys and
    /// normalizing.
    pub fn from_entries(num_qubits: usize, entries: Vec<(BasisKey, C64)>) -> Result<SparseState> {
        let mut state = SparseState::zero(num_qubits)?;
        let mut merged: FxHashMap<BasisKey, C64> = FxHashMap::default();
        for (k, a) in entries {
            if let Some(q) = (num_qubits..MAX_SPARSE_QUBITS).find(|&q| key_bit(&k, q)) {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            *merged.entry(k).or_default() += a;
        }
        let mut entries: Vec<(BasisKey, C64)> = merged
            .into_iter()
            .filter(|(_, a)| a.norm() > PRUNE)
            .collect();
        entries.sort_unstable_by_key(|x| x.0);
        let norm = entries
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "zero vector cannot be normalized".into(),
            ));
        }
        entries.iter_mut().for_each(|(_, a)| *a /= norm);
        state.entries = entries;
        Ok(state)
    }

    /// Amplitude lookup table.
    pub fn to_map(&self) -> FxHashMap<BasisKey, C64> {
        self.entries.iter().copied().collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        check_targets(gate.name(), gate.arity(), targets, self.num_qubits)?;
        match gate.form() {
            GateForm::Diagonal(d) => {
                for (key, a) in self.entries.iter_mut() {
                    *a *= d[extract(key, targets)];
                }
            }
            GateForm::Permutation { perm, phase } => {
                for (key, a) in self.entries.iter_mut() {
                    let s = extract(key, targets);
                    *key = deposit(*key, targets, perm[s]);
                    *a *= phase[s];
                }
            }
            GateForm::General => {
                let dim = gate.dim();
                let m = gate.matrix();
                let mut out: FxHashMap<BasisKey, C64> = FxHashMap::default();
                out.reserve(self.entries.len() * 2);
                for (key, a) in &self.entries {
                    let s = extract(key, targets);
                    for r in 0..dim {
                        let coef = m[r * dim + s];
                        if coef.norm_sqr() == 0.0 {
                            continue;
                        }
                        *out.entry(deposit(*key, targets, r)).or_default() += coef * a;
                    }
                    if out.len() > self.cap {
                        return Err(Error::CapExceeded {
                            what: "sparse support",
                            needed: out.len(),
                            cap: self.cap,
                        });
                    }
                }
                self.entries = out.into_iter().filter(|(_, a)| a.norm() > PRUNE).collect();
                // Deterministic order regardless of hash iteration.
                self.entries.sort_unstable_by_key(|x| x.0);
            }
        }
        Ok(())
    }

    pub fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()> {
        check_targets(op.name().to_string(), op.width(), targets, self.num_qubits)?;
        for (key, _) in self.entries.iter_mut() {
            let s = extract(key, targets) as u64;
            *key = deposit(*key, targets, op.eval(s) as usize);
        }
        Ok(())
    }

    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(self
            .entries
            .iter()
            .filter(|(k, _)| key_bit(k, qubit))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        Ok(1.0 - 2.0 * self.prob_one(qubit)?)
    }

    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        let p1 = self.prob_one(qubit)?;
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p <= 1e-300 {
            return Err(Error::ZeroProbability(qubit));
        }
        let scale = 1.0 / p.sqrt();
        self.entries.retain(|(k, _)| key_bit(k, qubit) == outcome);
        self.entries.iter_mut().for_each(|(_, a)| *a *= scale);
        Ok(p)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_on_mixed_gates() {
        let gates: Vec<(Gate, Vec<usize>)> = vec![
            (Gate::h(), vec![0]),
            (Gate::cnot(), vec![0, 3]),
            (Gate::t(), vec![3]),
            (Gate::ry(0.7), vec![2]),
            (Gate::toffoli(), vec![2, 3, 1]),
            (Gate::h(), vec![3]),
            (Gate::fredkin(), vec![1, 0, 2]),
            (Gate::v(), vec![1]),
        ];
        let mut dense = StateVector::zero(4).unwrap();
        let mut sparse = SparseState::zero(4).unwrap();
        for (g, t) in &gates {
            dense.apply_gate(g, t).unwrap();
            sparse.apply_gate(g, t).unwrap();
        }
        let back = sparse.to_dense().unwrap();
        let overlap = dense.inner(&back).unwrap().norm_sqr();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interference_prunes_support() {
        let mut s = SparseState::zero(2).unwrap();
        s.apply_gate(&Gate::h(), &[1]).unwrap();
        assert_eq!(s.support(), 2);
        s.apply_gate(&Gate::h(), &[1]).unwrap();
        assert_eq!(s.support(), 1);
    }

    #[test]
    fn support_cap_is_enforced() {
        let mut s = SparseState::zero(8).unwrap().with_cap(16);
        let mut result = Ok(());
        for q in 0..8 {
            result = result.and(s.apply_gate(&Gate::h(), &[q]));
        }
        assert!(result.unwrap_err().is_cap_exceeded());
    }

    #[test]
    fn handles_high_qubit_indices() {
        let mut s = SparseState::zero(200).unwrap();
        s.apply_gate(&Gate::h(), &[150]).unwrap();
        s.apply_gate(&Gate::cnot(), &[150, 199]).unwrap();
        assert!(s.expectation_z(199).unwrap().abs() < 1e-12);
        assert_eq!(s.support(), 2);
    }
}
