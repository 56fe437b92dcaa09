//! Dense state vector. Qubit 0 is the most significant bit of the basis index.

use num_complex::Complex64 as C64;

use super::backend::{check_targets, BasisKey};
use super::circuit::ClassicalOp;
use super::gate::{Gate, GateForm};
use crate::error::{Error, Result};

/// Default limit on the number of qubits of a dense state.
pub const DEFAULT_DENSE_CAP: usize = 24;

pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

/// Inserts a zero bit at each of the (ascending) positions.
#[inline]
fn spread(mut c: usize, sorted_pos: &[usize]) -> usize {
    for &p in sorted_pos {
        let low = c & ((1 << p) - 1);
        c = ((c >> p) << (p + 1)) | low;
    }
    c
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<StateVector> {
        StateVector::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<StateVector> {
        StateVector::basis_with_cap(num_qubits, index, DEFAULT_DENSE_CAP)
    }

    pub fn basis_with_cap(num_qubits: usize, index: usize, cap: usize) -> Result<StateVector> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter(
                "a state needs at least one qubit".into(),
            ));
        }
        if num_qubits > cap {
            return Err(Error::CapExceeded {
                what: "dense qubit count",
                needed: num_qubits,
                cap,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Basis state from per-qubit bits, qubit 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<StateVector> {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        StateVector::basis(bits.len(), index)
    }

    /// Takes ownership of an amplitude vector that must already be normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<StateVector> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > DEFAULT_DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "dense qubit count",
                needed: num_qubits,
                cap: DEFAULT_DENSE_CAP,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(StateVector { num_qubits, amps })
    }

    /// Normalizes the given amplitudes first.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<StateVector> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "zero vector cannot be normalized".into(),
            ));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps)
    }

    /// α|0⟩ + β|1⟩ (normalized).
    pub fn qubit(alpha: C64, beta: C64) -> Result<StateVector> {
        StateVector::from_unnormalized(vec![alpha, beta])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit position of `qubit` inside a basis index.
    #[inline]
    pub fn bit_pos(&self, qubit: usize) -> usize {
        self.num_qubits - 1 - qubit
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        if n > DEFAULT_DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "dense qubit count",
                needed: n,
                cap: DEFAULT_DENSE_CAP,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    /// Basis index as a key with bit q = qubit q.
    pub fn key_of(&self, index: usize) -> BasisKey {
        let mut key = [0u64; 4];
        for q in 0..self.num_qubits {
            if (index >> self.bit_pos(q)) & 1 == 1 {
                key[q / 64] |= 1 << (q % 64);
            }
        }
        key
    }

    pub fn index_of(&self, key: &BasisKey) -> usize {
        let mut index = 0usize;
        for q in 0..self.num_qubits {
            if (key[q / 64] >> (q % 64)) & 1 == 1 {
                index |= 1 << self.bit_pos(q);
            }
        }
        index
    }

    fn offsets(&self, targets: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let k = targets.len();
        let pos: Vec<usize> = targets.iter().map(|&t| self.bit_pos(t)).collect();
        let offsets = (0..1usize << k)
            .map(|s| {
                (0..k)
                    .filter(|&j| (s >> (k - 1 - j)) & 1 == 1)
                    .map(|j| 1usize << pos[j])
                    .sum()
            })
            .collect();
        let mut sorted = pos;
        sorted.sort_unstable();
        (offsets, sorted)
    }

    pub fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        check_targets(gate.name(), gate.arity(), targets, self.num_qubits)?;
        let k = targets.len();
        let dim = 1usize << k;
        let (off, sorted) = self.offsets(targets);
        let blocks = 1usize << (self.num_qubits - k);
        let amps = &mut self.amps;
        match gate.form() {
            GateForm::Diagonal(d) => {
                for c in 0..blocks {
                    let base = spread(c, &sorted);
                    for s in 0..dim {
                        amps[base + off[s]] *= d[s];
                    }
                }
            }
            GateForm::Permutation { perm, phase } => {
                let mut tmp = [C64::new(0.0, 0.0); 8];
                for c in 0..blocks {
                    let base = spread(c, &sorted);
                    for s in 0..dim {
                        tmp[s] = amps[base + off[s]];
                    }
                    for s in 0..dim {
                        amps[base + off[perm[s]]] = phase[s] * tmp[s];
                    }
                }
            }
            GateForm::General if k == 1 => {
                let (m00, m01, m10, m11) = (
                    gate.entry(0, 0),
                    gate.entry(0, 1),
                    gate.entry(1, 0),
                    gate.entry(1, 1),
                );
                let stride = off[1];
                for c in 0..blocks {
                    let i0 = spread(c, &sorted);
                    let (a0, a1) = (amps[i0], amps[i0 + stride]);
                    amps[i0] = m00 * a0 + m01 * a1;
                    amps[i0 + stride] = m10 * a0 + m11 * a1;
                }
            }
            GateForm::General => {
                let m = gate.matrix();
                let mut tmp = [C64::new(0.0, 0.0); 8];
                for c in 0..blocks {
                    let base = spread(c, &sorted);
                    for s in 0..dim {
                        tmp[s] = amps[base + off[s]];
                    }
                    for r in 0..dim {
                        let row = &m[r * dim..(r + 1) * dim];
                        amps[base + off[r]] = row.iter().zip(&tmp[..dim]).map(|(a, b)| a * b).sum();
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_classical(&mut self, op: &ClassicalOp, targets: &[usize]) -> Result<()> {
        check_targets(op.name().to_string(), op.width(), targets, self.num_qubits)?;
        let k = targets.len();
        let (off, sorted) = self.offsets(targets);
        let blocks = 1usize << (self.num_qubits - k);
        let image: Vec<usize> = (0..1u64 << k).map(|s| op.eval(s) as usize).collect();
        let mut tmp = vec![C64::new(0.0, 0.0); 1 << k];
        for c in 0..blocks {
            let base = spread(c, &sorted);
            for (s, t) in tmp.iter_mut().enumerate() {
                *t = self.amps[base + off[s]];
            }
            for (s, t) in tmp.iter().enumerate() {
                self.amps[base + off[image[s]]] = *t;
            }
        }
        Ok(())
    }

    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1usize << self.bit_pos(qubit);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// ⟨σ_z⟩ on one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        Ok(1.0 - 2.0 * self.prob_one(qubit)?)
    }

    /// Projects `qubit` onto `outcome` and renormalizes; returns the outcome probability.
    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        let p1 = self.prob_one(qubit)?;
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p <= 1e-300 {
            return Err(Error::ZeroProbability(qubit));
        }
        let bit = 1usize << self.bit_pos(qubit);
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) == outcome {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
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
    use std::f64::consts::FRAC_1_SQRT_2;

    fn approx(a: &[C64], b: &[C64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_gate(&Gate::x(), &[0]).unwrap();
        assert_eq!(s.amplitude(0b100), C64::new(1.0, 0.0));
        assert_eq!(s.key_of(0b100), [1, 0, 0, 0]);
        assert_eq!(s.index_of(&[1, 0, 0, 0]), 0b100);
    }

    #[test]
    fn cnot_truth_table() {
        for (input, output) in [(0b00, 0b00), (0b01, 0b01), (0b10, 0b11), (0b11, 0b10)] {
            let mut s = StateVector::basis(2, input).unwrap();
            s.apply_gate(&Gate::cnot(), &[0, 1]).unwrap();
            assert_eq!(s.amplitude(output), C64::new(1.0, 0.0));
        }
        // Reversed targets: control is qubit 1.
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply_gate(&Gate::cnot(), &[1, 0]).unwrap();
        assert_eq!(s.amplitude(0b11), C64::new(1.0, 0.0));
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::h(), &[0]).unwrap();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        assert!(approx(s.amplitudes(), &[h, h]));
    }

    #[test]
    fn general_three_qubit_matches_kron() {
        // Toffoli built as a General gate (via phase) on non-adjacent targets.
        let g = Gate::toffoli().with_phase(0.3, "phased");
        let mut s = StateVector::basis(4, 0b1011).unwrap();
        s.apply_gate(&g, &[3, 0, 1]).unwrap();
        // controls q3=1, q0=1 → flip q1.
        let want = C64::from_polar(1.0, 0.3);
        assert!((s.amplitude(0b1111) - want).norm() < 1e-12);
    }

    #[test]
    fn expectation_and_collapse() {
        let s = StateVector::qubit(C64::new(0.5, 0.0), C64::new(0.75f64.sqrt(), 0.0)).unwrap();
        assert!((s.expectation_z(0).unwrap() + 0.5).abs() < 1e-12);
        let mut t = s.clone();
        let p = t.collapse(0, true).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
        assert!((t.expectation_z(0).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::x(), &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply_gate(&Gate::cnot(), &[0]),
            Err(Error::ArityMismatch { .. })
        ));
        assert_eq!(
            s.apply_gate(&Gate::cnot(), &[1, 1]),
            Err(Error::DuplicateTarget(1))
        );
        assert!(StateVector::zero(25).unwrap_err().is_cap_exceeded());
    }
}
