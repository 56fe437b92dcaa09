//! Small quantum codes, classical decoders and cat states.
//!
//! Steane positions are 0-indexed here; check row `i` holds the positions
//! whose 1-based index has bit `i` set, so a syndrome read as a binary
//! number is the 1-based position of a single flipped bit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::backend::{key_flip, BasisKey};
use crate::simcore::{Circuit, Gate, Pauli, QuantumState, SimState, SparseState, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeName {
    Steane7,
    Bitflip3,
    Unencoded1,
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeName::Steane7 => "steane7",
            CodeName::Bitflip3 => "bitflip3",
            CodeName::Unencoded1 => "unencoded1",
        })
    }
}

impl FromStr for CodeName {
    type Err = Error;
    fn from_str(s: &str) -> Result<CodeName> {
        match s {
            "steane7" => Ok(CodeName::Steane7),
            "bitflip3" => Ok(CodeName::Bitflip3),
            "unencoded1" => Ok(CodeName::Unencoded1),
            _ => Err(Error::InvalidParameter(format!(
                "unknown code '{s}' (expected steane7, bitflip3 or unencoded1)"
            ))),
        }
    }
}

/// Hamming [7,4] parity checks, 0-indexed.
pub const HAMMING_CHECKS: [[usize; 4]; 3] = [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]];

/// Gates with a transversal (bitwise) logical realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalGate {
    H,
    S,
    Cnot,
    X,
    Z,
}

#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub name: CodeName,
    pub n: usize,
    pub k_correctable: usize,
    pub logical_zero: StateVector,
    pub logical_one: StateVector,
    /// Supports of the Z-type checks, which detect bit flips.
    pub z_checks: Vec<Vec<usize>>,
    /// Supports of the X-type checks, which detect phase flips.
    pub x_checks: Vec<Vec<usize>>,
}

fn uniform_over(n: usize, words: &[u32]) -> StateVector {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let a = C64::new(1.0 / (words.len() as f64).sqrt(), 0.0);
    for &w in words {
        // Word bit i is position i; qubit i is bit (n-1-i) of the index.
        let index = (0..n).fold(0usize, |acc, i| {
            acc | ((((w >> i) & 1) as usize) << (n - 1 - i))
        });
        amps[index] = a;
    }
    StateVector::from_amplitudes(amps).expect("normalized")
}

/// All 7-bit words (bit i = position i) with zero Hamming syndrome.
pub fn hamming_codewords() -> Vec<u32> {
    (0u32..128).filter(|&w| syndrome_of_word(w) == 0).collect()
}

fn syndrome_of_word(w: u32) -> u8 {
    HAMMING_CHECKS
        .iter()
        .enumerate()
        .map(|(i, row)| (row.iter().map(|&p| (w >> p) & 1).sum::<u32>() as u8 & 1) << i)
        .sum()
}

impl CodeSpec {
    pub fn new(name: CodeName) -> CodeSpec {
        match name {
            CodeName::Steane7 => {
                let words = hamming_codewords();
                let even: Vec<u32> = words
                    .iter()
                    .copied()
                    .filter(|w| w.count_ones() % 2 == 0)
                    .collect();
                let odd: Vec<u32> = words
                    .iter()
                    .copied()
                    .filter(|w| w.count_ones() % 2 == 1)
                    .collect();
                let checks: Vec<Vec<usize>> = HAMMING_CHECKS.iter().map(|r| r.to_vec()).collect();
                CodeSpec {
                    name,
                    n: 7,
                    k_correctable: 1,
                    logical_zero: uniform_over(7, &even),
                    logical_one: uniform_over(7, &odd),
                    z_checks: checks.clone(),
                    x_checks: checks,
                }
            }
            CodeName::Bitflip3 => CodeSpec {
                name,
                n: 3,
                k_correctable: 1,
                logical_zero: uniform_over(3, &[0b000]),
                logical_one: uniform_over(3, &[0b111]),
                z_checks: vec![vec![0, 1], vec![1, 2]],
                x_checks: Vec::new(),
            },
            CodeName::Unencoded1 => CodeSpec {
                name,
                n: 1,
                k_correctable: 0,
                logical_zero: uniform_over(1, &[0]),
                logical_one: uniform_over(1, &[1]),
                z_checks: Vec::new(),
                x_checks: Vec::new(),
            },
        }
    }

    pub fn steane7() -> CodeSpec {
        CodeSpec::new(CodeName::Steane7)
    }

    pub fn bitflip3() -> CodeSpec {
        CodeSpec::new(CodeName::Bitflip3)
    }

    pub fn unencoded1() -> CodeSpec {
        CodeSpec::new(CodeName::Unencoded1)
    }

    /// Basis codewords of |0⟩_L or |1⟩_L, as position bit masks.
    pub fn codewords(&self, logical: bool) -> Vec<u32> {
        let state = if logical {
            &self.logical_one
        } else {
            &self.logical_zero
        };
        let n = self.n;
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, _)| {
                (0..n).fold(0u32, |acc, q| {
                    acc | ((((i >> (n - 1 - q)) & 1) as u32) << q)
                })
            })
            .collect()
    }

    /// The stabilizer generators as (Pauli type, support).
    pub fn stabilizers(&self) -> Vec<(Pauli, Vec<usize>)> {
        self.z_checks
            .iter()
            .map(|s| (Pauli::Z, s.clone()))
            .chain(self.x_checks.iter().map(|s| (Pauli::X, s.clone())))
            .collect()
    }

    /// Classical decoding of the block's bit values: the logical bit after
    /// correcting up to `k_correctable` flips.
    pub fn decode_bits(&self, bits: &[bool]) -> bool {
        match self.name {
            CodeName::Steane7 => {
                let mut arr = [false; 7];
                arr.copy_from_slice(bits);
                let (corrected, _) = hamming_decode(arr);
                corrected.iter().filter(|&&b| b).count() % 2 == 1
            }
            CodeName::Bitflip3 => bits.iter().filter(|&&b| b).count() >= 2,
            CodeName::Unencoded1 => bits[0],
        }
    }
}

/// α|0⟩_L + β|1⟩_L for an input qubit α|0⟩ + β|1⟩.
pub fn encode(code: &CodeSpec, logical: &StateVector) -> Result<StateVector> {
    if logical.num_qubits() != 1 {
        return Err(Error::SizeMismatch(logical.num_qubits(), 1));
    }
    let (a, b) = (logical.amplitude(0), logical.amplitude(1));
    let amps = code
        .logical_zero
        .amplitudes()
        .iter()
        .zip(code.logical_one.amplitudes())
        .map(|(z, o)| a * z + b * o)
        .collect();
    StateVector::from_unnormalized(amps)
}

/// Encodes a k-qubit logical state into k consecutive blocks (sparse).
pub fn encode_blocks(code: &CodeSpec, logical: &StateVector) -> Result<SparseState> {
    let k = logical.num_qubits();
    let n = code.n;
    let words = [code.codewords(false), code.codewords(true)];
    let norm = [
        1.0 / (words[0].len() as f64).sqrt(),
        1.0 / (words[1].len() as f64).sqrt(),
    ];
    let mut entries: Vec<(BasisKey, C64)> = Vec::new();
    for (index, &amp) in logical.amplitudes().iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let bits: Vec<bool> = (0..k).map(|j| (index >> (k - 1 - j)) & 1 == 1).collect();
        let mut partial: Vec<(BasisKey, C64)> = vec![([0u64; 4], amp)];
        for (j, &bit) in bits.iter().enumerate() {
            let ws = &words[bit as usize];
            let mut next = Vec::with_capacity(partial.len() * ws.len());
            for (key, a) in &partial {
                for &w in ws {
                    let mut key = *key;
                    for p in 0..n {
                        if (w >> p) & 1 == 1 {
                            key_flip(&mut key, j * n + p);
                        }
                    }
                    next.push((key, a * norm[bit as usize]));
                }
            }
            partial = next;
        }
        entries.extend(partial);
    }
    let mut state = SparseState::zero(k * n)?;
    state.set_entries(entries);
    Ok(state)
}

/// Standard encoder on one block: maps ψ on the input position (with all
/// other qubits |0⟩) to the encoded ψ.
pub fn encoder_circuit(code: &CodeSpec) -> Circuit {
    let mut c = Circuit::new(code.n);
    match code.name {
        CodeName::Steane7 => {
            // Logical X support {2, 4, 5}; the pivots 0, 1, 3 each add one
            // weight-4 generator of the even subcode.
            for t in [4, 5] {
                c.push(Gate::cnot(), &[2, t]).expect("valid");
            }
            for (pivot, targets) in [(0, [2, 4, 6]), (1, [2, 5, 6]), (3, [4, 5, 6])] {
                c.push(Gate::h(), &[pivot]).expect("valid");
                for t in targets {
                    c.push(Gate::cnot(), &[pivot, t]).expect("valid");
                }
            }
        }
        CodeName::Bitflip3 => {
            c.push(Gate::cnot(), &[0, 1]).expect("valid");
            c.push(Gate::cnot(), &[0, 2]).expect("valid");
        }
        CodeName::Unencoded1 => {}
    }
    c
}

/// Block position that carries the unencoded qubit for [`encoder_circuit`].
pub fn encoder_input(code: &CodeSpec) -> usize {
    match code.name {
        CodeName::Steane7 => 2,
        _ => 0,
    }
}

/// Bitwise fragment for a logical gate. One block (`n` qubits) or, for
/// CNOT, two blocks (control block first).
pub fn transversal(code: &CodeSpec, gate: LogicalGate) -> Result<Circuit> {
    let n = code.n;
    let unsupported = || Error::Unsupported(format!("transversal {gate:?} on {}", code.name));
    let mut c = Circuit::new(if gate == LogicalGate::Cnot { 2 * n } else { n });
    let bitwise = |c: &mut Circuit, g: Gate| {
        for q in 0..n {
            c.push(g.clone(), &[q]).expect("valid");
        }
    };
    match gate {
        LogicalGate::X => bitwise(&mut c, Gate::x()),
        LogicalGate::Z => bitwise(&mut c, Gate::z()),
        LogicalGate::Cnot => {
            for q in 0..n {
                c.push(Gate::cnot(), &[q, n + q])?;
            }
        }
        LogicalGate::H => match code.name {
            CodeName::Bitflip3 => return Err(unsupported()),
            _ => bitwise(&mut c, Gate::h()),
        },
        LogicalGate::S => match code.name {
            CodeName::Unencoded1 => bitwise(&mut c, Gate::s()),
            // Bitwise S acts as logical S†; a bitwise Z restores S.
            _ => {
                bitwise(&mut c, Gate::s());
                bitwise(&mut c, Gate::z());
            }
        },
    }
    Ok(c)
}

/// Corrects a 7-bit word with the Hamming code; returns (codeword, syndrome)
/// where a nonzero syndrome is the 1-based position that was flipped.
pub fn hamming_decode(bits: [bool; 7]) -> ([bool; 7], u8) {
    let w = bits
        .iter()
        .enumerate()
        .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i));
    let s = syndrome_of_word(w);
    let mut out = bits;
    if s != 0 {
        out[s as usize - 1] ^= true;
    }
    (out, s)
}

pub fn majority(bits: &[bool]) -> Result<bool> {
    if bits.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "majority needs an odd number of bits, got {}",
            bits.len()
        )));
    }
    Ok(2 * bits.iter().filter(|&&b| b).count() > bits.len())
}

/// A repetition-coded classical bit held in qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalRegister {
    pub n_rep: usize,
    pub bits: Vec<usize>,
}

impl ClassicalRegister {
    pub fn new(bits: Vec<usize>) -> ClassicalRegister {
        ClassicalRegister {
            n_rep: bits.len(),
            bits,
        }
    }

    /// Majority value on one basis state.
    pub fn decode_key(&self, key: &BasisKey) -> bool {
        let votes: Vec<bool> = self
            .bits
            .iter()
            .map(|&q| crate::simcore::backend::key_bit(key, q))
            .collect();
        majority(&votes).unwrap_or(false)
    }

    /// Probability that the register's majority reads 1.
    pub fn prob_one(&self, state: &SimState) -> f64 {
        state
            .entries()
            .iter()
            .filter(|(k, _)| self.decode_key(k))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// H on the first qubit then a CNOT chain; maps |0…0⟩ to the cat state.
pub fn prepare_cat(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "cat state needs n ≥ 2, got {n}"
        )));
    }
    let mut c = Circuit::new(n);
    c.push(Gate::h(), &[0])?;
    for q in 1..n {
        c.push(Gate::cnot(), &[q - 1, q])?;
    }
    Ok(c)
}

/// (|0…0⟩ + |1…1⟩)/√2.
pub fn ideal_cat(n: usize) -> Result<StateVector> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = h;
    amps[(1 << n) - 1] = h;
    StateVector::from_amplitudes(amps)
}

/// True if every stabilizer of the code, applied to block `b` (qubits
/// `offset..offset+n`), leaves the state unchanged.
pub fn is_stabilized(code: &CodeSpec, state: &SimState, offset: usize, tol: f64) -> Result<bool> {
    for (pauli, support) in code.stabilizers() {
        let mut image = state.clone();
        for &p in &support {
            image.apply_gate(&pauli.gate(), &[offset + p])?;
        }
        let overlap = crate::simcore::inner(state, &image)?;
        if (overlap - C64::new(1.0, 0.0)).norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::FaultPattern;
    use crate::simcore::run_circuit;

    #[test]
    fn steane_logical_states() {
        let code = CodeSpec::steane7();
        assert_eq!(code.codewords(false).len(), 8);
        assert!(code
            .codewords(false)
            .iter()
            .all(|w| w.count_ones() % 2 == 0));
        assert!(code.logical_zero.inner(&code.logical_one).unwrap().norm() < 1e-12);
        for s in [&code.logical_zero, &code.logical_one] {
            let st = SimState::Dense(s.clone());
            assert!(is_stabilized(&code, &st, 0, 1e-10).unwrap());
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_decode([false; 7]), ([false; 7], 0));
        let mut last = [false; 7];
        last[6] = true;
        assert_eq!(hamming_decode(last), ([false; 7], 7));
    }

    #[test]
    fn majority_rejects_even() {
        assert!(majority(&[true, true, false]).unwrap());
        assert!(!majority(&[false, false, false, false, true]).unwrap());
        assert!(majority(&[true, false]).is_err());
    }

    #[test]
    fn encoder_matches_projector_states() {
        for code in [CodeSpec::steane7(), CodeSpec::bitflip3()] {
            let enc = encoder_circuit(&code);
            for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
                let psi = StateVector::qubit(C64::new(a, 0.0), C64::new(0.0, b)).unwrap();
                let mut s = StateVector::zero(code.n).unwrap();
                // Load ψ onto the input position.
                let theta = 2.0 * b.atan2(a);
                s.apply_gate(&Gate::ry(theta), &[encoder_input(&code)])
                    .unwrap();
                s.apply_gate(&Gate::s(), &[encoder_input(&code)]).unwrap();
                run_circuit(&mut s, &enc, &FaultPattern::none()).unwrap();
                let want = encode(&code, &psi).unwrap();
                assert!((s.inner(&want).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }
}
