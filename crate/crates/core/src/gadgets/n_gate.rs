//! The quantum-to-classical 𝒩 gate: copies the logical value of a code
//! block onto a repetition-coded classical register.

use crate::codes::{ClassicalRegister, CodeName, CodeSpec};
use crate::error::{Error, Result};
use crate::noise::FaultPattern;
use crate::simcore::{Circuit, Gate, SimState};

use super::{GadgetProgram, GadgetReport, RunOptions};

/// Truth table of 𝒩 on basis labels: the logical value is XOR-ed into the
/// classical one.
pub fn n_gate_contract(logical: bool, classical: bool) -> (bool, bool) {
    (logical, classical ^ logical)
}

/// One 𝒩₁ instance: `target ^= decoded logical value of block`.
///
/// The target first receives the raw parity of the block. Fresh syndrome
/// bits then record the classical checks, and the target is flipped once
/// more when any syndrome bit is set, which undoes the parity change caused
/// by a single bit flip in the block. Syndrome bits are left negated.
pub fn push_n1(c: &mut Circuit, code: &CodeSpec, block: &[usize], target: usize) -> Result<()> {
    if block.len() != code.n {
        return Err(Error::SizeMismatch(block.len(), code.n));
    }
    for &q in block {
        c.push(Gate::cnot(), &[q, target])?;
    }
    let checks = &code.z_checks;
    if checks.is_empty() {
        return Ok(());
    }
    let syn = c.alloc(checks.len());
    for (s, check) in syn.iter().zip(checks) {
        for &p in check {
            c.push(Gate::cnot(), &[block[p], *s])?;
        }
    }
    for &s in &syn {
        c.push(Gate::x(), &[s])?;
    }
    // target ^= OR(syndrome) = 1 ⊕ AND(¬s…)
    match syn.len() {
        2 => {
            c.push(Gate::toffoli(), &[syn[0], syn[1], target])?;
        }
        3 => {
            let w = c.alloc_one();
            c.push(Gate::toffoli(), &[syn[0], syn[1], w])?;
            c.push(Gate::toffoli(), &[w, syn[2], target])?;
        }
        k => return Err(Error::Unsupported(format!("{k} syndrome bits"))),
    }
    c.push(Gate::x(), &[target])?;
    Ok(())
}

/// Circuit of a single 𝒩₁ on qubits `[block (n)] [target]` plus fresh ancillas.
pub fn build_n1(code: &CodeSpec) -> Result<Circuit> {
    if code.name == CodeName::Unencoded1 {
        return Err(Error::Unsupported("𝒩₁ needs an encoded block".into()));
    }
    let mut c = Circuit::new(code.n + 1);
    let block: Vec<usize> = (0..code.n).collect();
    push_n1(&mut c, code, &block, code.n)?;
    Ok(c)
}

/// `n_rep` independent 𝒩₁ instances, each into its own fresh register bit
/// (initialised to `init`) with fresh syndrome bits.
pub fn push_n_full(
    c: &mut Circuit,
    code: &CodeSpec,
    block: &[usize],
    n_rep: usize,
    init: bool,
) -> Result<ClassicalRegister> {
    if n_rep.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "n_rep must be odd, got {n_rep}"
        )));
    }
    let bits = c.alloc(n_rep);
    for &b in &bits {
        c.set_input_label(b, init)?;
        push_n1(c, code, block, b)?;
    }
    Ok(ClassicalRegister::new(bits))
}

/// `out ^= majority(reg)` for registers of length 1 or 3.
pub(super) fn push_majority(c: &mut Circuit, reg: &[usize], out: usize) -> Result<()> {
    match reg {
        [r] => {
            c.push(Gate::cnot(), &[*r, out])?;
        }
        [a, b, d] => {
            // maj(a, b, d) = ab ⊕ ad ⊕ bd
            c.push(Gate::toffoli(), &[*a, *b, out])?;
            c.push(Gate::toffoli(), &[*a, *d, out])?;
            c.push(Gate::toffoli(), &[*b, *d, out])?;
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "majority fan-out over {} bits (supported: 1 or 3)",
                reg.len()
            )))
        }
    }
    Ok(())
}

/// Copies the majority of `reg` into `width` fresh bits, each computed
/// independently so a single fault corrupts at most one copy.
pub fn fan_out(
    c: &mut Circuit,
    reg: &ClassicalRegister,
    width: usize,
) -> Result<ClassicalRegister> {
    let out = c.alloc(width);
    for &o in &out {
        push_majority(c, &reg.bits, o)?;
    }
    Ok(ClassicalRegister::new(out))
}

/// 𝒩 on one block: qubits `[block]` followed by the register and ancillas.
pub fn n_full_program(code: &CodeSpec, n_rep: usize, init: bool) -> Result<GadgetProgram> {
    let mut c = Circuit::new(code.n);
    let block: Vec<usize> = (0..code.n).collect();
    let reg = push_n_full(&mut c, code, &block, n_rep, init)?;
    Ok(GadgetProgram {
        circuit: c,
        input_blocks: vec![block.clone()],
        data_blocks: vec![block],
        registers: vec![reg],
    })
}

/// Runs 𝒩 on the given block state with a register initialised to `init`.
pub fn n_full(
    code: &CodeSpec,
    block: &SimState,
    n_rep: usize,
    init: bool,
    opts: &RunOptions,
    faults: &FaultPattern,
) -> Result<GadgetReport> {
    n_full_program(code, n_rep, init)?.run(std::slice::from_ref(block), opts, faults)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::encoded_bit;
    use crate::simcore::backend::key_bit;

    #[test]
    fn contract_table() {
        assert_eq!(n_gate_contract(false, false), (false, false));
        assert_eq!(n_gate_contract(false, true), (false, true));
        assert_eq!(n_gate_contract(true, false), (true, true));
        assert_eq!(n_gate_contract(true, true), (true, false));
    }

    #[test]
    fn n1_on_codewords_with_one_flip() {
        for code in [CodeSpec::bitflip3(), CodeSpec::steane7()] {
            let c = build_n1(&code).unwrap();
            for logical in [false, true] {
                for flip in std::iter::once(None).chain((0..code.n).map(Some)) {
                    let mut bits = vec![false; c.num_qubits()];
                    let word = code.codewords(logical)[1 % code.codewords(logical).len()];
                    for p in 0..code.n {
                        bits[p] = (word >> p) & 1 == 1;
                    }
                    if let Some(p) = flip {
                        bits[p] ^= true;
                    }
                    let mut s =
                        SimState::from_bits(&bits, crate::simcore::Backend::Sparse).unwrap();
                    crate::simcore::run_circuit(&mut s, &c, &FaultPattern::none()).unwrap();
                    let (key, _) = s.entries()[0];
                    assert_eq!(key_bit(&key, code.n), logical, "{} {flip:?}", code.name);
                }
            }
        }
    }

    #[test]
    fn n_full_register_matches_logical() {
        let code = CodeSpec::steane7();
        let r = n_full(
            &code,
            &encoded_bit(&code, true),
            3,
            false,
            &RunOptions::exact(),
            &FaultPattern::none(),
        )
        .unwrap();
        for (key, _) in r.output_state.entries() {
            for &b in &r.classical_registers[0].bits {
                assert!(key_bit(&key, b));
            }
        }
    }
}
