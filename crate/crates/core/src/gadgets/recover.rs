//! Error recovery without measurement: syndromes are extracted into fresh
//! bits, voted on, decoded into per-position flags, and the flags apply the
//! correction as controlled gates.

use crate::codes::{ClassicalRegister, CodeSpec};
use crate::error::{Error, Result};
use crate::noise::FaultPattern;
use crate::simcore::{Circuit, Gate, SimState};

use super::n_gate::push_majority;
use super::{GadgetProgram, GadgetReport, RunOptions};

/// Syndrome column of each position: bit j is set when check j covers it.
fn columns(checks: &[Vec<usize>], n: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|p| checks.iter().map(|c| c.contains(&p)).collect())
        .collect()
}

/// Extracts every check `n_rep` times, takes the majority per check and
/// returns one fresh flag per position, set when the voted syndrome equals
/// that position's column. With `phase` the checks are X-type: the
/// syndrome bit is rotated by H around CNOTs into the data.
fn push_syndrome_flags(
    c: &mut Circuit,
    checks: &[Vec<usize>],
    block: &[usize],
    n_rep: usize,
    phase: bool,
) -> Result<(Vec<ClassicalRegister>, Vec<usize>)> {
    let mut raw = Vec::with_capacity(checks.len());
    let mut voted = Vec::with_capacity(checks.len());
    for check in checks {
        let bits = c.alloc(n_rep);
        for &s in &bits {
            if phase {
                c.push(Gate::h(), &[s])?;
                for &p in check {
                    c.push(Gate::cnot(), &[s, block[p]])?;
                }
                c.push(Gate::h(), &[s])?;
            } else {
                for &p in check {
                    c.push(Gate::cnot(), &[block[p], s])?;
                }
            }
        }
        let m = c.alloc_one();
        push_majority(c, &bits, m)?;
        raw.push(ClassicalRegister::new(bits));
        voted.push(m);
    }
    let mut flags = Vec::with_capacity(block.len());
    for col in columns(checks, block.len()) {
        let f = c.alloc_one();
        let negate: Vec<usize> = voted
            .iter()
            .zip(&col)
            .filter(|(_, &b)| !b)
            .map(|(&m, _)| m)
            .collect();
        for &m in &negate {
            c.push(Gate::x(), &[m])?;
        }
        match voted.as_slice() {
            [a, b] => {
                c.push(Gate::toffoli(), &[*a, *b, f])?;
            }
            [a, b, d] => {
                let w = c.alloc_one();
                c.push(Gate::toffoli(), &[*a, *b, w])?;
                c.push(Gate::toffoli(), &[w, *d, f])?;
            }
            other => return Err(Error::Unsupported(format!("{} checks", other.len()))),
        }
        for &m in &negate {
            c.push(Gate::x(), &[m])?;
        }
        flags.push(f);
    }
    Ok((raw, flags))
}

/// Appends recovery of `block`. Bit-flip errors are found with the Z-type
/// checks and undone with CNOT from each flag; when the code has X-type
/// checks, phase errors are handled the same way with CZ. Returns the raw
/// syndrome registers.
pub fn push_recover(
    c: &mut Circuit,
    code: &CodeSpec,
    block: &[usize],
    n_rep: usize,
) -> Result<Vec<ClassicalRegister>> {
    if n_rep.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "n_rep must be odd, got {n_rep}"
        )));
    }
    if block.len() != code.n {
        return Err(Error::SizeMismatch(block.len(), code.n));
    }
    let mut registers = Vec::new();
    for (checks, phase) in [(&code.z_checks, false), (&code.x_checks, true)] {
        if checks.is_empty() {
            continue;
        }
        let (raw, flags) = push_syndrome_flags(c, checks, block, n_rep, phase)?;
        let fix = if phase { Gate::cz() } else { Gate::cnot() };
        for (&f, &d) in flags.iter().zip(block) {
            c.push(fix.clone(), &[f, d])?;
        }
        registers.extend(raw);
    }
    Ok(registers)
}

/// Recovery on one block `[0, n)`.
pub fn recover_program(code: &CodeSpec, n_rep: usize) -> Result<GadgetProgram> {
    let block: Vec<usize> = (0..code.n).collect();
    let mut c = Circuit::new(code.n);
    let registers = push_recover(&mut c, code, &block, n_rep)?;
    Ok(GadgetProgram {
        circuit: c,
        input_blocks: vec![block.clone()],
        data_blocks: vec![block],
        registers,
    })
}

/// Runs recovery on a block state.
pub fn recover(
    code: &CodeSpec,
    data: &SimState,
    n_rep: usize,
    opts: &RunOptions,
    faults: &FaultPattern,
) -> Result<GadgetReport> {
    recover_program(code, n_rep)?.run(std::slice::from_ref(data), opts, faults)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::encoded;
    use crate::simcore::{Pauli, QuantumState};
    use num_complex::Complex64 as C64;

    #[test]
    fn corrects_single_bit_flips() {
        let code = CodeSpec::bitflip3();
        let target = encoded(&code, C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        for p in 0..3 {
            let mut s = target.clone();
            s.apply_gate(&Pauli::X.gate(), &[p]).unwrap();
            let r = recover(&code, &s, 3, &RunOptions::exact(), &FaultPattern::none()).unwrap();
            let f = r.data_fidelity(&target).unwrap();
            assert!(f > 1.0 - 1e-9, "{p}: {f}");
        }
    }
}
