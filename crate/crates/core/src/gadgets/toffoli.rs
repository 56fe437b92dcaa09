//! Logical Toffoli from an |AND⟩ ancilla, with no measurement.

use crate::codes::CodeSpec;
use crate::error::Result;
use crate::noise::FaultPattern;
use crate::simcore::{Circuit, Gate, SimState};

use super::eigen::{and_u_spec, push_eigen_prep};
use super::n_gate::{fan_out, push_n_full};
use super::{bitwise, encoded, push_logical_h, GadgetProgram, GadgetReport, RunOptions};

/// Qubits `[x][y][z][a1 a2 a3]` (blocks of n), then fresh ancillas. Outputs
/// are the blocks a1, a2, a3 holding x, y and z ⊕ xy.
///
/// After |AND⟩ = Σ|a, b, ab⟩ is prepared, x and y are combined with a1 and
/// a2, z is folded into a3 and rotated by H̃, and each of the three consumed
/// blocks is copied by 𝒩 into a register. The register fan-outs then drive
/// bitwise controlled Pauli, CNOT and CZ fixups on the ancilla blocks.
pub fn toffoli_gadget_program(code: &CodeSpec, n_rep: usize) -> Result<GadgetProgram> {
    let n = code.n;
    let block = |b: usize| -> Vec<usize> { (b * n..(b + 1) * n).collect() };
    let (x, y, z) = (block(0), block(1), block(2));
    let (a1, a2, a3) = (block(3), block(4), block(5));
    let mut c = Circuit::new(6 * n);
    let and_reg = push_eigen_prep(
        &mut c,
        code,
        &and_u_spec(),
        &[a1.clone(), a2.clone(), a3.clone()],
        n_rep,
    )?;

    let copy = |c: &mut Circuit, blk: &[usize]| -> Result<_> {
        let reg = push_n_full(c, code, blk, n_rep, false)?;
        let m = fan_out(c, &reg, n)?;
        let mut spent = blk.to_vec();
        spent.extend(&reg.bits);
        spent.extend(&m.bits);
        c.mark_collapse(&spent)?;
        Ok((reg, m))
    };

    // The three data blocks are consumed one at a time.
    c.barrier();
    bitwise(&mut c, &Gate::cnot(), &[&a1, &x])?;
    let (rx, mx) = copy(&mut c, &x)?;
    c.barrier();
    bitwise(&mut c, &Gate::cnot(), &[&a2, &y])?;
    let (ry, my) = copy(&mut c, &y)?;
    c.barrier();
    bitwise(&mut c, &Gate::cnot(), &[&z, &a3])?;
    push_logical_h(&mut c, code, &z)?;
    let (rz, mz) = copy(&mut c, &z)?;

    bitwise(&mut c, &Gate::cz(), &[&mz.bits, &a3])?;
    bitwise(&mut c, &Gate::ccz(), &[&mz.bits, &a1, &a2])?;
    bitwise(&mut c, &Gate::toffoli(), &[&a1, &my.bits, &a3])?;
    bitwise(&mut c, &Gate::cnot(), &[&my.bits, &a2])?;
    bitwise(&mut c, &Gate::toffoli(), &[&a2, &mx.bits, &a3])?;
    bitwise(&mut c, &Gate::cnot(), &[&mx.bits, &a1])?;

    Ok(GadgetProgram {
        circuit: c,
        input_blocks: vec![x, y, z, (3 * n..6 * n).collect()],
        data_blocks: vec![a1, a2, a3],
        registers: vec![and_reg, rx, mx, ry, my, rz, mz],
    })
}

/// Applies the gadget to three block states (each n qubits) or, if `xyz`
/// has one entry, to a joint state over all three blocks.
pub fn toffoli_gadget(
    code: &CodeSpec,
    xyz: &[SimState],
    n_rep: usize,
    opts: &RunOptions,
    faults: &FaultPattern,
) -> Result<GadgetReport> {
    let mut program = toffoli_gadget_program(code, n_rep)?;
    let one = num_complex::Complex64::new(1.0, 0.0);
    let plus = encoded(code, one, one)?;
    let start = SimState::product(
        &[plus.clone(), plus.clone(), plus],
        crate::simcore::Backend::Sparse,
    )?;
    let mut inputs: Vec<SimState> = xyz.to_vec();
    if xyz.len() == 1 {
        let n = code.n;
        program.input_blocks = vec![(0..3 * n).collect(), (3 * n..6 * n).collect()];
    }
    inputs.push(start);
    program.run(&inputs, opts, faults)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::encoded_bit;

    #[test]
    fn unencoded_truth_table() {
        let code = CodeSpec::unencoded1();
        for idx in 0..8usize {
            let bits = [(idx >> 2) & 1 == 1, (idx >> 1) & 1 == 1, idx & 1 == 1];
            let inputs: Vec<SimState> = bits.iter().map(|&b| encoded_bit(&code, b)).collect();
            let r = toffoli_gadget(
                &code,
                &inputs,
                3,
                &RunOptions::exact(),
                &FaultPattern::none(),
            )
            .unwrap();
            let out = [bits[0], bits[1], bits[2] ^ (bits[0] & bits[1])];
            let target: Vec<SimState> = out.iter().map(|&b| encoded_bit(&code, b)).collect();
            let target = SimState::product(&target, crate::simcore::Backend::Sparse).unwrap();
            let f = r.data_fidelity(&target).unwrap();
            assert!(f > 1.0 - 1e-9, "{idx:03b}: {f}");
        }
    }
}
