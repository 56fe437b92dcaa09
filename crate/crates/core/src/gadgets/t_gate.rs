//! Logical σ_z^{1/4} from a |ψ₀⟩ ancilla, with no measurement.

use crate::codes::{CodeName, CodeSpec};
use crate::error::Result;
use crate::noise::FaultPattern;
use crate::simcore::{controlled, Circuit, Gate, SimState};

use super::eigen::{psi0_u_spec, push_eigen_prep};
use super::n_gate::{fan_out, push_n_full};
use super::{bitwise, encoded, GadgetProgram, GadgetReport, RunOptions};

/// Qubits `[data (n)] [ancilla start (n)]`, then fresh ancillas. The ancilla
/// block is driven to |ψ₀⟩, receives a bitwise CNOT from the data, and is
/// copied by 𝒩 into a register whose fan-out controls a bitwise logical S
/// on the data.
pub fn t_gadget_program(code: &CodeSpec, n_rep: usize) -> Result<GadgetProgram> {
    let n = code.n;
    let data: Vec<usize> = (0..n).collect();
    let anc: Vec<usize> = (n..2 * n).collect();
    let mut c = Circuit::new(2 * n);
    let parity = push_eigen_prep(&mut c, code, &psi0_u_spec(code), std::slice::from_ref(&anc), n_rep)?;
    bitwise(&mut c, &Gate::cnot(), &[&data, &anc])?;
    let reg = push_n_full(&mut c, code, &anc, n_rep, false)?;
    let m = fan_out(&mut c, &reg, n)?;
    let mut spent = anc.clone();
    spent.extend(&reg.bits);
    spent.extend(&m.bits);
    c.mark_collapse(&spent)?;
    // Logical S: plain S without encoding, bitwise S·Z = S† per qubit otherwise.
    let s = match code.name {
        CodeName::Unencoded1 => Gate::s(),
        _ => Gate::sdg(),
    };
    bitwise(&mut c, &controlled(&s)?, &[&m.bits, &data])?;
    Ok(GadgetProgram {
        circuit: c,
        input_blocks: vec![data.clone(), anc],
        data_blocks: vec![data],
        registers: vec![parity, reg, m],
    })
}

/// Applies the gadget to a data block state.
pub fn t_gadget(
    code: &CodeSpec,
    data: &SimState,
    n_rep: usize,
    opts: &RunOptions,
    faults: &FaultPattern,
) -> Result<GadgetReport> {
    let one = num_complex::Complex64::new(1.0, 0.0);
    let start = encoded(code, one, one)?;
    t_gadget_program(code, n_rep)?.run(&[data.clone(), start], opts, faults)
}
