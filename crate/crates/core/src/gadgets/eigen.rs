//! Special-state preparation by repeated eigenvalue estimation.
//!
//! Each round prepares a fresh cat state, applies Ũ bitwise controlled by the
//! cat qubits, rotates the cat with bitwise H and folds its parity into a
//! fresh bit. The parity is the eigenvalue bit of Ũ. A majority over rounds
//! then controls a bitwise flip that maps the −1 eigenvector onto the +1 one.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::codes::{encode_blocks, prepare_cat, ClassicalRegister, CodeName, CodeSpec};
use crate::error::{Error, Result};
use crate::noise::FaultPattern;
use crate::simcore::{controlled, inner, Circuit, Gate, QuantumState, SimState, StateVector};

use super::n_gate::fan_out;
use super::{GadgetProgram, GadgetReport, RunOptions};

/// One gate applied at every block position; `blocks` names the logical
/// blocks it spans (in target order).
#[derive(Debug, Clone)]
pub struct Factor {
    pub gate: Gate,
    pub blocks: Vec<usize>,
}

/// Ũ and the flip as bitwise factors over `num_blocks` logical blocks.
#[derive(Debug, Clone)]
pub struct EigenSpec {
    pub num_blocks: usize,
    pub u: Vec<Factor>,
    pub flip: Vec<Factor>,
}

/// Ũ for |ψ₀⟩: the bitwise realization of U = e^{iπ/4} X Z S. On the
/// codes with a transversal logical S built from bitwise S·Z, each qubit
/// receives e^{iπ/(4n)} X Z S†.
pub fn psi0_u_spec(code: &CodeSpec) -> EigenSpec {
    let xz = Gate::x().compose(&Gate::z(), "XZ").expect("same arity");
    let gate = match code.name {
        CodeName::Unencoded1 => xz
            .compose(&Gate::s(), "XZS")
            .expect("same arity")
            .with_phase(PI / 4.0, "U"),
        _ => xz
            .compose(&Gate::sdg(), "XZSdg")
            .expect("same arity")
            .with_phase(PI / (4.0 * code.n as f64), "U~"),
    };
    EigenSpec {
        num_blocks: 1,
        u: vec![Factor {
            gate,
            blocks: vec![0],
        }],
        flip: vec![Factor {
            gate: Gate::z(),
            blocks: vec![0],
        }],
    }
}

/// Ũ = Λ(Z) ⊗ Z on three blocks, flip = I ⊗ I ⊗ X.
pub fn and_u_spec() -> EigenSpec {
    EigenSpec {
        num_blocks: 3,
        u: vec![
            Factor {
                gate: Gate::cz(),
                blocks: vec![0, 1],
            },
            Factor {
                gate: Gate::z(),
                blocks: vec![2],
            },
        ],
        flip: vec![Factor {
            gate: Gate::x(),
            blocks: vec![2],
        }],
    }
}

/// Applies factors bitwise on the given block layout.
pub fn apply_factors<S: QuantumState>(
    state: &mut S,
    factors: &[Factor],
    blocks: &[Vec<usize>],
) -> Result<()> {
    let n = blocks[0].len();
    for i in 0..n {
        for f in factors {
            let targets: Vec<usize> = f.blocks.iter().map(|&b| blocks[b][i]).collect();
            state.apply_gate(&f.gate, &targets)?;
        }
    }
    Ok(())
}

/// Checks Ũ|φ₀⟩ = |φ₀⟩ and Ũ|φ₁⟩ = −|φ₁⟩ within 1e-10.
pub fn check_eigen(
    spec: &EigenSpec,
    code: &CodeSpec,
    phi0: &SimState,
    phi1: &SimState,
) -> Result<()> {
    let blocks: Vec<Vec<usize>> = (0..spec.num_blocks)
        .map(|b| (b * code.n..(b + 1) * code.n).collect())
        .collect();
    for (phi, want) in [(phi0, 1.0), (phi1, -1.0)] {
        let mut image = phi.clone();
        apply_factors(&mut image, &spec.u, &blocks)?;
        let overlap = inner(phi, &image)?;
        if (overlap - C64::new(want, 0.0)).norm() > 1e-10 {
            return Err(Error::EigenPrecondition(format!(
                "expected eigenvalue {want}, overlap is {overlap}"
            )));
        }
    }
    Ok(())
}

/// Appends the preparation on `blocks`; returns the parity register.
pub fn push_eigen_prep(
    c: &mut Circuit,
    code: &CodeSpec,
    spec: &EigenSpec,
    blocks: &[Vec<usize>],
    n_rep: usize,
) -> Result<ClassicalRegister> {
    let n = code.n;
    let mut parities = Vec::with_capacity(n_rep);
    for round in 0..n_rep {
        // Rounds run one after another so that at most one cat is live.
        if round > 0 {
            c.barrier();
        }
        let cat = c.alloc(n);
        if n >= 2 {
            c.append(&prepare_cat(n)?, &cat)?;
        } else {
            c.push(Gate::h(), &[cat[0]])?;
        }
        for i in 0..n {
            for f in &spec.u {
                let mut targets = vec![cat[i]];
                targets.extend(f.blocks.iter().map(|&b| blocks[b][i]));
                c.push(controlled(&f.gate)?, &targets)?;
            }
        }
        for &q in &cat {
            c.push(Gate::h(), &[q])?;
        }
        let p = c.alloc_one();
        for &q in &cat {
            c.push(Gate::cnot(), &[q, p])?;
        }
        let mut spent = cat.clone();
        spent.push(p);
        c.mark_collapse(&spent)?;
        parities.push(p);
    }
    let reg = ClassicalRegister::new(parities);
    let m = fan_out(c, &reg, n)?;
    c.mark_collapse(&m.bits)?;
    for i in 0..n {
        for f in &spec.flip {
            let mut targets = vec![m.bits[i]];
            targets.extend(f.blocks.iter().map(|&b| blocks[b][i]));
            c.push(controlled(&f.gate)?, &targets)?;
        }
    }
    Ok(reg)
}

pub fn eigen_program(code: &CodeSpec, spec: &EigenSpec, n_rep: usize) -> Result<GadgetProgram> {
    let mut c = Circuit::new(spec.num_blocks * code.n);
    let blocks: Vec<Vec<usize>> = (0..spec.num_blocks)
        .map(|b| (b * code.n..(b + 1) * code.n).collect())
        .collect();
    let reg = push_eigen_prep(&mut c, code, spec, &blocks, n_rep)?;
    Ok(GadgetProgram {
        circuit: c,
        input_blocks: vec![(0..spec.num_blocks * code.n).collect()],
        data_blocks: blocks,
        registers: vec![reg],
    })
}

/// Drives `start` (over `spec.num_blocks` blocks) to the +1 eigenvector.
pub fn prepare_eigenvector(
    code: &CodeSpec,
    spec: &EigenSpec,
    start: &SimState,
    n_rep: usize,
    opts: &RunOptions,
    faults: &FaultPattern,
) -> Result<GadgetReport> {
    eigen_program(code, spec, n_rep)?.run(std::slice::from_ref(start), opts, faults)
}

fn logical(code: &CodeSpec, amps: Vec<C64>) -> Result<SimState> {
    let v = StateVector::from_unnormalized(amps)?;
    Ok(SimState::Sparse(encode_blocks(code, &v)?))
}

/// (|0⟩_L + e^{iπ/4}|1⟩_L)/√2.
pub fn psi0_target(code: &CodeSpec) -> Result<SimState> {
    logical(
        code,
        vec![C64::new(1.0, 0.0), C64::from_polar(1.0, PI / 4.0)],
    )
}

/// (|0⟩_L − e^{iπ/4}|1⟩_L)/√2.
pub fn psi1_target(code: &CodeSpec) -> Result<SimState> {
    logical(
        code,
        vec![C64::new(1.0, 0.0), -C64::from_polar(1.0, PI / 4.0)],
    )
}

/// ½(|000⟩_L + |010⟩_L + |100⟩_L + |111⟩_L).
pub fn and_target(code: &CodeSpec) -> Result<SimState> {
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    for i in [0b000, 0b010, 0b100, 0b111] {
        amps[i] = C64::new(1.0, 0.0);
    }
    logical(code, amps)
}

/// The flipped |AND⟩: ½(|001⟩_L + |011⟩_L + |101⟩_L + |110⟩_L).
pub fn and_bar_target(code: &CodeSpec) -> Result<SimState> {
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    for i in [0b001, 0b011, 0b101, 0b110] {
        amps[i] = C64::new(1.0, 0.0);
    }
    logical(code, amps)
}

/// |ψ₀⟩ from the start |+⟩_L.
pub fn prepare_psi0(code: &CodeSpec, n_rep: usize, opts: &RunOptions) -> Result<GadgetReport> {
    let start = logical(code, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])?;
    prepare_eigenvector(
        code,
        &psi0_u_spec(code),
        &start,
        n_rep,
        opts,
        &FaultPattern::none(),
    )
}

/// |AND⟩ from the start |+⟩_L|+⟩_L|+⟩_L.
pub fn prepare_and_state(code: &CodeSpec, n_rep: usize, opts: &RunOptions) -> Result<GadgetReport> {
    let start = logical(code, vec![C64::new(1.0, 0.0); 8])?;
    prepare_eigenvector(
        code,
        &and_u_spec(),
        &start,
        n_rep,
        opts,
        &FaultPattern::none(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_identities() {
        for code in [
            CodeSpec::unencoded1(),
            CodeSpec::bitflip3(),
            CodeSpec::steane7(),
        ] {
            check_eigen(
                &psi0_u_spec(&code),
                &code,
                &psi0_target(&code).unwrap(),
                &psi1_target(&code).unwrap(),
            )
            .unwrap();
            check_eigen(
                &and_u_spec(),
                &code,
                &and_target(&code).unwrap(),
                &and_bar_target(&code).unwrap(),
            )
            .unwrap();
        }
    }

    #[test]
    fn swapped_eigenvectors_are_rejected() {
        let code = CodeSpec::bitflip3();
        let err = check_eigen(
            &psi0_u_spec(&code),
            &code,
            &psi1_target(&code).unwrap(),
            &psi0_target(&code).unwrap(),
        );
        assert!(matches!(err, Err(Error::EigenPrecondition(_))));
    }

    #[test]
    fn psi0_unencoded_and_bitflip() {
        for code in [CodeSpec::unencoded1(), CodeSpec::bitflip3()] {
            let r = prepare_psi0(&code, 3, &RunOptions::exact()).unwrap();
            let f = r.data_fidelity(&psi0_target(&code).unwrap()).unwrap();
            assert!(f > 1.0 - 1e-9, "{} {f}", code.name);
        }
    }
}
