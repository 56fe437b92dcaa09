use crate::error::{Error, Result};
use crate::noise::FaultPattern;
use crate::simcore::{run_circuit, Circuit, ClassicalOp, Gate, SparseState};

/// Largest result + context width whose reversibility is checked exhaustively.
const CHECK_BITS: usize = 16;

/// A reversible circuit that sets an accept flag from a result register.
///
/// Qubit layout: `[result][flag][context][workspace]`. The flag starts at 0
/// and the workspace must be returned to 0 on every basis input.
#[derive(Debug, Clone)]
pub struct Verifier {
    pub circuit: Circuit,
    pub result_width: usize,
    pub context_width: usize,
}

impl Verifier {
    pub fn new(circuit: Circuit, result_width: usize, context_width: usize) -> Result<Verifier> {
        if result_width == 0 || circuit.num_qubits() < result_width + 1 + context_width {
            return Err(Error::InvalidParameter(format!(
                "verifier on {} qubits cannot hold result {result_width} + flag + context {context_width}",
                circuit.num_qubits()
            )));
        }
        Ok(Verifier {
            circuit,
            result_width,
            context_width,
        })
    }

    /// Verifier made of one classical operation: flag ^= accept(result, context).
    pub fn classical<F>(result_width: usize, context_width: usize, accept: F) -> Result<Verifier>
    where
        F: Fn(u64, u64) -> bool + Send + Sync + 'static,
    {
        let width = result_width + 1 + context_width;
        let op = ClassicalOp::new("verify", width, move |s| {
            let context = s & ((1u64 << context_width) - 1);
            let result = s >> (context_width + 1);
            if accept(result, context) {
                s ^ (1 << context_width)
            } else {
                s
            }
        })?;
        let mut c = Circuit::new(width);
        c.push_op(op, &(0..width).collect::<Vec<_>>())?;
        Verifier::new(c, result_width, context_width)
    }

    pub fn accept_always(result_width: usize) -> Result<Verifier> {
        let mut c = Circuit::new(result_width + 1);
        c.push(Gate::x(), &[result_width])?;
        Verifier::new(c, result_width, 0)
    }

    pub fn reject_always(result_width: usize) -> Result<Verifier> {
        Verifier::new(Circuit::new(result_width + 1), result_width, 0)
    }

    pub fn workspace_width(&self) -> usize {
        self.circuit.num_qubits() - self.result_width - 1 - self.context_width
    }

    /// Runs the verifier on every basis input of result and context and
    /// checks that it is a classical map that leaves them and the workspace
    /// unchanged. Skipped above 16 input bits.
    pub fn check_reversible(&self) -> Result<()> {
        let (rw, cw) = (self.result_width, self.context_width);
        if rw + cw > CHECK_BITS {
            return Ok(());
        }
        let n = self.circuit.num_qubits();
        for input in 0..1u64 << (rw + cw) {
            let mut bits = vec![false; n];
            for i in 0..rw {
                bits[i] = (input >> (cw + rw - 1 - i)) & 1 == 1;
            }
            for i in 0..cw {
                bits[rw + 1 + i] = (input >> (cw - 1 - i)) & 1 == 1;
            }
            let mut s = SparseState::from_bits(&bits)?;
            run_circuit(&mut s, &self.circuit, &FaultPattern::none())?;
            let fail = || Error::NotReversible(format!("basis input {input:#b}"));
            let [(key, amp)] = s.entries() else {
                return Err(fail());
            };
            if (amp.norm_sqr() - 1.0).abs() > 1e-9 {
                return Err(fail());
            }
            let out = |q: usize| crate::simcore::backend::key_bit(key, q);
            if (0..n).any(|q| q != rw && out(q) != bits[q]) {
                return Err(fail());
            }
        }
        Ok(())
    }
}

/// A computation whose result register is replaced by unbiased random bits
/// in every computer where the verifier rejects it.
#[derive(Debug, Clone)]
pub struct NpProgram {
    pub circuit: Circuit,
    pub result: Vec<usize>,
    /// Set exactly when the result was rejected.
    pub flag: usize,
    pub random: Vec<usize>,
}

/// Appends to `compute`: the verifier on `result` (with `context` as extra
/// read-only input), a register of `|+⟩` qubits, and a swap of that register
/// with the result controlled on rejection.
pub fn np_function_wrapper(
    compute: &Circuit,
    result: &[usize],
    context: &[usize],
    verifier: &Verifier,
) -> Result<NpProgram> {
    if result.len() != verifier.result_width {
        return Err(Error::SizeMismatch(result.len(), verifier.result_width));
    }
    if context.len() != verifier.context_width {
        return Err(Error::SizeMismatch(context.len(), verifier.context_width));
    }
    verifier.check_reversible()?;
    let mut c = Circuit::with_labels(compute.input_labels());
    c.append(compute, &(0..compute.num_qubits()).collect::<Vec<_>>())?;
    let flag = c.alloc_one();
    let workspace = c.alloc(verifier.workspace_width());
    let random = c.alloc(result.len());
    let map: Vec<usize> = result
        .iter()
        .copied()
        .chain([flag])
        .chain(context.iter().copied())
        .chain(workspace)
        .collect();
    c.append(&verifier.circuit, &map)?;
    for &q in &random {
        c.push(Gate::h(), &[q])?;
    }
    c.push(Gate::x(), &[flag])?;
    for (&r, &s) in result.iter().zip(&random) {
        c.push(Gate::fredkin(), &[flag, r, s])?;
    }
    Ok(NpProgram {
        circuit: c,
        result: result.to_vec(),
        flag,
        random,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::run_exact;
    use crate::simcore::Backend;

    fn labelled(value: u64, width: usize) -> Circuit {
        let bits: Vec<bool> = (0..width)
            .map(|i| (value >> (width - 1 - i)) & 1 == 1)
            .collect();
        Circuit::with_labels(&bits)
    }

    #[test]
    fn accept_and_reject_always() {
        let c = labelled(0b101, 3);
        let acc =
            np_function_wrapper(&c, &[0, 1, 2], &[], &Verifier::accept_always(3).unwrap()).unwrap();
        let r = run_exact(&acc.circuit, Backend::Dense).unwrap();
        for (m, want) in r.means.iter().zip([-1.0, 1.0, -1.0]) {
            assert!((m - want).abs() < 1e-12, "{:?}", r.means);
        }
        let rej =
            np_function_wrapper(&c, &[0, 1, 2], &[], &Verifier::reject_always(3).unwrap()).unwrap();
        let r = run_exact(&rej.circuit, Backend::Dense).unwrap();
        assert!(r.means[..3].iter().all(|m| m.abs() < 1e-12));
    }

    #[test]
    fn dirty_workspace_is_rejected() {
        let mut c = Circuit::new(3);
        c.push(Gate::cnot(), &[0, 2]).unwrap();
        let v = Verifier::new(c, 1, 0).unwrap();
        assert!(matches!(v.check_reversible(), Err(Error::NotReversible(_))));
    }

    #[test]
    fn modified_result_is_rejected() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(), &[0]).unwrap();
        let v = Verifier::new(c, 1, 0).unwrap();
        assert!(v.check_reversible().is_err());
    }
}
