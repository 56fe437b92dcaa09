//! Overlaps, reduced states and purities.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustc_hash::FxHashMap;

use super::backend::{key_bit, key_flip, BasisKey, QuantumState, SimState};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Subsystem dimension limit for explicit reduced density matrices.
pub const MAX_REDUCED_QUBITS: usize = 12;

/// Rank limit for the purity computation.
const MAX_RANK: usize = 4096;

/// ⟨a|b⟩.
pub fn inner(a: &SimState, b: &SimState) -> Result<C64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::SizeMismatch(a.num_qubits(), b.num_qubits()));
    }
    if let (SimState::Dense(x), SimState::Dense(y)) = (a, b) {
        return x.inner(y);
    }
    let (ea, eb) = (a.entries(), b.entries());
    if ea.len() <= eb.len() {
        let map: FxHashMap<BasisKey, C64> = ea.into_iter().collect();
        Ok(eb
            .iter()
            .filter_map(|(k, v)| map.get(k).map(|u| u.conj() * v))
            .sum())
    } else {
        let map: FxHashMap<BasisKey, C64> = eb.into_iter().collect();
        Ok(ea
            .iter()
            .filter_map(|(k, u)| map.get(k).map(|v| u.conj() * v))
            .sum())
    }
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &SimState, b: &SimState) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr())
}

pub fn fidelity_dense(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

fn check_subset(n: usize, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() || qubits.len() >= n {
        return Err(Error::InvalidSubset(format!(
            "{} of {n} qubits; need a proper nonempty subset",
            qubits.len()
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

/// Splits each basis key into (subsystem index, environment key) and groups
/// amplitudes by environment. The subsystem index has `qubits[0]` as its
/// most significant bit.
fn group_by_environment(state: &SimState, qubits: &[usize]) -> Vec<Vec<(u128, C64)>> {
    let k = qubits.len();
    let mut groups: FxHashMap<BasisKey, Vec<(u128, C64)>> = FxHashMap::default();
    for (key, amp) in state.entries() {
        let mut env = key;
        let mut sub = 0u128;
        for (j, &q) in qubits.iter().enumerate() {
            if key_bit(&key, q) {
                sub |= 1 << (k - 1 - j);
                key_flip(&mut env, q);
            }
        }
        groups.entry(env).or_default().push((sub, amp));
    }
    let mut out: Vec<_> = groups.into_iter().collect();
    out.sort_unstable_by_key(|a| a.0);
    out.into_iter().map(|(_, v)| v).collect()
}

/// Tr(ρ²) of the reduced state on `qubits`.
pub fn subsystem_purity(state: &SimState, qubits: &[usize]) -> Result<f64> {
    check_subset(state.num_qubits(), qubits)?;
    if qubits.len() > 128 {
        return Err(Error::Unsupported("subsystems above 128 qubits".into()));
    }
    // Orthonormal basis of the span of the environment-conditioned vectors;
    // ρ expressed in that basis is small whenever the state is close to a product.
    let mut basis: Vec<FxHashMap<u128, C64>> = Vec::new();
    let mut coords: Vec<Vec<C64>> = Vec::new();
    for v in group_by_environment(state, qubits) {
        let norm: f64 = v.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
        let mut residual: FxHashMap<u128, C64> = v.iter().copied().collect();
        let mut c = vec![C64::new(0.0, 0.0); basis.len()];
        for _pass in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let proj: C64 = residual
                    .iter()
                    .filter_map(|(s, a)| b.get(s).map(|x| x.conj() * a))
                    .sum();
                if proj.norm() == 0.0 {
                    continue;
                }
                c[i] += proj;
                for (s, x) in b {
                    *residual.entry(*s).or_default() -= proj * x;
                }
            }
        }
        let rnorm: f64 = residual.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if rnorm > 1e-10 * norm {
            if basis.len() >= MAX_RANK {
                return Err(Error::CapExceeded {
                    what: "reduced-state rank",
                    needed: basis.len() + 1,
                    cap: MAX_RANK,
                });
            }
            residual.retain(|_, a| a.norm() > 0.0);
            residual.values_mut().for_each(|a| *a /= rnorm);
            basis.push(residual);
            c.push(C64::new(rnorm, 0.0));
        }
        coords.push(c);
    }
    let r = basis.len();
    let mut rho = DMatrix::<C64>::zeros(r, r);
    for c in &coords {
        for i in 0..c.len() {
            for j in 0..c.len() {
                rho[(i, j)] += c[i] * c[j].conj();
            }
        }
    }
    let purity: f64 = rho.iter().map(|x| x.norm_sqr()).sum();
    Ok(purity)
}

/// ρ on `qubits` as an explicit matrix; index bit order follows `qubits`.
pub fn reduced_density_matrix(state: &SimState, qubits: &[usize]) -> Result<DMatrix<C64>> {
    check_subset(state.num_qubits() + 1, qubits)?;
    if qubits.len() > MAX_REDUCED_QUBITS {
        return Err(Error::CapExceeded {
            what: "reduced density matrix qubits",
            needed: qubits.len(),
            cap: MAX_REDUCED_QUBITS,
        });
    }
    let dim = 1usize << qubits.len();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for v in group_by_environment(state, qubits) {
        for &(s, a) in &v {
            for &(t, b) in &v {
                rho[(s as usize, t as usize)] += a * b.conj();
            }
        }
    }
    Ok(rho)
}

/// ⟨t|ρ|t⟩ where ρ is the reduced state on `qubits` and `target` is a pure
/// state on those qubits (its qubit j corresponds to `qubits[j]`).
pub fn reduced_fidelity(state: &SimState, qubits: &[usize], target: &SimState) -> Result<f64> {
    if target.num_qubits() != qubits.len() {
        return Err(Error::SizeMismatch(target.num_qubits(), qubits.len()));
    }
    if qubits.len() == state.num_qubits() {
        let mut order: Vec<usize> = qubits.to_vec();
        order.sort_unstable();
        if order.iter().enumerate().all(|(i, &q)| i == q) {
            let permuted = permute(target, qubits);
            return fidelity(state, &permuted);
        }
    }
    check_subset(state.num_qubits(), qubits)?;
    let k = qubits.len();
    let t: FxHashMap<u128, C64> = target
        .entries()
        .into_iter()
        .map(|(key, a)| {
            let sub = (0..k).fold(0u128, |acc, j| (acc << 1) | key_bit(&key, j) as u128);
            (sub, a)
        })
        .collect();
    Ok(group_by_environment(state, qubits)
        .iter()
        .map(|v| {
            v.iter()
                .filter_map(|(s, a)| t.get(s).map(|x| x.conj() * a))
                .sum::<C64>()
                .norm_sqr()
        })
        .sum())
}

/// Relabels a state so that its qubit j lands on `qubits[j]`.
fn permute(state: &SimState, qubits: &[usize]) -> SimState {
    let n = state.num_qubits();
    let mut sparse = super::sparse::SparseState::zero(n).expect("n ≥ 1");
    let entries: Vec<(BasisKey, C64)> = state
        .entries()
        .into_iter()
        .map(|(key, a)| {
            let mut out = [0u64; 4];
            for (j, &q) in qubits.iter().enumerate() {
                if key_bit(&key, j) {
                    key_flip(&mut out, q);
                }
            }
            (out, a)
        })
        .collect();
    sparse.set_entries(entries);
    SimState::Sparse(sparse)
}

/// ½‖ρ − σ‖₁ for Hermitian matrices of equal size.
pub fn trace_distance(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::SizeMismatch(rho.nrows(), sigma.nrows()));
    }
    let diff = rho - sigma;
    let eig = nalgebra::SymmetricEigen::new(diff);
    Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn matrix_purity(rho: &DMatrix<C64>) -> f64 {
    (rho * rho).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{Backend, Gate};

    fn bell() -> SimState {
        let mut s = SimState::zero(2, Backend::Dense).unwrap();
        s.apply_gate(&Gate::h(), &[0]).unwrap();
        s.apply_gate(&Gate::cnot(), &[0, 1]).unwrap();
        s
    }

    #[test]
    fn purity_examples() {
        let zero = SimState::zero(2, Backend::Dense).unwrap();
        assert!((subsystem_purity(&zero, &[0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((subsystem_purity(&bell(), &[0]).unwrap() - 0.5).abs() < 1e-12);
        let mut prod = SimState::from_bits(&[false, true], Backend::Sparse).unwrap();
        prod.apply_gate(&Gate::h(), &[0]).unwrap();
        assert!((subsystem_purity(&prod, &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purity_rejects_bad_subsets() {
        assert!(matches!(
            subsystem_purity(&bell(), &[]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            subsystem_purity(&bell(), &[0, 1]),
            Err(Error::InvalidSubset(_))
        ));
    }

    #[test]
    fn reduced_matrix_of_bell_is_maximally_mixed() {
        let rho = reduced_density_matrix(&bell(), &[1]).unwrap();
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);
        assert!((matrix_purity(&rho) - 0.5).abs() < 1e-12);
        let id = DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(trace_distance(&rho, &id).unwrap() < 1e-12);
    }

    #[test]
    fn reduced_fidelity_respects_qubit_order() {
        // |0⟩ on q0, |1⟩ on q1, |+⟩ on q2.
        let mut s = SimState::from_bits(&[false, true, false], Backend::Sparse).unwrap();
        s.apply_gate(&Gate::h(), &[2]).unwrap();
        let target = SimState::from_bits(&[true, false], Backend::Dense).unwrap();
        assert!((reduced_fidelity(&s, &[1, 0], &target).unwrap() - 1.0).abs() < 1e-12);
        assert!(reduced_fidelity(&s, &[0, 1], &target).unwrap() < 1e-12);
    }

    #[test]
    fn fidelity_across_backends() {
        let mut a = SimState::zero(1, Backend::Dense).unwrap();
        let b = SimState::zero(1, Backend::Sparse).unwrap();
        a.apply_gate(&Gate::h(), &[0]).unwrap();
        assert!((fidelity(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert!((inner(&a, &b).unwrap() - inner(&b, &a).unwrap().conj()).norm() < 1e-12);
    }
}
