//! Gates as small unitary matrices plus a precomputed application form.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNITARY_TOL: f64 = 1e-10;
pub const MAX_ARITY: usize = 3;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit Pauli error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
    Y,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Z, Pauli::Y];

    pub fn flips_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn flips_phase(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn gate(self) -> Gate {
        match self {
            Pauli::X => Gate::x(),
            Pauli::Y => Gate::y(),
            Pauli::Z => Gate::z(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Z => "Z",
            Pauli::Y => "Y",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    /// σ_z^{1/2}
    S,
    Sdg,
    /// σ_z^{1/4}
    T,
    Tdg,
    /// √X
    V,
    Vdg,
    Cnot,
    Cz,
    Swap,
    Toffoli,
    Ccz,
    Fredkin,
    Phase(f64),
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Controlled(Box<GateKind>),
    Custom(String),
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::X => f.write_str("X"),
            GateKind::Y => f.write_str("Y"),
            GateKind::Z => f.write_str("Z"),
            GateKind::H => f.write_str("H"),
            GateKind::S => f.write_str("S"),
            GateKind::Sdg => f.write_str("SDG"),
            GateKind::T => f.write_str("T"),
            GateKind::Tdg => f.write_str("TDG"),
            GateKind::V => f.write_str("V"),
            GateKind::Vdg => f.write_str("VDG"),
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Cz => f.write_str("CZ"),
            GateKind::Swap => f.write_str("SWAP"),
            GateKind::Toffoli => f.write_str("TOFFOLI"),
            GateKind::Ccz => f.write_str("CCZ"),
            GateKind::Fredkin => f.write_str("CSWAP"),
            GateKind::Phase(t) => write!(f, "PHASE({t})"),
            GateKind::Rx(t) => write!(f, "RX({t})"),
            GateKind::Ry(t) => write!(f, "RY({t})"),
            GateKind::Rz(t) => write!(f, "RZ({t})"),
            GateKind::Controlled(k) => write!(f, "C-{k}"),
            GateKind::Custom(name) => f.write_str(name),
        }
    }
}

/// How a gate acts on the 2^arity amplitudes of one block.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum GateForm {
    Diagonal(Vec<C64>),
    /// `out[perm[s]] = phase[s] * in[s]`
    Permutation {
        perm: Vec<usize>,
        phase: Vec<C64>,
    },
    General,
}

/// A unitary on at most three qubits. Sub-index convention: the first target
/// is the most significant bit of the matrix row/column index.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    arity: usize,
    matrix: Vec<C64>,
    form: GateForm,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    /// Builds a gate from a row-major matrix, checking unitarity.
    pub fn unitary(kind: GateKind, arity: usize, matrix: Vec<C64>) -> Result<Gate> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOverflow(arity));
        }
        let dim = 1 << arity;
        if matrix.len() != dim * dim {
            return Err(Error::SizeMismatch(matrix.len(), dim * dim));
        }
        if !is_unitary(&matrix, dim, UNITARY_TOL) {
            return Err(Error::NonUnitary(kind.to_string()));
        }
        let form = classify(&matrix, dim);
        Ok(Gate {
            kind,
            arity,
            matrix,
            form,
        })
    }

    fn fixed(kind: GateKind, arity: usize, matrix: Vec<C64>) -> Gate {
        Gate::unitary(kind, arity, matrix).expect("built-in gate is unitary")
    }

    pub fn x() -> Gate {
        Gate::fixed(GateKind::X, 1, vec![ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Gate {
        Gate::fixed(GateKind::Y, 1, vec![ZERO, -I, I, ZERO])
    }

    pub fn z() -> Gate {
        Gate::fixed(GateKind::Z, 1, vec![ONE, ZERO, ZERO, -ONE])
    }

    pub fn h() -> Gate {
        let h = c(FRAC_1_SQRT_2, 0.0);
        Gate::fixed(GateKind::H, 1, vec![h, h, h, -h])
    }

    pub fn s() -> Gate {
        Gate::fixed(GateKind::S, 1, vec![ONE, ZERO, ZERO, I])
    }

    pub fn sdg() -> Gate {
        Gate::fixed(GateKind::Sdg, 1, vec![ONE, ZERO, ZERO, -I])
    }

    pub fn t() -> Gate {
        Gate::fixed(
            GateKind::T,
            1,
            vec![ONE, ZERO, ZERO, C64::from_polar(1.0, PI / 4.0)],
        )
    }

    pub fn tdg() -> Gate {
        Gate::fixed(
            GateKind::Tdg,
            1,
            vec![ONE, ZERO, ZERO, C64::from_polar(1.0, -PI / 4.0)],
        )
    }

    pub fn v() -> Gate {
        let a = c(0.5, 0.5);
        let b = c(0.5, -0.5);
        Gate::fixed(GateKind::V, 1, vec![a, b, b, a])
    }

    pub fn vdg() -> Gate {
        let a = c(0.5, -0.5);
        let b = c(0.5, 0.5);
        Gate::fixed(GateKind::Vdg, 1, vec![a, b, b, a])
    }

    pub fn phase(theta: f64) -> Gate {
        Gate::fixed(
            GateKind::Phase(theta),
            1,
            vec![ONE, ZERO, ZERO, C64::from_polar(1.0, theta)],
        )
    }

    pub fn rx(theta: f64) -> Gate {
        let (s, co) = (theta / 2.0).sin_cos();
        Gate::fixed(
            GateKind::Rx(theta),
            1,
            vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)],
        )
    }

    pub fn ry(theta: f64) -> Gate {
        let (s, co) = (theta / 2.0).sin_cos();
        Gate::fixed(
            GateKind::Ry(theta),
            1,
            vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)],
        )
    }

    pub fn rz(theta: f64) -> Gate {
        Gate::fixed(
            GateKind::Rz(theta),
            1,
            vec![
                C64::from_polar(1.0, -theta / 2.0),
                ZERO,
                ZERO,
                C64::from_polar(1.0, theta / 2.0),
            ],
        )
    }

    pub fn cnot() -> Gate {
        controlled(&Gate::x()).expect("arity 2")
    }

    pub fn cz() -> Gate {
        controlled(&Gate::z()).expect("arity 2")
    }

    pub fn swap() -> Gate {
        let mut m = vec![ZERO; 16];
        for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[r * 4 + col] = ONE;
        }
        Gate::fixed(GateKind::Swap, 2, m)
    }

    pub fn toffoli() -> Gate {
        controlled(&Gate::cnot()).expect("arity 3")
    }

    pub fn ccz() -> Gate {
        controlled(&Gate::cz()).expect("arity 3")
    }

    pub fn fredkin() -> Gate {
        controlled(&Gate::swap()).expect("arity 3")
    }

    /// Scales the gate by a global phase, keeping it distinct for control.
    pub fn with_phase(&self, theta: f64, name: &str) -> Gate {
        let f = C64::from_polar(1.0, theta);
        let matrix = self.matrix.iter().map(|&a| a * f).collect();
        Gate::fixed(GateKind::Custom(name.to_string()), self.arity, matrix)
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Gate, name: &str) -> Result<Gate> {
        if self.arity != other.arity {
            return Err(Error::SizeMismatch(self.arity, other.arity));
        }
        let dim = self.dim();
        let mut m = vec![ZERO; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                m[r * dim + col] = (0..dim)
                    .map(|k| self.matrix[r * dim + k] * other.matrix[k * dim + col])
                    .sum();
            }
        }
        Gate::unitary(GateKind::Custom(name.to_string()), self.arity, m)
    }

    pub fn adjoint(&self, name: &str) -> Gate {
        let dim = self.dim();
        let mut m = vec![ZERO; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                m[col * dim + r] = self.matrix[r * dim + col].conj();
            }
        }
        Gate::fixed(GateKind::Custom(name.to_string()), self.arity, m)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    /// Row-major matrix.
    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[row * self.dim() + col]
    }

    pub(crate) fn form(&self) -> &GateForm {
        &self.form
    }

    /// True when the gate maps computational basis states to basis states.
    pub fn is_classical(&self) -> bool {
        match &self.form {
            GateForm::Permutation { phase, .. } => phase.iter().all(|p| (*p - ONE).norm() < 1e-12),
            GateForm::Diagonal(d) => d.iter().all(|p| (*p - ONE).norm() < 1e-12),
            GateForm::General => false,
        }
    }

    pub fn approx_eq(&self, other: &Gate, tol: f64) -> bool {
        self.arity == other.arity
            && self
                .matrix
                .iter()
                .zip(&other.matrix)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Λ(U): block-diagonal with identity on the control-0 branch. The control
/// becomes the first (most significant) target.
pub fn controlled(gate: &Gate) -> Result<Gate> {
    let arity = gate.arity + 1;
    if arity > MAX_ARITY {
        return Err(Error::ArityOverflow(arity));
    }
    let inner = gate.dim();
    let dim = inner * 2;
    let mut m = vec![ZERO; dim * dim];
    for k in 0..inner {
        m[k * dim + k] = ONE;
    }
    for r in 0..inner {
        for col in 0..inner {
            m[(inner + r) * dim + inner + col] = gate.matrix[r * inner + col];
        }
    }
    let kind = match gate.kind {
        GateKind::X => GateKind::Cnot,
        GateKind::Z => GateKind::Cz,
        GateKind::Cnot => GateKind::Toffoli,
        GateKind::Cz => GateKind::Ccz,
        GateKind::Swap => GateKind::Fredkin,
        ref k => GateKind::Controlled(Box::new(k.clone())),
    };
    Gate::unitary(kind, arity, m)
}

fn is_unitary(m: &[C64], dim: usize, tol: f64) -> bool {
    for r in 0..dim {
        for s in 0..dim {
            let dot: C64 = (0..dim)
                .map(|k| m[r * dim + k] * m[s * dim + k].conj())
                .sum();
            let want = if r == s { ONE } else { ZERO };
            if (dot - want).norm() > tol {
                return false;
            }
        }
    }
    true
}

fn classify(m: &[C64], dim: usize) -> GateForm {
    let tiny = 1e-14;
    let diagonal = (0..dim).all(|r| (0..dim).all(|col| r == col || m[r * dim + col].norm() < tiny));
    if diagonal {
        return GateForm::Diagonal((0..dim).map(|k| m[k * dim + k]).collect());
    }
    let mut perm = vec![0; dim];
    let mut phase = vec![ZERO; dim];
    for col in 0..dim {
        let nonzero: Vec<usize> = (0..dim)
            .filter(|&r| m[r * dim + col].norm() >= tiny)
            .collect();
        if nonzero.len() != 1 {
            return GateForm::General;
        }
        perm[col] = nonzero[0];
        phase[col] = m[nonzero[0] * dim + col];
    }
    GateForm::Permutation { perm, phase }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
        let mut out = vec![ZERO; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                out[r * dim + col] = (0..dim).map(|k| a[r * dim + k] * b[k * dim + col]).sum();
            }
        }
        out
    }

    #[test]
    fn builtins_are_unitary_and_classified() {
        for g in [
            Gate::x(),
            Gate::y(),
            Gate::z(),
            Gate::h(),
            Gate::s(),
            Gate::t(),
            Gate::v(),
            Gate::cnot(),
            Gate::toffoli(),
            Gate::swap(),
            Gate::fredkin(),
            Gate::ry(0.3),
        ] {
            assert!(is_unitary(g.matrix(), g.dim(), 1e-12), "{}", g.name());
        }
        assert!(matches!(Gate::cnot().form(), GateForm::Permutation { .. }));
        assert!(matches!(Gate::ccz().form(), GateForm::Diagonal(_)));
        assert!(matches!(Gate::h().form(), GateForm::General));
        assert!(Gate::toffoli().is_classical());
        assert!(!Gate::y().is_classical());
    }

    #[test]
    fn controlled_x_is_cnot_and_twice_is_toffoli() {
        let mut cnot = vec![ZERO; 16];
        for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[r * 4 + col] = ONE;
        }
        let built = controlled(&Gate::x()).unwrap();
        assert_eq!(built.kind(), &GateKind::Cnot);
        assert!(built
            .matrix()
            .iter()
            .zip(&cnot)
            .all(|(a, b)| (a - b).norm() < 1e-15));

        let toff = controlled(&controlled(&Gate::x()).unwrap()).unwrap();
        assert_eq!(toff.kind(), &GateKind::Toffoli);
        for r in 0..8 {
            for col in 0..8 {
                let want = match (r, col) {
                    (6, 7) | (7, 6) => ONE,
                    (6, 6) | (7, 7) => ZERO,
                    (a, b) if a == b => ONE,
                    _ => ZERO,
                };
                assert_eq!(toff.entry(r, col), want);
            }
        }
    }

    #[test]
    fn controlled_rejects_arity_four() {
        assert_eq!(controlled(&Gate::toffoli()), Err(Error::ArityOverflow(4)));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = vec![ONE, ONE, ZERO, ONE];
        assert!(matches!(
            Gate::unitary(GateKind::Custom("bad".into()), 1, m),
            Err(Error::NonUnitary(_))
        ));
    }

    #[test]
    fn v_squared_is_x_and_t_squared_is_s() {
        let vv = matmul(Gate::v().matrix(), Gate::v().matrix(), 2);
        assert!(vv
            .iter()
            .zip(Gate::x().matrix())
            .all(|(a, b)| (a - b).norm() < 1e-12));
        let tt = matmul(Gate::t().matrix(), Gate::t().matrix(), 2);
        assert!(tt
            .iter()
            .zip(Gate::s().matrix())
            .all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // Z·S = S† on the matrix level.
        let zs = Gate::z().compose(&Gate::s(), "ZS").unwrap();
        assert!(zs.approx_eq(&Gate::sdg(), 1e-12));
    }
}
