//! State-vector engine: gates, circuits, execution and state analysis.

pub mod analysis;
pub mod backend;
pub mod circuit;
pub mod gate;
pub mod run;
pub mod sparse;
pub mod state;
pub mod text;

pub use analysis::{
    fidelity, inner, reduced_density_matrix, reduced_fidelity, subsystem_purity, trace_distance,
};
pub use backend::{Backend, BasisKey, QuantumState, SimState};
pub use circuit::{Circuit, ClassicalOp, CollapsePoint, Operation, Step};
pub use gate::{controlled, Gate, GateKind, Pauli};
pub use run::{run_circuit, run_circuit_staged, run_circuit_with, run_deferred};
pub use sparse::SparseState;
pub use state::StateVector;
pub use text::parse_circuit;
