//! Algorithms adapted to the ensemble readout model.
//!
//! None of them measure a single computer. Results that would normally be
//! inspected after a measurement are instead checked coherently, and a
//! computer whose result fails the check swaps it for a register of fresh
//! `|+⟩` qubits, which reads as 0 on every bit.

mod demos;
mod grover;
mod np;
mod search;
mod shor;

pub use demos::{rng_circuit, rng_demo, teleport, teleport_circuit, TeleportMode, TeleportReport};
pub use grover::{
    exact_multi_readout, first_equals_last_probability, grover_iterate, grover_multi_solution,
    iterations_for, min_misplaced_bound, multi_solution_circuit, naive_readout,
    success_probability, success_probability_formula, GroverInstance, MultiSolutionOptions,
    MultiSolutionReport, OutputDistribution, SortNetwork,
};
pub use np::{np_function_wrapper, NpProgram, Verifier};
pub use search::{
    fit_sqrt_scaling, grover_binary_search, ExistenceTest, SearchOutcome, EXISTENCE_BUDGET,
};
pub use shor::{
    circuit_distribution, continued_fraction, divisor_event_probability,
    divisor_failure_probability, divisor_outcome_probability, gcd, is_order, mod_pow,
    order_finding_circuit, shor_ensemble, shor_quantum_sample, totient, ShorInstance, ShorMode,
    ShorReport, MAX_N,
};
