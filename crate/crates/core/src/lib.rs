//! Simulation of ensemble (bulk) quantum computation.
//!
//! In the ensemble model many identical computers run side by side and only
//! the per-qubit σ_z expectation, averaged over all of them, can be read out.
//! The crate provides a state-vector engine ([`simcore`]), fault locations and
//! Pauli noise ([`noise`]), small quantum codes ([`codes`]), fault-tolerant
//! gadgets that never measure ([`gadgets`]), the ensemble readout model
//! ([`ensemble`]) and algorithms adapted to it ([`algorithms`]).

pub mod algorithms;
pub mod codes;
pub mod ensemble;
pub mod error;
pub mod gadgets;
pub mod noise;
pub mod simcore;

pub use error::{Error, Result};
