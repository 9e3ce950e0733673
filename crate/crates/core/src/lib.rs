//! Leakage suppression for driven few-level systems by small static offsets
//! of drive amplitude, detuning and phase.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`]: dense complex matrices with labelled bases.
//! * [`pulses`]: envelopes, segmented schedules, STIRAP pairs, geometric
//!   trajectory schedules and DRAG fields.
//! * [`models`]: time-dependent Hamiltonians for the single-qubit, two-qubit,
//!   ladder and crosstalk scenarios.
//! * [`propagation`]: time-ordered unitaries and Lindblad evolution.
//! * [`metrics`]: gate, averaged and state fidelities.
//! * [`tuneup`]: sweeps, quadratic fits, offset optimisation and tolerance
//!   studies.
//! * [`framework_checks`]: first-order Magnus diagnostics.
//!
//! All frequencies are angular (rad/s) and all times are in seconds.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod framework_checks;
pub mod metrics;
pub mod models;
pub mod operators;
pub mod propagation;
pub mod pulses;
pub mod tuneup;

mod par;

pub use error::{Error, Result};

/// 2π, for writing frequencies as `TAU * 30e6`.
pub const TAU: f64 = std::f64::consts::TAU;

/// Angular frequency for a value given in MHz.
pub fn mhz(value: f64) -> f64 {
    TAU * value * 1e6
}
