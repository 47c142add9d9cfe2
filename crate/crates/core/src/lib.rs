//! Simulation and verification of viscous Burgers flow on `(-1, 1)` coupled
//! to a point particle held by a spring.
//!
//! The fluid velocity `v` solves `v_t + v v_y - v_yy = 0` on both sides of the
//! particle position `h(t)`, with `v(±1) = 0` and `v(t, h) = g = h'`. The
//! particle obeys `g' = [v_y] + K (h1 - h) + u(t)`.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod params;
pub mod signal;
pub mod stability;
pub mod stepper;
pub mod transform;
pub mod tridiag;

pub use diagnostics::{SampleRecord, Termination, Trajectory};
pub use error::{Error, Result};
pub use params::{initial_state, Grid, ProfileDescriptor, SolverConfig, State, SystemParams};
pub use signal::InputSignal;
pub use stepper::simulate;
