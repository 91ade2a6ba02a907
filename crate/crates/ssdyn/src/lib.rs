//! Explicit single-solve time integration for M ü = f(u, u̇, t).
//!
//! Butcher-like tables in [`tables`], steppers in [`stepper`], linear
//! spectral analysis in [`spectral`] and convergence tooling in [`accuracy`].

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accuracy;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod reference;
pub mod spectral;
pub mod stepper;
pub mod system;
pub mod tables;

pub use error::{Error, Result};
pub use stepper::{integrate, NewtonOptions};
pub use system::{LinearSystem, SecondOrderSystem, State, Trajectory, Variable};
pub use tables::{new_algorithm, table, ButcherTable};
