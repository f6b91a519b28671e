//! Curvature-driven evolution of closed curves on surfaces.
//!
//! Curves live either in 3-space on an implicit surface `{f = 0}` (the
//! embedded formulation) or in the parameter square of a doubly periodic
//! immersion `χ` (the immersed formulation). Both are discretized with a
//! flowing finite-volume scheme, redistributed tangentially and integrated
//! with an adaptive Runge–Kutta–Merson method.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod redistribution;
pub mod scenario;
pub mod solver;
pub mod surface;

pub use error::{FlowError, Result};
