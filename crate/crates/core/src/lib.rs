//! Solvers for the set intersection problem: find `x` in `K_1 ∩ … ∩ K_m`
//! when each `K_l` is only reachable through a projection oracle.
//!
//! The crate is organised bottom-up:
//!
//! * [`sets`]: projection oracles for concrete sets, plus sampling checks
//!   for super-regularity and the second-order supporting hyperplane property.
//! * [`polyhedra`]: halfspaces generated by projections, a dual active-set
//!   QP for projecting onto their intersection, and the `η` constant.
//! * [`solvers`]: alternating projections, the supporting-halfspace QP
//!   family (basic, mass, memory, two-step), averaged projections and the
//!   backtracking global step.
//! * [`diagnostics`]: rate measurement on traces and the predicted
//!   contraction constants.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
mod error;
pub mod linalg;
pub mod polyhedra;
pub mod sets;
pub mod solvers;

pub use error::{Error, Result};

/// A point of the ambient space `ℝⁿ`.
pub type Point = nalgebra::DVector<f64>;
