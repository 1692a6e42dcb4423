//! Iteration schemes for the set intersection problem.
//!
//! Every runner returns a [`Trace`] holding each iterate with its provenance
//! and freshly computed per-set distances.

mod config;
mod global;
mod projections;
mod shqp;
mod trace;
mod two_step;

pub use config::{
    FallbackPolicy, PairingRule, ProblemInstance, Schedule, SolverConfig, TauSchedule,
};
pub use global::{global_step, merit_value, run_global, GlobalStep, Merit};
pub use projections::{run_averaged_projections, run_map};
pub use shqp::{run_basic_shqp, run_mass_projection, run_memory_shqp};
pub use trace::{QpMeta, StepKind, TerminalStatus, Trace, TraceRecord};
pub use two_step::run_two_shqp;
