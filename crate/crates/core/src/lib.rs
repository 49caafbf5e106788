//! Depth-bounded epistemic logic with public announcements.
//!
//! Formulas ([`syntax`]) are checked on Kripke models with per-state agent
//! depths ([`model`]) under four semantics ([`semantics`]). The remaining
//! modules provide randomized soundness suites ([`props`]), the type
//! machinery and a bounded satisfiability search ([`sat`]), the muddy
//! children and 3-SAT generators ([`muddy`]), Graphviz export ([`dot`]) and
//! update benchmarks ([`bench`]).

pub mod bench;
pub mod dot;
pub mod fixtures;
pub mod model;
pub mod muddy;
pub mod props;
pub mod sat;
pub mod semantics;
pub mod syntax;

pub use model::{Mode, Model, PointedModel, StateId};
pub use semantics::{check, SemanticsKind};
pub use syntax::{parse, AgentId, Formula};
