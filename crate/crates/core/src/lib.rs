//! Parallel drone scheduling vehicle routing: instance model, constraint
//! formulations, a branch-and-bound engine, heuristics and an exhaustive
//! oracle for small instances.

pub mod engine;
pub mod formulations;
pub mod gen;
pub mod heuristics;
pub mod io;
pub mod model;
pub mod oracle;

pub use engine::{solve, SearchConfig, SolveOutcome, Status};
pub use formulations::{build_model, BuildError, BuildOptions, ConstraintModel, ModelKind};
pub use model::{Instance, Solution, Variant};
