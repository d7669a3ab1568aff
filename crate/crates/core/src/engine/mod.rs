//! Depth-first branch and bound over the constraint IR.

mod bound;
mod branch;
mod circuit;
mod propagate;
mod search;
mod store;

pub use bound::Layout;
pub use branch::Branching;
pub use circuit::{circuit_filter, ArcState, ArcTable, CircuitMode};
pub use propagate::{Propagation, Propagator};
pub use search::{
    luby, solve, IncumbentSource, RestartPolicy, SearchConfig, SearchStats, SolveError,
    SolveOutcome, Status, TracePoint,
};
pub use store::{Conflict, Store};
