//! Problem data, solution representation, objective evaluation and the
//! independent feasibility validator.

mod instance;
mod solution;
mod validate;

pub use instance::{
    Instance, InstanceError, InstanceMeta, InstanceParts, Matrix, MinCostData, MinCostParts,
    Variant, DEFAULT_SCALE,
};
pub use solution::{canonicalize_solution, Solution};
pub use validate::{
    drone_workload, objective_unchecked, objective_value, tour_cost, tour_time,
    validate_solution, FeasibilityReport, ObjectiveError, StructuralError, Vehicle, Violation,
    ViolationKind,
};
