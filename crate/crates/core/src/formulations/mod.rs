//! The four constraint formulations, built over a shared constraint IR, and
//! the mapping between model assignments and solutions.

mod build;
mod decode;
pub mod ir;

pub use build::{
    build_mc_2idx, build_mc_3idx, build_model, build_mt_2idx, build_mt_3idx, BuildError,
    BuildOptions,
};
pub use decode::{decode_solution, encode_solution, DecodeError};
pub use ir::{
    Assignment, ConstraintKind, ConstraintModel, DecodeKey, LinExpr, Lit, ModelKind, Objective,
    VarId, VarTag,
};
