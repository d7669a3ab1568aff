//! Instance and solution files, coordinate converters and result tables.

mod convert;
mod native;
mod results;
mod solution;

use thiserror::Error;

pub use convert::{
    convert_coordinates, convert_source, eligible_fraction_from_name, parse_coordinates, ConvertError,
    ConverterParams, CoordinateSource, CostParams, DroneMetric, Rounding,
};
pub use native::{parse_native, serialize_native, FORMAT_VERSION, INSTANCE_HEADER};
pub use results::{emit_results_table, format_fixed, parse_results_table, ParsedRow, ResultCell, ResultEntry, ResultRow};
pub use solution::{parse_solution, serialize_solution, SOLUTION_HEADER};

/// A rejected document, located by 1-based line and the field being read.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, field: &str, message: impl Into<String>) -> Self {
        Self {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}
