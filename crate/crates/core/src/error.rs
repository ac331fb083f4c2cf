use thiserror::Error;

use crate::deformation::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("deformation parameter q must be positive and finite, got {0}")]
    InvalidQ(f64),

    #[error("custom deformation violates D(0)=0, D(1)=1: D({n}) = {value}")]
    BoundaryProbe { n: u32, value: f64 },

    #[error("deformation function is not finite at n = {n} ({value})")]
    NonFinite { n: u32, value: f64 },

    #[error("division by zero while evaluating deformation at n = {n}")]
    DivisionByZero { n: u32 },

    #[error("D({n})! overflows to infinity")]
    FactorialOverflow { n: u32 },

    #[error("D({n}) = {value} is negative; ladder matrix element undefined")]
    NegativeDeformation { n: u32, value: f64 },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("negative probability {value} at n = {n}")]
    NegativeProbability { n: usize, value: f64 },

    #[error("probability mass {sum} outside tolerance (tail bound {tail_bound})")]
    MassDeficit { sum: f64, tail_bound: f64 },

    #[error("series diverges: growth ratio {ratio}")]
    Divergent { ratio: f64 },

    #[error("series did not converge within {terms} terms")]
    NotConverged { terms: usize },

    #[error("closed form requires {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
