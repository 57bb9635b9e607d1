use thiserror::Error;

use crate::state::LagrangianState;

/// Errors produced by the solver and its transforms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),
    #[error("characteristics decrease at index {index} (drop {drop:.3e})")]
    NonMonotone { index: usize, drop: f64 },
    #[error("grids do not match")]
    GridMismatch,
    #[error("non-finite values after step ending at t = {time}")]
    BlowUp {
        time: f64,
        snapshot: Box<LagrangianState>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
