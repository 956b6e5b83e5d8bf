use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid marking: triangle {index} out of range (mesh has {n_triangles})")]
    InvalidMarking { index: usize, n_triangles: usize },

    #[error("refinement floor reached: no marked element can be bisected above h_min = {h_min:e}")]
    RefinementFloorReached { h_min: f64 },

    #[error("projection topology mismatch: target mesh is not a refinement of the source mesh")]
    ProjectionTopologyMismatch,

    #[error("linear solve failed after {iterations} iterations (relative residual {residual:e})")]
    SolveFailure { residual: f64, iterations: usize },

    #[error("error estimator failed: {0}")]
    EstimatorFailure(String),

    #[error("not enough accepted steps for the truncation-error estimate")]
    NotEnoughHistory,

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("run aborted at t = {t:e}: {reason}")]
    Aborted { t: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
