//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by signal construction, sampling, bound evaluation,
/// reconstruction, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },

    #[error("edge {index} references vertex {vertex}, but the graph has {num_vertices} vertices")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        num_vertices: usize,
    },

    #[error("edge {index} duplicates the undirected edge ({u}, {v})")]
    DuplicateEdge { index: usize, u: usize, v: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("signal contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{context} requires at least {required} time steps, got {actual}")]
    TooFewTimeSteps {
        context: &'static str,
        required: usize,
        actual: usize,
    },

    #[error("parameter {name} = {value} outside required range {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("row/column selection is empty after rounding ({what})")]
    EmptySelection { what: &'static str },

    #[error("matrix is numerically zero-rank; incoherence and condition number are undefined")]
    ZeroRank,

    #[error("reference signal has zero Frobenius norm; NRMSE is undefined")]
    ZeroReference,

    #[error("eigendecomposition produced a non-finite value in {context}")]
    EigenFailure { context: &'static str },

    #[error("linear solve failed at outer {outer}, middle {middle}: {detail}")]
    SolverFailure {
        outer: usize,
        middle: usize,
        detail: String,
    },

    #[error("non-finite iterate at outer {outer}, middle {middle}, inner {inner}")]
    NonFiniteIterate {
        outer: usize,
        middle: usize,
        inner: usize,
    },

    #[error("SVT iteration diverged at step {iteration} (iterate norm {norm:.3e})")]
    Divergence { iteration: usize, norm: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {detail}")]
    Parse {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid arguments or malformed inputs, as
    /// opposed to runtime failures (I/O, divergence). The CLI maps the former
    /// to exit code 2 and the latter to exit code 1.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::SelfLoop { .. }
                | Error::VertexOutOfRange { .. }
                | Error::DuplicateEdge { .. }
                | Error::DimensionMismatch { .. }
                | Error::TooFewTimeSteps { .. }
                | Error::ParamOutOfRange { .. }
                | Error::EmptySelection { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
