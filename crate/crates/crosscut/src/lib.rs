//! Combinatorial machinery for crossing numbers of weighted multigraphs:
//! rotation systems, combinatorial drawings, exact desk-scale solvers for
//! crossing number and three-terminal multiway cut, and the reduction that
//! turns a cut instance into a cubic crossing-number instance together with
//! the extraction that maps drawings back to cuts.

#![forbid(unsafe_code)]

pub mod drawing;
pub mod extract;
pub mod fmt;
pub mod graph;
pub mod harness;
pub mod plane;
pub mod planarity;
pub mod reduce;
pub mod rotation;
pub mod solver;
pub mod surgery;

use thiserror::Error;

/// Crate-wide error type. The CLI maps every variant to a nonzero exit code;
/// `CapExceeded` and `BudgetExceeded` are reported as skips, not failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self loop at vertex {0}")]
    SelfLoop(String),
    #[error("edge weight must be positive")]
    ZeroWeight,
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge index {0}")]
    UnknownEdge(usize),
    #[error("rotation system invalid: {0}")]
    BadRotation(String),
    #[error("drawing invalid: {0}")]
    BadDrawing(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance invalid: {0}")]
    BadInstance(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("cost cap {cap} exceeded")]
    CapExceeded { cap: u64 },
    #[error("search budget of {nodes} nodes exceeded")]
    BudgetExceeded { nodes: u64 },
    #[error("reduction invalid: {0}")]
    BadReduction(String),
    #[error("extraction failed: {0}")]
    Extraction(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
