//! Approximate k-core decomposition by adaptive edge sampling.
//!
//! The toolkit computes coreness labels for every vertex of an undirected
//! simple graph in several computation models backed by one shared sketch:
//!
//! * [`peel`] — exact peeling plus the exclusive labeling primitive that
//!   protects a frozen vertex set while labeling the rest,
//! * [`sketch`] — the batch multi-level sampling sketch,
//! * [`stream`] — one-pass insertion-only arrival processing,
//! * [`turnstile`] — insertions and deletions with per-vertex sparse
//!   recovery backing demotions,
//! * [`mrsim`] — a deterministic cluster-round simulation of the batch
//!   sketch with per-machine load metering,
//! * [`report`] / [`bench`] — error percentiles against exact labels and a
//!   CSV experiment harness.
//!
//! All sampling is driven by a single keyed hash rank per edge
//! ([`sampler`]), which makes the level samples nested and the batch,
//! streaming, and cluster variants comparable run-for-run under one seed.

pub mod bench;
pub mod gen;
pub mod graph;
pub mod mrsim;
pub mod peel;
pub mod report;
pub mod sampler;
pub mod sketch;
pub mod stream;
pub mod turnstile;

pub use graph::{Graph, GraphError, LoadReport};
pub use peel::{exclusive_coreness_labeling, peel_coreness, Labeling};
pub use sampler::{EdgeHasher, LevelSchedule};
pub use sketch::{run_sketch, Mode, SketchParams, SpaceStats};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
