//! Evaluation toolkit for segment-based retrieval.
//!
//! Systems that retrieve time segments from videos rarely return the exact
//! boundaries that were judged, so binary relevance judgments cannot be
//! applied to results directly. This crate adapts the judgments to
//! variable-boundary result segments through three models:
//!
//! - **overlap**: a result is relevant iff it temporally overlaps a relevant
//!   segment; several results hitting the same segment all count,
//! - **binned**: starts are snapped to fixed-width bins and same-bin results
//!   are merged before scoring,
//! - **tolerance**: a user watches a fixed window from each result's start;
//!   a result is relevant iff the window reaches relevant content that has
//!   not been credited to an earlier result.
//!
//! Standard binary IR measures (P@n, MAP, Judged@n, count statistics) are
//! reported under each model in a trec_eval-style three-column layout.
//!
//! Per-query scoring is embarrassingly parallel and fans out over a rayon
//! pool when the default `parallel` feature is enabled; disabling it leaves
//! a dependency-free sequential path. Both paths produce identical output.

pub mod eval;
pub mod ingest;
pub mod mapping;
pub mod metrics;
pub mod report;
pub mod segment;

pub use eval::{evaluate, evaluate_sequential, EvalConfig, EvalError, Evaluation};
pub use ingest::{JudgmentPool, QueryJudgments};
pub use segment::{Judgment, RankedList, RunEntry, Segment};
