//! End-to-end evaluation: align, map under all three models, score,
//! aggregate.
//!
//! Per-query scoring is pure and independent, so it fans out over rayon
//! when the `parallel` feature (default) is enabled. Result assembly is
//! order-preserving and aggregation folds in a fixed order, so parallel and
//! sequential runs produce identical output byte for byte.

use std::fmt;

use crate::ingest::{align, AlignError, AlignWarning, JudgmentPool, QueryJudgments};
use crate::mapping::{map_binned, map_overlap, map_tolerance, BinConfig, ToleranceConfig};
use crate::metrics::{aggregate, count_stats, family_scores, AggregateScores, QueryScores};
use crate::segment::RankedList;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Everything the pipeline needs besides the input files.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub bin: BinConfig,
    pub tolerance: ToleranceConfig,
    /// Cutoffs for the P_n rows; must be non-empty, positive, strictly
    /// increasing.
    pub precision_cutoffs: Vec<usize>,
    /// Cutoffs for the Judged_n rows; same constraints.
    pub judged_cutoffs: Vec<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            bin: BinConfig::new(60.0).unwrap(),
            tolerance: ToleranceConfig::new(10.0).unwrap(),
            precision_cutoffs: vec![5, 10, 20],
            judged_cutoffs: vec![10, 20, 30],
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        for (name, cutoffs) in [
            ("precision", &self.precision_cutoffs),
            ("judged", &self.judged_cutoffs),
        ] {
            if cutoffs.is_empty() {
                return Err(EvalError::InvalidCutoffs(format!(
                    "{name} cutoff list must not be empty"
                )));
            }
            if cutoffs[0] == 0 {
                return Err(EvalError::InvalidCutoffs(format!(
                    "{name} cutoffs must be positive"
                )));
            }
            if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(EvalError::InvalidCutoffs(format!(
                    "{name} cutoffs must be strictly increasing"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    NoEvaluableQueries,
    InvalidCutoffs(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::NoEvaluableQueries => {
                write!(
                    f,
                    "no evaluable queries: the qrel and the run share no query id"
                )
            }
            EvalError::InvalidCutoffs(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<AlignError> for EvalError {
    fn from(e: AlignError) -> Self {
        match e {
            AlignError::NoEvaluableQueries => EvalError::NoEvaluableQueries,
        }
    }
}

/// Scored evaluation: per-query rows in run-file order, the `all` row
/// values, and any alignment warnings for the diagnostic stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub per_query: Vec<QueryScores>,
    pub aggregate: AggregateScores,
    pub warnings: Vec<AlignWarning>,
}

/// Applies all three mappers to one query and scores each family.
fn score_query(run: &RankedList, judgments: &QueryJudgments, cfg: &EvalConfig) -> QueryScores {
    let p = &cfg.precision_cutoffs;
    let j = &cfg.judged_cutoffs;
    QueryScores {
        query: run.query().to_string(),
        base: family_scores(&map_overlap(run, judgments), p, j),
        bin: family_scores(&map_binned(run, judgments, &cfg.bin), p, j),
        tol: family_scores(&map_tolerance(run, judgments, &cfg.tolerance), p, j),
    }
}

fn finish(
    per_query: Vec<QueryScores>,
    pairs: &[(&RankedList, &QueryJudgments)],
    warnings: Vec<AlignWarning>,
) -> Evaluation {
    let stats = count_stats(pairs);
    Evaluation {
        aggregate: aggregate(&per_query, stats),
        per_query,
        warnings,
    }
}

/// Single-threaded evaluation; always available.
pub fn evaluate_sequential(
    pool: &JudgmentPool,
    runs: &[RankedList],
    cfg: &EvalConfig,
) -> Result<Evaluation, EvalError> {
    cfg.validate()?;
    let aligned = align(pool, runs)?;
    let per_query = aligned
        .pairs
        .iter()
        .map(|(run, judgments)| score_query(run, judgments, cfg))
        .collect();
    Ok(finish(per_query, &aligned.pairs, aligned.warnings))
}

/// Fans per-query scoring out over the rayon pool. Collection preserves
/// query order, so the result is identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn evaluate_parallel(
    pool: &JudgmentPool,
    runs: &[RankedList],
    cfg: &EvalConfig,
) -> Result<Evaluation, EvalError> {
    cfg.validate()?;
    let aligned = align(pool, runs)?;
    let per_query = aligned
        .pairs
        .par_iter()
        .map(|(run, judgments)| score_query(run, judgments, cfg))
        .collect();
    Ok(finish(per_query, &aligned.pairs, aligned.warnings))
}

/// Evaluates a run against a judgment pool, parallel when the `parallel`
/// feature is enabled.
pub fn evaluate(
    pool: &JudgmentPool,
    runs: &[RankedList],
    cfg: &EvalConfig,
) -> Result<Evaluation, EvalError> {
    #[cfg(feature = "parallel")]
    {
        evaluate_parallel(pool, runs, cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        evaluate_sequential(pool, runs, cfg)
    }
}
