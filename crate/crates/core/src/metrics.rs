//! Binary effectiveness measures over judged rankings, per-query and
//! aggregated.

use std::collections::HashSet;

use crate::ingest::QueryJudgments;
use crate::mapping::JudgedRanking;
use crate::segment::RankedList;

/// Precision at cutoff `n`: relevant items among the first `n` positions,
/// divided by `n`. Positions past the end of the list count as
/// non-relevant, so short lists are penalized.
pub fn precision_at(jr: &JudgedRanking, n: usize) -> f64 {
    assert!(n >= 1, "cutoff must be at least 1");
    let hits = jr.items().iter().take(n).filter(|i| i.relevant).count();
    hits as f64 / n as f64
}

/// Judged at cutoff `n`: judged items among the first `n` positions,
/// divided by `n`. Missing positions count as unjudged.
pub fn judged_at(jr: &JudgedRanking, n: usize) -> f64 {
    assert!(n >= 1, "cutoff must be at least 1");
    let hits = jr.items().iter().take(n).filter(|i| i.judged).count();
    hits as f64 / n as f64
}

/// Average precision: mean of P@i over the relevant ranks i, with the
/// mapper-adjusted relevant total as denominator. Zero when that total is
/// zero (the query still counts toward the mean).
///
/// Overlap mapping can score more relevant items than `rel_total`
/// (duplicates all count), pushing the sum past 1; the value is clamped so
/// every mean measure stays in [0, 1].
pub fn average_precision(jr: &JudgedRanking) -> f64 {
    if jr.rel_total() == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, item) in jr.items().iter().enumerate() {
        if item.relevant {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    (sum / jr.rel_total() as f64).min(1.0)
}

/// One measure family (base, `_bin` or `_tol`) of one query, or — after
/// [`aggregate`] — of the whole evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyScores {
    pub num_rel: u64,
    pub num_ret: u64,
    pub num_rel_ret: u64,
    /// Average precision per query; mean average precision after
    /// aggregation.
    pub map: f64,
    /// P@n values, parallel to the configured precision cutoffs.
    pub precision: Vec<f64>,
    /// Judged@n values, parallel to the configured judged cutoffs.
    pub judged: Vec<f64>,
}

/// Scores one judged ranking at the given cutoffs.
pub fn family_scores(
    jr: &JudgedRanking,
    precision_cutoffs: &[usize],
    judged_cutoffs: &[usize],
) -> FamilyScores {
    FamilyScores {
        num_rel: jr.rel_total() as u64,
        num_ret: jr.ret_total() as u64,
        num_rel_ret: jr.num_relevant_items() as u64,
        map: average_precision(jr),
        precision: precision_cutoffs
            .iter()
            .map(|&n| precision_at(jr, n))
            .collect(),
        judged: judged_cutoffs.iter().map(|&n| judged_at(jr, n)).collect(),
    }
}

/// All three measure families of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryScores {
    pub query: String,
    pub base: FamilyScores,
    pub bin: FamilyScores,
    pub tol: FamilyScores,
}

/// Whole-evaluation statistics that have no per-query breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalStats {
    pub videos_ret: u64,
    pub videos_rel: u64,
    /// Mean retrieved-segment duration in seconds (0 when nothing was
    /// retrieved); rendered rounded to the nearest integer.
    pub avglength_ret: f64,
    /// Mean relevant-judgment duration in seconds (0 when no relevant
    /// judgments exist).
    pub avglength_rel: f64,
}

/// Distinct-video and average-length statistics over the aligned
/// evaluation set.
pub fn count_stats(pairs: &[(&RankedList, &QueryJudgments)]) -> GlobalStats {
    let mut videos_ret: HashSet<&str> = HashSet::new();
    let mut videos_rel: HashSet<&str> = HashSet::new();
    let mut ret_duration = 0.0;
    let mut ret_count = 0usize;
    let mut rel_duration = 0.0;
    let mut rel_count = 0usize;
    for (run, judgments) in pairs {
        for e in run.entries() {
            videos_ret.insert(e.segment().video());
            ret_duration += e.segment().duration();
            ret_count += 1;
        }
        for seg in judgments.relevant() {
            videos_rel.insert(seg.video());
            rel_duration += seg.duration();
            rel_count += 1;
        }
    }
    let mean = |total: f64, count: usize| {
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    };
    GlobalStats {
        videos_ret: videos_ret.len() as u64,
        videos_rel: videos_rel.len() as u64,
        avglength_ret: mean(ret_duration, ret_count),
        avglength_rel: mean(rel_duration, rel_count),
    }
}

/// The `all` scope: means of the mean-type measures, sums of the counts,
/// plus the global statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateScores {
    pub num_q: u64,
    pub videos_ret: u64,
    pub videos_rel: u64,
    pub avglength_ret: f64,
    pub avglength_rel: f64,
    pub base: FamilyScores,
    pub bin: FamilyScores,
    pub tol: FamilyScores,
}

fn aggregate_family<F: Fn(&QueryScores) -> &FamilyScores>(
    per_query: &[QueryScores],
    pick: F,
) -> FamilyScores {
    let n = per_query.len() as f64;
    let first = pick(&per_query[0]);
    let p_len = first.precision.len();
    let j_len = first.judged.len();
    let mut out = FamilyScores {
        num_rel: 0,
        num_ret: 0,
        num_rel_ret: 0,
        map: 0.0,
        precision: vec![0.0; p_len],
        judged: vec![0.0; j_len],
    };
    // Fixed summation order (evaluation order) keeps floating-point output
    // reproducible regardless of how the per-query scores were computed.
    for qs in per_query {
        let f = pick(qs);
        out.num_rel += f.num_rel;
        out.num_ret += f.num_ret;
        out.num_rel_ret += f.num_rel_ret;
        out.map += f.map;
        for (acc, v) in out.precision.iter_mut().zip(&f.precision) {
            *acc += v;
        }
        for (acc, v) in out.judged.iter_mut().zip(&f.judged) {
            *acc += v;
        }
    }
    out.map /= n;
    for v in &mut out.precision {
        *v /= n;
    }
    for v in &mut out.judged {
        *v /= n;
    }
    out
}

/// Folds per-query scores into the `all` row values.
///
/// Panics on an empty slice; alignment guarantees at least one evaluable
/// query before scoring starts.
pub fn aggregate(per_query: &[QueryScores], stats: GlobalStats) -> AggregateScores {
    assert!(
        !per_query.is_empty(),
        "aggregate requires at least one query"
    );
    AggregateScores {
        num_q: per_query.len() as u64,
        videos_ret: stats.videos_ret,
        videos_rel: stats.videos_rel,
        avglength_ret: stats.avglength_ret,
        avglength_rel: stats.avglength_rel,
        base: aggregate_family(per_query, |q| &q.base),
        bin: aggregate_family(per_query, |q| &q.bin),
        tol: aggregate_family(per_query, |q| &q.tol),
    }
}
