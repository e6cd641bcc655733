//! The three adaptations of the relevance judgment function to
//! variable-boundary result segments.
//!
//! Each mapper turns a ranked list plus the query's judgment pool into a
//! [`JudgedRanking`]: the per-rank binary relevance string that the measure
//! functions consume, together with the relevance/judged totals of the
//! (possibly transformed) judgment set.

use std::collections::HashSet;
use std::fmt;

use crate::ingest::QueryJudgments;
use crate::segment::{RankedList, Segment};

/// Invalid mapper configuration value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigError {
    NonFinite,
    NonPositive,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NonFinite => write!(f, "must be a finite number of seconds"),
            ConfigError::NonPositive => write!(f, "must be strictly positive"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn validate_seconds(value: f64) -> Result<f64, ConfigError> {
    if !value.is_finite() {
        Err(ConfigError::NonFinite)
    } else if value <= 0.0 {
        Err(ConfigError::NonPositive)
    } else {
        Ok(value)
    }
}

/// Bin width for the binned relevance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinConfig {
    bin_size: f64,
}

impl BinConfig {
    pub fn new(bin_size: f64) -> Result<Self, ConfigError> {
        Ok(Self {
            bin_size: validate_seconds(bin_size)?,
        })
    }

    pub fn bin_size(&self) -> f64 {
        self.bin_size
    }
}

/// Watched-window length for the tolerance to irrelevance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    window: f64,
}

impl ToleranceConfig {
    pub fn new(window: f64) -> Result<Self, ConfigError> {
        Ok(Self {
            window: validate_seconds(window)?,
        })
    }

    pub fn window(&self) -> f64 {
        self.window
    }
}

/// Largest multiple of the bin size that is at most `t`.
pub fn bin_floor(t: f64, cfg: &BinConfig) -> f64 {
    cfg.bin_size * (t / cfg.bin_size).floor()
}

/// Smallest multiple of the bin size strictly greater than `t`; for an
/// exact multiple this is `t + bin_size`, so `bin_ceil - bin_floor` is
/// always one bin.
pub fn bin_ceil(t: f64, cfg: &BinConfig) -> f64 {
    cfg.bin_size * ((t / cfg.bin_size).floor() + 1.0)
}

/// Index of the bin containing `t`; bin `k` covers `[k*BS, (k+1)*BS)`.
fn bin_index(t: f64, cfg: &BinConfig) -> u64 {
    (t / cfg.bin_size).floor() as u64
}

/// One scored position of a judged ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedItem {
    /// The original entry, or the bin-snapped entry under the binned model.
    pub entry: crate::segment::RunEntry,
    pub relevant: bool,
    pub judged: bool,
}

/// A ranked list annotated with binary relevance and judged flags, plus the
/// relevant total of the (possibly transformed) judgment set.
///
/// `relevant` implies `judged` for every item: relevance can only be
/// established through the judged pool.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedRanking {
    query: String,
    items: Vec<JudgedItem>,
    rel_total: usize,
}

impl JudgedRanking {
    /// Assembles a judged ranking from parts. Intended for the mappers and
    /// for tests that score hand-written relevance strings.
    pub fn new(query: impl Into<String>, items: Vec<JudgedItem>, rel_total: usize) -> Self {
        debug_assert!(items.iter().all(|i| !i.relevant || i.judged));
        Self {
            query: query.into(),
            items,
            rel_total,
        }
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn items(&self) -> &[JudgedItem] {
        &self.items
    }

    /// Relevant units in the transformed judgment set: |R_q| under the
    /// overlap and tolerance models, the number of distinct relevant
    /// (video, bin) pairs under the binned model.
    pub fn rel_total(&self) -> usize {
        self.rel_total
    }

    /// Number of (possibly merged) results.
    pub fn ret_total(&self) -> usize {
        self.items.len()
    }

    /// Number of items scored relevant. Under the overlap model this may
    /// exceed `rel_total` (duplicates all count); under the binned and
    /// tolerance models it never does.
    pub fn num_relevant_items(&self) -> usize {
        self.items.iter().filter(|i| i.relevant).count()
    }

    /// The relevance string as 0/1 values, in rank order.
    pub fn relevance_string(&self) -> Vec<u8> {
        self.items.iter().map(|i| u8::from(i.relevant)).collect()
    }
}

/// Overlap relevance: an item is relevant iff its segment overlaps any
/// relevant segment, judged iff it overlaps any judged segment. No
/// deduplication — several results overlapping one relevant segment are
/// each counted relevant.
pub fn map_overlap(run: &RankedList, judgments: &QueryJudgments) -> JudgedRanking {
    let relevant_segments: Vec<&Segment> = judgments.relevant().collect();
    let items = run
        .entries()
        .iter()
        .map(|e| {
            let relevant = relevant_segments.iter().any(|r| e.segment().overlaps(r));
            let judged = judgments
                .judged()
                .iter()
                .any(|(s, _)| e.segment().overlaps(s));
            JudgedItem {
                entry: e.clone(),
                relevant,
                judged,
            }
        })
        .collect();
    JudgedRanking::new(run.query(), items, relevant_segments.len())
}

/// Binned relevance: judgment and result starts are snapped to fixed-width
/// bins. A (video, bin) is relevant iff a relevant segment starts in it,
/// judged iff any judged segment starts in it. Each result is replaced by
/// its start-time bin, and results of the same query landing in the same
/// (video, bin) are merged — the earliest-ranked occurrence survives at its
/// rank, later duplicates are deleted.
pub fn map_binned(run: &RankedList, judgments: &QueryJudgments, cfg: &BinConfig) -> JudgedRanking {
    let mut relevant_bins: HashSet<(&str, u64)> = HashSet::new();
    let mut judged_bins: HashSet<(&str, u64)> = HashSet::new();
    for (seg, relevant) in judgments.judged() {
        let key = (seg.video(), bin_index(seg.start(), cfg));
        judged_bins.insert(key);
        if *relevant {
            relevant_bins.insert(key);
        }
    }

    let mut occupied: HashSet<(&str, u64)> = HashSet::new();
    let mut items = Vec::new();
    for e in run.entries() {
        let key = (e.segment().video(), bin_index(e.segment().start(), cfg));
        if !occupied.insert(key) {
            continue; // merged into the earlier occurrence of this bin
        }
        let bin = Segment::new(
            e.segment().video(),
            bin_floor(e.segment().start(), cfg),
            bin_ceil(e.segment().start(), cfg),
        )
        .expect("a bin is a valid segment");
        items.push(JudgedItem {
            entry: e.with_segment(bin),
            relevant: relevant_bins.contains(&key),
            judged: judged_bins.contains(&key),
        });
    }
    JudgedRanking::new(run.query(), items, relevant_bins.len())
}

fn window_overlaps(video: &str, w_start: f64, w_end: f64, seg: &Segment) -> bool {
    video == seg.video() && w_start.max(seg.start()) < w_end.min(seg.end())
}

/// Tolerance to irrelevance: the user watches `window` seconds from each
/// result's start (the result's own end is ignored). An item is relevant
/// iff its watched window overlaps a relevant segment that no earlier item
/// was credited for; on success every relevant segment the window reaches
/// is credited. Judged iff the window overlaps any judged segment.
pub fn map_tolerance(
    run: &RankedList,
    judgments: &QueryJudgments,
    cfg: &ToleranceConfig,
) -> JudgedRanking {
    let relevant_segments: Vec<&Segment> = judgments.relevant().collect();
    let mut credited = vec![false; relevant_segments.len()];
    let mut items = Vec::with_capacity(run.len());
    for e in run.entries() {
        let video = e.segment().video();
        let w_start = e.segment().start();
        let w_end = w_start + cfg.window;
        let reached: Vec<usize> = relevant_segments
            .iter()
            .enumerate()
            .filter(|(_, seg)| window_overlaps(video, w_start, w_end, seg))
            .map(|(i, _)| i)
            .collect();
        let relevant = reached.iter().any(|&i| !credited[i]);
        if relevant {
            for &i in &reached {
                credited[i] = true;
            }
        }
        let judged = judgments
            .judged()
            .iter()
            .any(|(seg, _)| window_overlaps(video, w_start, w_end, seg));
        items.push(JudgedItem {
            entry: e.clone(),
            relevant,
            judged,
        });
    }
    JudgedRanking::new(run.query(), items, relevant_segments.len())
}
