//! Domain types shared by every stage of the evaluation: segments, relevance
//! judgments, run entries and per-query ranked lists.

use std::fmt;

/// A contiguous time interval within one video.
///
/// Times are real-valued seconds. The interval is half-open in spirit:
/// `start < end` always holds and two segments that merely touch at an
/// endpoint do not overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    video: String,
    start: f64,
    end: f64,
}

/// Violation of the [`Segment`] invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentError {
    /// Start or end time is NaN or infinite.
    NonFiniteTime,
    /// Start time is negative.
    NegativeStart,
    /// Start is not strictly before end.
    EmptyInterval,
}

impl fmt::Display for SegmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentError::NonFiniteTime => write!(f, "times must be finite"),
            SegmentError::NegativeStart => write!(f, "start time must be non-negative"),
            SegmentError::EmptyInterval => write!(f, "start time must be less than end time"),
        }
    }
}

impl std::error::Error for SegmentError {}

impl Segment {
    /// Builds a segment, validating `0 <= start < end` and finiteness.
    pub fn new(video: impl Into<String>, start: f64, end: f64) -> Result<Self, SegmentError> {
        if !start.is_finite() || !end.is_finite() {
            return Err(SegmentError::NonFiniteTime);
        }
        if start < 0.0 {
            return Err(SegmentError::NegativeStart);
        }
        if start >= end {
            return Err(SegmentError::EmptyInterval);
        }
        Ok(Self {
            video: video.into(),
            start,
            end,
        })
    }

    pub fn video(&self) -> &str {
        &self.video
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Length of the segment in seconds, always strictly positive.
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// True iff both segments lie in the same video and share a strictly
    /// positive amount of time. Touching endpoints do not count: a viewer
    /// arriving exactly at the boundary has seen none of the other segment.
    pub fn overlaps(&self, other: &Segment) -> bool {
        self.video == other.video && self.start.max(other.start) < self.end.min(other.end)
    }
}

/// One judged segment for a query, with its binary relevance value.
#[derive(Debug, Clone, PartialEq)]
pub struct Judgment {
    pub query: String,
    pub segment: Segment,
    pub relevant: bool,
}

/// Violation of the [`RunEntry`] invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEntryError {
    /// Score is NaN or infinite.
    NonFiniteScore,
    /// Rank column is zero; ranks are 1-based.
    ZeroRank,
}

impl fmt::Display for RunEntryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunEntryError::NonFiniteScore => write!(f, "score must be finite"),
            RunEntryError::ZeroRank => write!(f, "rank must be at least 1"),
        }
    }
}

impl std::error::Error for RunEntryError {}

/// One ranked result from a system run.
///
/// The `rank` field is carried through from the input for diagnostics only;
/// ordering is always by score.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    query: String,
    segment: Segment,
    rank: u32,
    score: f64,
    run_tag: String,
}

impl RunEntry {
    pub fn new(
        query: impl Into<String>,
        segment: Segment,
        rank: u32,
        score: f64,
        run_tag: impl Into<String>,
    ) -> Result<Self, RunEntryError> {
        if !score.is_finite() {
            return Err(RunEntryError::NonFiniteScore);
        }
        if rank == 0 {
            return Err(RunEntryError::ZeroRank);
        }
        Ok(Self {
            query: query.into(),
            segment,
            rank,
            score,
            run_tag: run_tag.into(),
        })
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn segment(&self) -> &Segment {
        &self.segment
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn run_tag(&self) -> &str {
        &self.run_tag
    }

    /// Copy of this entry with the segment replaced; used when snapping
    /// results to bins.
    pub fn with_segment(&self, segment: Segment) -> RunEntry {
        RunEntry {
            segment,
            ..self.clone()
        }
    }
}

/// The ranked result list of one query, ordered by descending score.
///
/// Entries with equal scores keep their insertion (file) order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    query: String,
    entries: Vec<RunEntry>,
}

impl RankedList {
    /// Sorts the entries by descending score; the sort is stable, so ties
    /// preserve the order in which entries were supplied.
    pub fn new(query: impl Into<String>, mut entries: Vec<RunEntry>) -> Self {
        let query = query.into();
        debug_assert!(entries.iter().all(|e| e.query() == query));
        // Scores are validated finite, so partial_cmp cannot fail.
        entries.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        Self { query, entries }
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn entries(&self) -> &[RunEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
