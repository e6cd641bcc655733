//! Parsing and validation of qrel and ranking files.
//!
//! Both formats are TREC-shaped, whitespace-separated, UTF-8, with a literal
//! `Q0` placeholder column and decimal-second start/end columns:
//!
//! ```text
//! qrel:    <query> Q0 <video> <start> <end> <relevance>
//! ranking: <query> Q0 <video> <start> <end> <rank> <score> <run_tag>
//! ```
//!
//! Blank lines and lines whose first non-whitespace character is `#` are
//! skipped. Relevance is an integer; values above 1 are clamped to 1 so
//! graded qrels can be reused, values below 0 are clamped to 0. The rank
//! column of a ranking file is kept for diagnostics only — ordering is by
//! score, matching trec_eval. Time formats such as `mm.ss` are not
//! supported; times are plain decimal seconds.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;

use crate::segment::{Judgment, RankedList, RunEntry, Segment, SegmentError};

/// All judgments of one query: the judged pool, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryJudgments {
    judged: Vec<(Segment, bool)>,
}

impl QueryJudgments {
    /// Every judged segment with its relevance value, in file order.
    pub fn judged(&self) -> &[(Segment, bool)] {
        &self.judged
    }

    /// The segments judged relevant (the recall base of the query).
    pub fn relevant(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.judged.iter().filter(|(_, r)| *r).map(|(s, _)| s)
    }

    pub fn num_judged(&self) -> usize {
        self.judged.len()
    }

    pub fn num_relevant(&self) -> usize {
        self.judged.iter().filter(|(_, r)| *r).count()
    }
}

/// Relevance judgments grouped by query, preserving first-appearance order
/// of queries and file order within each query.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JudgmentPool {
    order: Vec<String>,
    by_query: HashMap<String, QueryJudgments>,
}

impl JudgmentPool {
    pub fn from_judgments(judgments: impl IntoIterator<Item = Judgment>) -> Self {
        let mut pool = JudgmentPool::default();
        for j in judgments {
            let entry = pool.by_query.entry(j.query.clone()).or_insert_with(|| {
                pool.order.push(j.query.clone());
                QueryJudgments::default()
            });
            entry.judged.push((j.segment, j.relevant));
        }
        pool
    }

    pub fn get(&self, query: &str) -> Option<&QueryJudgments> {
        self.by_query.get(query)
    }

    /// Query ids in first-appearance order.
    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn num_queries(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// A rejected input line, with its 1-based line number and original text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub text: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    FieldCount { expected: usize, found: usize },
    InvalidNumber { field: &'static str },
    Segment(SegmentError),
    InvalidRelevance,
    InvalidRank,
    NonFiniteScore,
    DuplicateJudgment { first_line: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::FieldCount { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")?
            }
            ParseErrorKind::InvalidNumber { field } => {
                write!(f, "{field} is not a valid number")?
            }
            ParseErrorKind::Segment(e) => write!(f, "{e}")?,
            ParseErrorKind::InvalidRelevance => write!(f, "relevance must be an integer")?,
            ParseErrorKind::InvalidRank => write!(f, "rank must be a positive integer")?,
            ParseErrorKind::NonFiniteScore => write!(f, "non-finite score")?,
            ParseErrorKind::DuplicateJudgment { first_line } => write!(
                f,
                "duplicate judgment for the same (query, video, start, end); first seen at line {first_line}"
            )?,
        }
        write!(f, ": \"{}\"", self.text)
    }
}

impl std::error::Error for ParseError {}

fn line_error(line: usize, text: &str, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line,
        text: text.trim_end().to_string(),
        kind,
    }
}

fn skip_line(line: &str) -> bool {
    let trimmed = line.trim_start();
    trimmed.is_empty() || trimmed.starts_with('#')
}

fn parse_time(raw: &str, field: &'static str, line: usize, text: &str) -> Result<f64, ParseError> {
    raw.parse::<f64>()
        .map_err(|_| line_error(line, text, ParseErrorKind::InvalidNumber { field }))
}

fn parse_segment(
    video: &str,
    start: f64,
    end: f64,
    line: usize,
    text: &str,
) -> Result<Segment, ParseError> {
    Segment::new(video, start, end).map_err(|e| line_error(line, text, ParseErrorKind::Segment(e)))
}

/// Parses a qrel stream into a [`JudgmentPool`].
///
/// Exact duplicates of (query, video, start, end) are rejected with both
/// line numbers; everything else malformed is rejected with its line number
/// and offending text.
pub fn parse_qrel<I, S>(lines: I) -> Result<JudgmentPool, ParseError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut judgments = Vec::new();
    let mut seen: HashMap<(String, String, u64, u64), usize> = HashMap::new();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.as_ref();
        let lineno = idx + 1;
        if skip_line(line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(line_error(
                lineno,
                line,
                ParseErrorKind::FieldCount {
                    expected: 6,
                    found: fields.len(),
                },
            ));
        }
        let (query, _q0, video) = (fields[0], fields[1], fields[2]);
        let start = parse_time(fields[3], "start", lineno, line)?;
        let end = parse_time(fields[4], "end", lineno, line)?;
        let segment = parse_segment(video, start, end, lineno, line)?;
        let relevance: i64 = fields[5]
            .parse()
            .map_err(|_| line_error(lineno, line, ParseErrorKind::InvalidRelevance))?;

        let key = (
            query.to_string(),
            video.to_string(),
            start.to_bits(),
            end.to_bits(),
        );
        if let Some(&first_line) = seen.get(&key) {
            return Err(line_error(
                lineno,
                line,
                ParseErrorKind::DuplicateJudgment { first_line },
            ));
        }
        seen.insert(key, lineno);

        judgments.push(Judgment {
            query: query.to_string(),
            segment,
            relevant: relevance > 0,
        });
    }
    Ok(JudgmentPool::from_judgments(judgments))
}

/// Parses a ranking stream into one [`RankedList`] per query.
///
/// Query groups are emitted in first-appearance order; within each group
/// entries are re-sorted by descending score with a stable tie-break on
/// file order. The file's rank column does not drive ordering.
pub fn parse_run<I, S>(lines: I) -> Result<Vec<RankedList>, ParseError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<RunEntry>> = HashMap::new();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.as_ref();
        let lineno = idx + 1;
        if skip_line(line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(line_error(
                lineno,
                line,
                ParseErrorKind::FieldCount {
                    expected: 8,
                    found: fields.len(),
                },
            ));
        }
        let (query, _q0, video) = (fields[0], fields[1], fields[2]);
        let start = parse_time(fields[3], "start", lineno, line)?;
        let end = parse_time(fields[4], "end", lineno, line)?;
        let segment = parse_segment(video, start, end, lineno, line)?;
        let rank: u32 = fields[5]
            .parse()
            .map_err(|_| line_error(lineno, line, ParseErrorKind::InvalidRank))?;
        if rank == 0 {
            return Err(line_error(lineno, line, ParseErrorKind::InvalidRank));
        }
        let score: f64 = fields[6].parse().map_err(|_| {
            line_error(
                lineno,
                line,
                ParseErrorKind::InvalidNumber { field: "score" },
            )
        })?;
        if !score.is_finite() {
            return Err(line_error(lineno, line, ParseErrorKind::NonFiniteScore));
        }
        let entry =
            RunEntry::new(query, segment, rank, score, fields[7]).expect("fields validated above");

        if !groups.contains_key(query) {
            order.push(query.to_string());
        }
        groups.entry(query.to_string()).or_default().push(entry);
    }
    Ok(order
        .into_iter()
        .map(|q| {
            let entries = groups.remove(&q).unwrap();
            RankedList::new(q, entries)
        })
        .collect())
}

/// Serializes a pool back to the qrel format. Parsing the result yields an
/// identical pool.
pub fn write_qrel(pool: &JudgmentPool) -> String {
    let mut out = String::new();
    for query in pool.queries() {
        for (seg, relevant) in pool.get(query).unwrap().judged() {
            writeln!(
                out,
                "{} Q0 {} {} {} {}",
                query,
                seg.video(),
                seg.start(),
                seg.end(),
                u8::from(*relevant)
            )
            .unwrap();
        }
    }
    out
}

/// Serializes ranked lists back to the ranking format. Parsing the result
/// yields identical lists.
pub fn write_run(runs: &[RankedList]) -> String {
    let mut out = String::new();
    for run in runs {
        for e in run.entries() {
            writeln!(
                out,
                "{} Q0 {} {} {} {} {} {}",
                run.query(),
                e.segment().video(),
                e.segment().start(),
                e.segment().end(),
                e.rank(),
                e.score(),
                e.run_tag()
            )
            .unwrap();
        }
    }
    out
}

/// A query dropped during alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignWarning {
    /// Present in the run but has no judgments at all.
    UnjudgedQuery { query: String },
    /// Judged but never retrieved by the run.
    UnretrievedQuery { query: String },
}

impl fmt::Display for AlignWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignWarning::UnjudgedQuery { query } => {
                write!(f, "query \"{query}\" has results but no judgments; dropped")
            }
            AlignWarning::UnretrievedQuery { query } => {
                write!(f, "query \"{query}\" has judgments but no results; dropped")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignError {
    NoEvaluableQueries,
}

impl fmt::Display for AlignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignError::NoEvaluableQueries => {
                write!(
                    f,
                    "no evaluable queries: the qrel and the run share no query id"
                )
            }
        }
    }
}

impl std::error::Error for AlignError {}

/// The evaluable intersection of a pool and a run, in run-file
/// first-appearance order.
#[derive(Debug)]
pub struct Aligned<'a> {
    pub pairs: Vec<(&'a RankedList, &'a QueryJudgments)>,
    pub warnings: Vec<AlignWarning>,
}

impl Aligned<'_> {
    pub fn num_queries(&self) -> usize {
        self.pairs.len()
    }
}

/// Intersects the judged and retrieved query sets. Queries on only one side
/// are dropped with a warning; an empty intersection is fatal.
pub fn align<'a>(
    pool: &'a JudgmentPool,
    runs: &'a [RankedList],
) -> Result<Aligned<'a>, AlignError> {
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    let mut retrieved: HashSet<&str> = HashSet::new();
    for run in runs {
        retrieved.insert(run.query());
        match pool.get(run.query()) {
            Some(judgments) => pairs.push((run, judgments)),
            None => warnings.push(AlignWarning::UnjudgedQuery {
                query: run.query().to_string(),
            }),
        }
    }
    for query in pool.queries() {
        if !retrieved.contains(query) {
            warnings.push(AlignWarning::UnretrievedQuery {
                query: query.to_string(),
            });
        }
    }
    if pairs.is_empty() {
        return Err(AlignError::NoEvaluableQueries);
    }
    Ok(Aligned { pairs, warnings })
}
