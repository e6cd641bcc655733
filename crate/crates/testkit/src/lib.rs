//! Synthetic evaluation instances and an exhaustive scoring oracle.
//!
//! The generator builds small random qrel/run pairs that are deterministic
//! for a fixed seed and serializable through the ingest formats. The oracle
//! re-derives every measure with deliberately naive nested loops and
//! whole-timeline bin enumeration, sharing no scoring code with the main
//! pipeline, so the two can be compared measure for measure.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seg_eval_core::ingest::JudgmentPool;
use seg_eval_core::{Judgment, RankedList, RunEntry, Segment};

/// Parameters of a generated instance.
///
/// All ranges are inclusive `(lo, hi)` pairs and must be non-empty with
/// positive values; the timeline must be long enough to place the longest
/// segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub queries: usize,
    pub videos: usize,
    pub judgments_per_query: (usize, usize),
    pub results_per_query: (usize, usize),
    /// Segment length range in seconds.
    pub segment_len: (f64, f64),
    /// Length of each video's timeline in seconds.
    pub timeline: f64,
}

impl SyntheticSpec {
    fn validate(&self) {
        assert!(self.queries >= 1, "need at least one query");
        assert!(self.videos >= 1, "need at least one video");
        for (name, (lo, hi)) in [
            ("judgments_per_query", self.judgments_per_query),
            ("results_per_query", self.results_per_query),
        ] {
            assert!(
                lo >= 1 && lo <= hi,
                "{name} range must be non-empty and positive"
            );
        }
        let (lo, hi) = self.segment_len;
        assert!(
            lo > 0.0 && lo <= hi && hi.is_finite(),
            "segment_len range must be non-empty and positive"
        );
        assert!(
            self.timeline > hi,
            "timeline must be longer than the longest segment"
        );
    }
}

fn quantize(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Generates a qrel pool and per-query ranked lists. Deterministic for a
/// fixed seed; write-then-parse through the ingest formats reproduces the
/// returned structures exactly.
pub fn generate(spec: &SyntheticSpec) -> (JudgmentPool, Vec<RankedList>) {
    spec.validate();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut judgments = Vec::new();
    let mut runs = Vec::new();

    for q in 1..=spec.queries {
        let query = format!("q{q}");
        let segment = |rng: &mut ChaCha8Rng| loop {
            let video = format!("v{}", rng.gen_range(1..=spec.videos));
            let len = quantize(rng.gen_range(spec.segment_len.0..=spec.segment_len.1));
            let start = quantize(rng.gen_range(0.0..=spec.timeline - len));
            if let Ok(seg) = Segment::new(video, start, start + len) {
                return seg;
            }
            // quantization collapsed the interval; retry
        };

        let n_judgments = rng.gen_range(spec.judgments_per_query.0..=spec.judgments_per_query.1);
        let mut seen: HashSet<(String, u64, u64)> = HashSet::new();
        for _ in 0..n_judgments {
            // distinct (video, start, end) keeps the qrel free of duplicates
            let seg = loop {
                let seg = segment(&mut rng);
                let key = (
                    seg.video().to_string(),
                    seg.start().to_bits(),
                    seg.end().to_bits(),
                );
                if seen.insert(key) {
                    break seg;
                }
            };
            judgments.push(Judgment {
                query: query.clone(),
                segment: seg,
                relevant: rng.gen_bool(0.6),
            });
        }

        let n_results = rng.gen_range(spec.results_per_query.0..=spec.results_per_query.1);
        let entries = (0..n_results)
            .map(|i| {
                let seg = segment(&mut rng);
                // two-decimal scores make occasional ties, exercising the
                // stable tie-break
                let score = (rng.gen_range(0.0..1.0f64) * 100.0).round() / 100.0;
                RunEntry::new(&query, seg, (i + 1) as u32, score, "synth").unwrap()
            })
            .collect();
        runs.push(RankedList::new(query, entries));
    }
    (JudgmentPool::from_judgments(judgments), runs)
}

/// Per-query size cap the oracle enforces; nested-loop scoring is only
/// trusted on instances small enough to eyeball.
pub const ORACLE_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleError {
    pub query: String,
    pub results: usize,
    pub judgments: usize,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance too large for the oracle: query \"{}\" has {} results and {} judgments (limit {})",
            self.query, self.results, self.judgments, ORACLE_MAX
        )
    }
}

impl std::error::Error for OracleError {}

/// (measure, scope) → value. Counts are exact integers stored as f64.
pub type MeasureTable = BTreeMap<(String, String), f64>;

fn overlap(a: (&str, f64, f64), b: (&str, f64, f64)) -> bool {
    a.0 == b.0 && a.1.max(b.1) < a.2.min(b.2)
}

/// Finds the bin of `t` by scanning bin edges instead of dividing, as an
/// arithmetic route independent of the main path.
fn bin_of(t: f64, bin_size: f64, n_bins: usize) -> usize {
    for k in 0..=n_bins {
        if k as f64 * bin_size <= t && t < (k + 1) as f64 * bin_size {
            return k;
        }
    }
    n_bins + 1
}

struct FamilyStrings {
    relevant: Vec<bool>,
    judged: Vec<bool>,
    rel_total: usize,
}

#[allow(clippy::needless_range_loop)] // index loops are the point of the oracle
fn naive_precision(rel: &[bool], n: usize) -> f64 {
    let mut hits = 0;
    for i in 0..n.min(rel.len()) {
        if rel[i] {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

#[allow(clippy::needless_range_loop)]
fn naive_ap(rel: &[bool], rel_total: usize) -> f64 {
    if rel_total == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..rel.len() {
        if rel[i] {
            // recount the prefix from scratch every time
            let mut hits = 0;
            for j in 0..=i {
                if rel[j] {
                    hits += 1;
                }
            }
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    let ap = sum / rel_total as f64;
    if ap > 1.0 {
        1.0
    } else {
        ap
    }
}

/// Re-derives the full measure table (per-query and `all` scopes) by
/// exhaustive enumeration. Refuses queries with more than [`ORACLE_MAX`]
/// results or judgments.
pub fn oracle_evaluate(
    pool: &JudgmentPool,
    runs: &[RankedList],
    bin_size: f64,
    window: f64,
    precision_cutoffs: &[usize],
    judged_cutoffs: &[usize],
) -> Result<MeasureTable, OracleError> {
    let mut table = MeasureTable::new();

    // evaluable queries, in run order
    let mut evaluable: Vec<&RankedList> = Vec::new();
    for run in runs {
        if pool.get(run.query()).is_some() {
            evaluable.push(run);
        }
    }

    // rows accumulated per family suffix
    let suffixes = ["", "_bin", "_tol"];
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut means: BTreeMap<String, Vec<f64>> = BTreeMap::new();

    let mut videos_ret: Vec<String> = Vec::new();
    let mut videos_rel: Vec<String> = Vec::new();
    let mut ret_durations: Vec<f64> = Vec::new();
    let mut rel_durations: Vec<f64> = Vec::new();

    for run in &evaluable {
        let query = run.query().to_string();
        let judgments = pool.get(run.query()).unwrap();
        if run.len() > ORACLE_MAX || judgments.num_judged() > ORACLE_MAX {
            return Err(OracleError {
                query,
                results: run.len(),
                judgments: judgments.num_judged(),
            });
        }

        let results: Vec<(&str, f64, f64)> = run
            .entries()
            .iter()
            .map(|e| (e.segment().video(), e.segment().start(), e.segment().end()))
            .collect();
        let judged: Vec<((&str, f64, f64), bool)> = judgments
            .judged()
            .iter()
            .map(|(s, r)| ((s.video(), s.start(), s.end()), *r))
            .collect();
        let relevant: Vec<(&str, f64, f64)> =
            judged.iter().filter(|(_, r)| *r).map(|(s, _)| *s).collect();

        for (v, s, e) in &results {
            videos_ret.push(v.to_string());
            ret_durations.push(e - s);
        }
        for (v, s, e) in &relevant {
            videos_rel.push(v.to_string());
            rel_durations.push(e - s);
        }

        // --- overlap ---
        let ov = FamilyStrings {
            relevant: results
                .iter()
                .map(|r| relevant.iter().any(|g| overlap(*r, *g)))
                .collect(),
            judged: results
                .iter()
                .map(|r| judged.iter().any(|(g, _)| overlap(*r, *g)))
                .collect(),
            rel_total: relevant.len(),
        };

        // --- binned: enumerate bins over the whole timeline ---
        let mut t_max: f64 = 0.0;
        for (_, _, e) in results.iter().chain(judged.iter().map(|(s, _)| s)) {
            t_max = t_max.max(*e);
        }
        let n_bins = (t_max / bin_size).ceil() as usize + 1;
        let mut rel_bins: HashSet<(String, usize)> = HashSet::new();
        let mut jud_bins: HashSet<(String, usize)> = HashSet::new();
        for k in 0..=n_bins {
            for ((v, s, _), r) in &judged {
                if k as f64 * bin_size <= *s && *s < (k + 1) as f64 * bin_size {
                    jud_bins.insert((v.to_string(), k));
                    if *r {
                        rel_bins.insert((v.to_string(), k));
                    }
                }
            }
        }
        let mut bin_rel: Vec<bool> = Vec::new();
        let mut bin_jud: Vec<bool> = Vec::new();
        let mut occupied: Vec<(String, usize)> = Vec::new();
        for (v, s, _) in &results {
            let key = (v.to_string(), bin_of(*s, bin_size, n_bins));
            if occupied.contains(&key) {
                continue;
            }
            bin_rel.push(rel_bins.contains(&key));
            bin_jud.push(jud_bins.contains(&key));
            occupied.push(key);
        }
        let bn = FamilyStrings {
            relevant: bin_rel,
            judged: bin_jud,
            rel_total: rel_bins.len(),
        };

        // --- tolerance ---
        let mut credited = vec![false; relevant.len()];
        let mut tol_rel = Vec::new();
        let mut tol_jud = Vec::new();
        for (v, s, _) in &results {
            let w = (*v, *s, s + window);
            let mut hit = false;
            for (i, g) in relevant.iter().enumerate() {
                if overlap(w, *g) && !credited[i] {
                    hit = true;
                }
            }
            if hit {
                for (i, g) in relevant.iter().enumerate() {
                    if overlap(w, *g) {
                        credited[i] = true;
                    }
                }
            }
            tol_rel.push(hit);
            tol_jud.push(judged.iter().any(|(g, _)| overlap(w, *g)));
        }
        let tol = FamilyStrings {
            relevant: tol_rel,
            judged: tol_jud,
            rel_total: relevant.len(),
        };

        // --- per-query rows ---
        for (suffix, fam) in suffixes.iter().zip([&ov, &bn, &tol]) {
            let rel_ret = fam.relevant.iter().filter(|r| **r).count();
            let rows: Vec<(String, f64)> = {
                let mut rows = vec![
                    (format!("num_rel{suffix}"), fam.rel_total as f64),
                    (format!("num_ret{suffix}"), fam.relevant.len() as f64),
                    (format!("num_rel_ret{suffix}"), rel_ret as f64),
                    (
                        format!("map{suffix}"),
                        naive_ap(&fam.relevant, fam.rel_total),
                    ),
                ];
                for &n in precision_cutoffs {
                    rows.push((format!("P_{n}{suffix}"), naive_precision(&fam.relevant, n)));
                }
                for &n in judged_cutoffs {
                    rows.push((
                        format!("Judged_{n}{suffix}"),
                        naive_precision(&fam.judged, n),
                    ));
                }
                rows
            };
            for (name, value) in rows {
                table.insert((name.clone(), query.clone()), value);
                if name.starts_with("num_") {
                    *sums.entry(name).or_insert(0.0) += value;
                } else {
                    means.entry(name).or_default().push(value);
                }
            }
        }
    }

    if evaluable.is_empty() {
        return Ok(table);
    }

    let num_q = evaluable.len() as f64;
    table.insert(("num_q".into(), "all".into()), num_q);
    let distinct = |v: &[String]| {
        let mut set: Vec<&String> = Vec::new();
        for x in v {
            if !set.contains(&x) {
                set.push(x);
            }
        }
        set.len() as f64
    };
    table.insert(("videos_ret".into(), "all".into()), distinct(&videos_ret));
    table.insert(("videos_rel".into(), "all".into()), distinct(&videos_rel));
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    table.insert(("avglength_ret".into(), "all".into()), mean(&ret_durations));
    table.insert(("avglength_rel".into(), "all".into()), mean(&rel_durations));
    for (name, total) in sums {
        table.insert((name, "all".into()), total);
    }
    for (name, values) in means {
        table.insert((name, "all".into()), mean(&values));
    }
    Ok(table)
}
