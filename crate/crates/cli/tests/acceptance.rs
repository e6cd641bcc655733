//! Acceptance suite. Each test covers one release criterion and prints a
//! PASS line (visible with `--nocapture`); a failure names its criterion.
//!
//! Run with: cargo test -p seg-eval --test acceptance

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use seg_eval_core::eval::{evaluate, EvalConfig, Evaluation};
use seg_eval_core::ingest::parse_qrel;
use seg_eval_core::mapping::{
    map_binned, map_overlap, map_tolerance, BinConfig, JudgedItem, JudgedRanking, ToleranceConfig,
};
use seg_eval_core::metrics::{average_precision, precision_at};
use seg_eval_core::{RankedList, RunEntry, Segment};
use seg_eval_testkit::{generate, oracle_evaluate, SyntheticSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seg-eval"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// The 35 `all` rows of the default report, in order.
fn expected_measures() -> Vec<String> {
    let mut names = vec![
        "num_q".to_string(),
        "videos_ret".into(),
        "videos_rel".into(),
        "avglength_ret".into(),
        "avglength_rel".into(),
    ];
    for suffix in ["", "_bin", "_tol"] {
        names.push(format!("num_rel{suffix}"));
        names.push(format!("num_ret{suffix}"));
        names.push(format!("num_rel_ret{suffix}"));
        names.push(format!("map{suffix}"));
        for n in [5, 10, 20] {
            names.push(format!("P_{n}{suffix}"));
        }
        for n in [10, 20, 30] {
            names.push(format!("Judged_{n}{suffix}"));
        }
    }
    names
}

fn is_count_measure(name: &str) -> bool {
    name.starts_with("num_") || name.starts_with("videos_") || name.starts_with("avglength_")
}

#[test]
fn criterion_1_format_fidelity() {
    let started = Instant::now();
    let out = bin()
        .arg(data("sample.qrel"))
        .arg(data("sample.run"))
        .output()
        .expect("criterion 1 FAIL: could not spawn seg-eval");
    let elapsed = started.elapsed();
    assert!(out.status.success(), "criterion 1 FAIL: non-zero exit");

    let stdout = String::from_utf8(out.stdout).expect("criterion 1 FAIL: stdout not UTF-8");
    let rows: Vec<&str> = stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 35, "criterion 1 FAIL: expected 35 measure rows");

    let expected = expected_measures();
    for (row, want) in rows.iter().zip(&expected) {
        let cols: Vec<&str> = row.split('\t').collect();
        assert_eq!(
            cols.len(),
            3,
            "criterion 1 FAIL: not 3 TAB-separated columns: {row:?}"
        );
        assert_eq!(&cols[0], want, "criterion 1 FAIL: wrong measure order");
        assert_eq!(cols[1], "all", "criterion 1 FAIL: scope must be all");
        let value = cols[2];
        if is_count_measure(want) {
            assert!(
                !value.is_empty() && value.bytes().all(|b| b.is_ascii_digit()),
                "criterion 1 FAIL: count {want} not a plain integer: {value:?}"
            );
        } else {
            let (int, frac) = value.split_once('.').unwrap_or_else(|| {
                panic!("criterion 1 FAIL: real {want} without decimals: {value:?}")
            });
            assert!(
                !int.is_empty()
                    && int.bytes().all(|b| b.is_ascii_digit())
                    && frac.len() == 4
                    && frac.bytes().all(|b| b.is_ascii_digit()),
                "criterion 1 FAIL: real {want} not 4-decimal: {value:?}"
            );
        }
    }
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 1 FAIL: runtime {elapsed:?} >= 1 s"
    );
    println!("acceptance criterion 1 (format fidelity, 35 rows, <1s): PASS ({elapsed:?})");
}

fn run_of(segments: &[(&str, f64, f64)]) -> RankedList {
    let n = segments.len();
    let entries = segments
        .iter()
        .enumerate()
        .map(|(i, (v, s, e))| {
            RunEntry::new(
                "q1",
                Segment::new(*v, *s, *e).unwrap(),
                (i + 1) as u32,
                (n - i) as f64,
                "fixture",
            )
            .unwrap()
        })
        .collect();
    RankedList::new("q1", entries)
}

#[test]
fn criterion_2_figure_fixtures() {
    // Overlap topology: results 2 and 4 overlap the same relevant segment
    // and are both counted (multiple counting).
    let pool = parse_qrel(["q1 Q0 v1 100 200 1"]).unwrap();
    let qj = pool.get("q1").unwrap();
    let run = run_of(&[
        ("v1", 0.0, 50.0),
        ("v1", 90.0, 120.0),
        ("v1", 210.0, 250.0),
        ("v1", 150.0, 260.0),
    ]);
    let jr = map_overlap(&run, qj);
    assert_eq!(
        jr.relevance_string(),
        vec![0, 1, 0, 1],
        "criterion 2 FAIL: overlap topology"
    );
    assert!(jr.items()[1].relevant && jr.items()[3].relevant);

    // Binned topology: results 1 and 3 merge into a non-relevant bin,
    // results 2 and 4 merge into a relevant bin → 0,1 after merging.
    let pool = parse_qrel(["q1 Q0 v1 100 130 1"]).unwrap();
    let qj = pool.get("q1").unwrap();
    let run = run_of(&[
        ("v1", 10.0, 40.0),
        ("v1", 70.0, 110.0),
        ("v1", 30.0, 55.0),
        ("v1", 95.0, 140.0),
    ]);
    let jr = map_binned(&run, qj, &BinConfig::new(60.0).unwrap());
    assert_eq!(
        jr.relevance_string(),
        vec![0, 1],
        "criterion 2 FAIL: binned topology"
    );

    // Tolerance topology: miss, fresh hit, already seen, already seen
    // → 0,1,0,0.
    let pool = parse_qrel(["q1 Q0 v1 100 120 1"]).unwrap();
    let qj = pool.get("q1").unwrap();
    let run = run_of(&[
        ("v1", 0.0, 50.0),
        ("v1", 95.0, 130.0),
        ("v1", 110.0, 140.0),
        ("v1", 98.0, 105.0),
    ]);
    let jr = map_tolerance(&run, qj, &ToleranceConfig::new(10.0).unwrap());
    assert_eq!(
        jr.relevance_string(),
        vec![0, 1, 0, 0],
        "criterion 2 FAIL: tolerance topology"
    );

    println!("acceptance criterion 2 (figure-topology fixtures): PASS");
}

fn ranking_of(bits: &[u8], rel_total: usize) -> JudgedRanking {
    let items = bits
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let start = i as f64 * 10.0;
            JudgedItem {
                entry: RunEntry::new(
                    "q1",
                    Segment::new("v1", start, start + 5.0).unwrap(),
                    (i + 1) as u32,
                    -(i as f64),
                    "t",
                )
                .unwrap(),
                relevant: b == 1,
                judged: true,
            }
        })
        .collect();
    JudgedRanking::new("q1", items, rel_total)
}

#[test]
fn criterion_3_formula_checks() {
    let p5 = precision_at(&ranking_of(&[1, 1, 0, 1, 0], 3), 5);
    assert_eq!(
        format!("{p5:.4}"),
        "0.6000",
        "criterion 3 FAIL: P@5 on 1,1,0,1,0"
    );

    let ap = average_precision(&ranking_of(&[1, 0, 1], 2));
    assert!(
        (ap - 0.8333).abs() <= 5e-5,
        "criterion 3 FAIL: AP on 1,0,1 with rel_total 2 was {ap}"
    );

    println!("acceptance criterion 3 (P@5 = 0.6000, AP = 0.8333 ±5e-5): PASS");
}

fn sweep_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        seed,
        queries: 1 + (seed as usize % 4),
        videos: 2 + (seed as usize % 3),
        judgments_per_query: (1, 8),
        results_per_query: (1, 8),
        segment_len: (5.0, 90.0),
        timeline: 600.0,
    }
}

const SWEEP_BINS: [f64; 3] = [30.0, 60.0, 300.0];
const SWEEP_WINDOWS: [f64; 3] = [5.0, 10.0, 60.0];

fn sweep_config(bin_size: f64, window: f64) -> EvalConfig {
    EvalConfig {
        bin: BinConfig::new(bin_size).unwrap(),
        tolerance: ToleranceConfig::new(window).unwrap(),
        ..EvalConfig::default()
    }
}

struct Flat {
    name: String,
    scope: String,
    value: f64,
    exact: bool,
}

/// Every measure of an evaluation as unformatted numbers, per-query rows
/// included, using the oracle's (measure, scope) naming.
fn flatten(ev: &Evaluation, cfg: &EvalConfig) -> Vec<Flat> {
    let mut rows = Vec::new();
    let mut push = |name: String, scope: &str, value: f64, exact: bool| {
        rows.push(Flat {
            name,
            scope: scope.to_string(),
            value,
            exact,
        });
    };
    let family = |push: &mut dyn FnMut(String, &str, f64, bool),
                  fam: &seg_eval_core::metrics::FamilyScores,
                  suffix: &str,
                  scope: &str| {
        push(format!("num_rel{suffix}"), scope, fam.num_rel as f64, true);
        push(format!("num_ret{suffix}"), scope, fam.num_ret as f64, true);
        push(
            format!("num_rel_ret{suffix}"),
            scope,
            fam.num_rel_ret as f64,
            true,
        );
        push(format!("map{suffix}"), scope, fam.map, false);
        for (n, v) in cfg.precision_cutoffs.iter().zip(&fam.precision) {
            push(format!("P_{n}{suffix}"), scope, *v, false);
        }
        for (n, v) in cfg.judged_cutoffs.iter().zip(&fam.judged) {
            push(format!("Judged_{n}{suffix}"), scope, *v, false);
        }
    };

    for qs in &ev.per_query {
        family(&mut push, &qs.base, "", &qs.query);
        family(&mut push, &qs.bin, "_bin", &qs.query);
        family(&mut push, &qs.tol, "_tol", &qs.query);
    }
    let agg = &ev.aggregate;
    push("num_q".into(), "all", agg.num_q as f64, true);
    push("videos_ret".into(), "all", agg.videos_ret as f64, true);
    push("videos_rel".into(), "all", agg.videos_rel as f64, true);
    push("avglength_ret".into(), "all", agg.avglength_ret, false);
    push("avglength_rel".into(), "all", agg.avglength_rel, false);
    family(&mut push, &agg.base, "", "all");
    family(&mut push, &agg.bin, "_bin", "all");
    family(&mut push, &agg.tol, "_tol", "all");
    rows
}

#[test]
fn criterion_4_oracle_equivalence() {
    let started = Instant::now();
    let mut compared = 0usize;
    for seed in 0..200u64 {
        let (pool, runs) = generate(&sweep_spec(seed));
        for bs in SWEEP_BINS {
            for window in SWEEP_WINDOWS {
                let cfg = sweep_config(bs, window);
                let ev = evaluate(&pool, &runs, &cfg)
                    .unwrap_or_else(|e| panic!("criterion 4 FAIL: seed {seed}: {e}"));
                let oracle = oracle_evaluate(
                    &pool,
                    &runs,
                    bs,
                    window,
                    &cfg.precision_cutoffs,
                    &cfg.judged_cutoffs,
                )
                .unwrap_or_else(|e| panic!("criterion 4 FAIL: seed {seed}: {e}"));

                let flat = flatten(&ev, &cfg);
                assert_eq!(
                    flat.len(),
                    oracle.len(),
                    "criterion 4 FAIL: seed {seed} bs {bs} window {window}: row sets differ"
                );
                for row in &flat {
                    let want = *oracle
                        .get(&(row.name.clone(), row.scope.clone()))
                        .unwrap_or_else(|| {
                            panic!(
                                "criterion 4 FAIL: oracle missing {}/{} (seed {seed})",
                                row.name, row.scope
                            )
                        });
                    if row.exact {
                        assert!(
                            row.value == want,
                            "criterion 4 FAIL: {}/{} seed {seed} bs {bs} window {window}: {} vs oracle {}",
                            row.name, row.scope, row.value, want
                        );
                    } else {
                        assert!(
                            (row.value - want).abs() <= 1e-9,
                            "criterion 4 FAIL: {}/{} seed {seed} bs {bs} window {window}: {} vs oracle {}",
                            row.name, row.scope, row.value, want
                        );
                    }
                    compared += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "criterion 4 FAIL: runtime {elapsed:?} >= 30 s"
    );
    println!(
        "acceptance criterion 4 (200 seeded instances x 9 configs vs oracle, {compared} values): PASS ({elapsed:?})"
    );
}

#[test]
fn criterion_5_consistency_identities() {
    let mut instances = 0usize;
    for seed in 0..200u64 {
        let (pool, runs) = generate(&sweep_spec(seed));
        for bs in SWEEP_BINS {
            for window in SWEEP_WINDOWS {
                let cfg = sweep_config(bs, window);
                let ev = evaluate(&pool, &runs, &cfg).unwrap();
                let agg = &ev.aggregate;
                let ctx = format!("seed {seed} bs {bs} window {window}");

                assert_eq!(
                    agg.tol.num_rel, agg.base.num_rel,
                    "criterion 5 FAIL: num_rel_tol != num_rel ({ctx})"
                );
                assert!(
                    agg.bin.num_ret <= agg.base.num_ret,
                    "criterion 5 FAIL: num_ret_bin > num_ret ({ctx})"
                );
                assert!(
                    agg.bin.num_rel <= agg.base.num_rel,
                    "criterion 5 FAIL: num_rel_bin > num_rel ({ctx})"
                );
                assert!(
                    agg.tol.num_rel_ret <= agg.tol.num_rel,
                    "criterion 5 FAIL: num_rel_ret_tol > num_rel_tol ({ctx})"
                );

                let unit = |v: f64| (0.0..=1.0).contains(&v);
                for qs in &ev.per_query {
                    assert!(
                        qs.tol.num_rel_ret <= qs.base.num_rel,
                        "criterion 5 FAIL: query {} tolerance credits exceed |R_q| ({ctx})",
                        qs.query
                    );
                    for fam in [&qs.base, &qs.bin, &qs.tol] {
                        assert!(unit(fam.map), "criterion 5 FAIL: map out of [0,1] ({ctx})");
                        assert!(fam.precision.iter().all(|v| unit(*v)));
                        assert!(fam.judged.iter().all(|v| unit(*v)));
                    }
                }
                for fam in [&agg.base, &agg.bin, &agg.tol] {
                    assert!(
                        unit(fam.map),
                        "criterion 5 FAIL: mean map out of [0,1] ({ctx})"
                    );
                    assert!(fam.precision.iter().all(|v| unit(*v)));
                    assert!(fam.judged.iter().all(|v| unit(*v)));
                }
                instances += 1;
            }
        }
    }
    println!("acceptance criterion 5 (consistency identities on {instances} instances): PASS");
}

#[test]
fn criterion_6_byte_identical_determinism() {
    // A workload big enough for real fan-out across queries.
    let spec = SyntheticSpec {
        seed: 42,
        queries: 40,
        videos: 6,
        judgments_per_query: (2, 12),
        results_per_query: (5, 40),
        segment_len: (5.0, 90.0),
        timeline: 1800.0,
    };
    let (pool, runs) = generate(&spec);
    let dir = tempfile::tempdir().unwrap();
    let qrel = dir.path().join("d.qrel");
    let run = dir.path().join("d.run");
    std::fs::write(&qrel, seg_eval_core::ingest::write_qrel(&pool)).unwrap();
    std::fs::write(&run, seg_eval_core::ingest::write_run(&runs)).unwrap();

    for extra in [&[][..], &["-q"][..], &["--format", "json", "-q"][..]] {
        let outputs: Vec<Vec<u8>> = ["1", "8", ""]
            .iter()
            .map(|threads| {
                let mut cmd = bin();
                cmd.arg(&qrel).arg(&run).args(extra);
                if !threads.is_empty() {
                    cmd.env("RAYON_NUM_THREADS", threads);
                }
                let out = cmd.output().expect("criterion 6 FAIL: spawn");
                assert!(out.status.success(), "criterion 6 FAIL: non-zero exit");
                out.stdout
            })
            .collect();
        assert!(
            outputs[0] == outputs[1] && outputs[1] == outputs[2],
            "criterion 6 FAIL: stdout differs across thread counts (args {extra:?})"
        );
        assert!(!outputs[0].is_empty());
    }
    println!("acceptance criterion 6 (byte-identical stdout across parallelism): PASS");
}
