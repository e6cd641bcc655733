//! seg-eval: trec_eval-style evaluation for segment-based retrieval runs.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use seg_eval_core::eval::{evaluate, EvalConfig, EvalError};
use seg_eval_core::ingest::{parse_qrel, parse_run};
use seg_eval_core::mapping::{BinConfig, ToleranceConfig};
use seg_eval_core::report::{build_rows, render_json, render_tsv};

const FORMAT_HELP: &str = "\
FILE FORMATS:
  Both files are UTF-8 with whitespace-separated fields; blank lines and
  lines starting with '#' are skipped. Times are decimal seconds (formats
  such as mm.ss are not supported). The second column is the literal
  placeholder Q0.

  qrel:     <query> Q0 <video> <start> <end> <relevance>
            relevance is an integer: >0 counts as relevant (clamped to 1),
            0 as judged non-relevant, <0 is clamped to 0.

  ranking:  <query> Q0 <video> <start> <end> <rank> <score> <run_tag>
            entries are ordered by descending score (ties keep file order);
            the rank column is carried for diagnostics only.

EXIT CODES:
  0  success
  1  alignment warnings elevated by --strict
  2  usage error (bad flags, unreadable file)
  3  parse error in the qrel or ranking file
  4  no evaluable queries (qrel and ranking share no query id)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

/// Scores a segment-based retrieval run against segment relevance
/// judgments. Every query is evaluated under three judgment-adaptation
/// models at once — overlap, fixed-width start-time bins, and a
/// tolerance-to-irrelevance watching window — and standard binary measures
/// (P_n, map, Judged_n, count statistics) are reported for each family in
/// three tab-separated columns.
#[derive(Debug, Parser)]
#[command(name = "seg-eval", version, after_help = FORMAT_HELP)]
struct Args {
    /// Relevance judgment (qrel) file
    qrel: PathBuf,

    /// System result (ranking) file
    ranking: PathBuf,

    /// Bin width in seconds for the binned relevance family
    #[arg(long, default_value_t = 60.0, value_parser = positive_seconds)]
    bin_size: f64,

    /// Watched-window length in seconds for the tolerance family
    #[arg(long, default_value_t = 10.0, value_parser = positive_seconds)]
    tolerance: f64,

    /// Cutoffs for the P_n rows (comma separated, strictly increasing)
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    precision_cutoffs: Vec<usize>,

    /// Cutoffs for the Judged_n rows (comma separated, strictly increasing)
    #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
    judged_cutoffs: Vec<usize>,

    /// Also print per-query rows (before the `all` rows)
    #[arg(short = 'q', long)]
    per_query: bool,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Treat alignment warnings (queries dropped from one side) as errors
    #[arg(long)]
    strict: bool,
}

fn positive_seconds(raw: &str) -> Result<f64, String> {
    let v: f64 = raw.parse().map_err(|_| "not a number".to_string())?;
    if !v.is_finite() {
        return Err("must be finite".to_string());
    }
    if v <= 0.0 {
        return Err("must be strictly positive".to_string());
    }
    Ok(v)
}

enum Failure {
    Usage(String),
    Parse(String),
    NoQueries,
    Strict(usize),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Strict(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Parse(_) => 3,
            Failure::NoQueries => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(msg) | Failure::Parse(msg) => msg.clone(),
            Failure::NoQueries => {
                "no evaluable queries: the qrel and the ranking share no query id".to_string()
            }
            Failure::Strict(n) => {
                format!("{n} alignment warning(s) treated as errors by --strict")
            }
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn run(args: &Args) -> Result<(), Failure> {
    let cfg = EvalConfig {
        bin: BinConfig::new(args.bin_size)
            .map_err(|e| Failure::Usage(format!("--bin-size {e}")))?,
        tolerance: ToleranceConfig::new(args.tolerance)
            .map_err(|e| Failure::Usage(format!("--tolerance {e}")))?,
        precision_cutoffs: args.precision_cutoffs.clone(),
        judged_cutoffs: args.judged_cutoffs.clone(),
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let qrel_text = read(&args.qrel)?;
    let run_text = read(&args.ranking)?;
    let pool = parse_qrel(qrel_text.lines())
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.qrel.display())))?;
    let runs = parse_run(run_text.lines())
        .map_err(|e| Failure::Parse(format!("{}: {e}", args.ranking.display())))?;

    let evaluation = evaluate(&pool, &runs, &cfg).map_err(|e| match e {
        EvalError::NoEvaluableQueries => Failure::NoQueries,
        EvalError::InvalidCutoffs(msg) => Failure::Usage(msg),
    })?;

    for warning in &evaluation.warnings {
        eprintln!("warning: {warning}");
    }
    if args.strict && !evaluation.warnings.is_empty() {
        return Err(Failure::Strict(evaluation.warnings.len()));
    }

    let rows = build_rows(&evaluation, &cfg, args.per_query);
    match args.format {
        Format::Tsv => {
            let mut header = String::from("# seg-eval");
            write!(header, " bin_size={}", args.bin_size).unwrap();
            write!(header, " tolerance={}", args.tolerance).unwrap();
            let join = |xs: &[usize]| {
                xs.iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            write!(
                header,
                " precision_cutoffs={}",
                join(&args.precision_cutoffs)
            )
            .unwrap();
            write!(header, " judged_cutoffs={}", join(&args.judged_cutoffs)).unwrap();
            println!("{header}");
            print!("{}", render_tsv(&rows));
        }
        Format::Json => print!("{}", render_json(&rows)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("seg-eval: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
