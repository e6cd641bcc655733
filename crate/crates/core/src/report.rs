//! Three-column report rendering.
//!
//! Rows are `measure<TAB>scope<TAB>value`. Real-valued measures carry
//! exactly four decimal places, counts are plain integers, the scope is a
//! query id or the literal `all`. Row order is fixed: the base measure
//! family, then the `_bin` family, then the `_tol` family; per-query rows
//! (when requested) precede the `all` rows, grouped by query in evaluation
//! order.

use crate::eval::{EvalConfig, Evaluation};
use crate::metrics::FamilyScores;

/// A rendered measurement value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Count(u64),
    Real(f64),
}

impl Value {
    /// The exact string that lands in the third column.
    pub fn formatted(&self) -> String {
        match self {
            Value::Count(c) => c.to_string(),
            Value::Real(r) => format!("{r:.4}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Count(c) => serde_json::Value::from(*c),
            Value::Real(r) => {
                // Same 4-decimal rounding as the tsv column.
                let rounded = (r * 10_000.0).round() / 10_000.0;
                serde_json::Value::from(rounded)
            }
        }
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub measure: String,
    pub scope: String,
    pub value: Value,
}

fn row(measure: impl Into<String>, scope: &str, value: Value) -> ReportRow {
    ReportRow {
        measure: measure.into(),
        scope: scope.to_string(),
        value,
    }
}

/// Pushes one family's rows: counts, map, P_n, Judged_n, in listing order.
fn family_rows(
    out: &mut Vec<ReportRow>,
    family: &FamilyScores,
    suffix: &str,
    scope: &str,
    cfg: &EvalConfig,
) {
    out.push(row(
        format!("num_rel{suffix}"),
        scope,
        Value::Count(family.num_rel),
    ));
    out.push(row(
        format!("num_ret{suffix}"),
        scope,
        Value::Count(family.num_ret),
    ));
    out.push(row(
        format!("num_rel_ret{suffix}"),
        scope,
        Value::Count(family.num_rel_ret),
    ));
    out.push(row(format!("map{suffix}"), scope, Value::Real(family.map)));
    for (n, v) in cfg.precision_cutoffs.iter().zip(&family.precision) {
        out.push(row(format!("P_{n}{suffix}"), scope, Value::Real(*v)));
    }
    for (n, v) in cfg.judged_cutoffs.iter().zip(&family.judged) {
        out.push(row(format!("Judged_{n}{suffix}"), scope, Value::Real(*v)));
    }
}

/// Builds the ordered rows for an evaluation. With `per_query`, each
/// query's rows come first (in evaluation order), then the `all` rows.
pub fn build_rows(ev: &Evaluation, cfg: &EvalConfig, per_query: bool) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    if per_query {
        for qs in &ev.per_query {
            family_rows(&mut rows, &qs.base, "", &qs.query, cfg);
            family_rows(&mut rows, &qs.bin, "_bin", &qs.query, cfg);
            family_rows(&mut rows, &qs.tol, "_tol", &qs.query, cfg);
        }
    }
    let agg = &ev.aggregate;
    rows.push(row("num_q", "all", Value::Count(agg.num_q)));
    rows.push(row("videos_ret", "all", Value::Count(agg.videos_ret)));
    rows.push(row("videos_rel", "all", Value::Count(agg.videos_rel)));
    rows.push(row(
        "avglength_ret",
        "all",
        Value::Count(agg.avglength_ret.round() as u64),
    ));
    rows.push(row(
        "avglength_rel",
        "all",
        Value::Count(agg.avglength_rel.round() as u64),
    ));
    family_rows(&mut rows, &agg.base, "", "all", cfg);
    family_rows(&mut rows, &agg.bin, "_bin", "all", cfg);
    family_rows(&mut rows, &agg.tol, "_tol", "all", cfg);
    rows
}

/// Tab-separated rendering, one row per line.
pub fn render_tsv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&r.measure);
        out.push('\t');
        out.push_str(&r.scope);
        out.push('\t');
        out.push_str(&r.value.formatted());
        out.push('\n');
    }
    out
}

/// JSON rendering: measure → scope → numeric value, keys in row order.
pub fn render_json(rows: &[ReportRow]) -> String {
    let mut doc = serde_json::Map::new();
    for r in rows {
        let scopes = doc
            .entry(r.measure.clone())
            .or_insert_with(|| serde_json::Value::Object(serde_json::Map::new()));
        scopes
            .as_object_mut()
            .unwrap()
            .insert(r.scope.clone(), r.value.json());
    }
    let mut out = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap();
    out.push('\n');
    out
}
