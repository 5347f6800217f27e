//! Text, CSV, and JSON renderings of the library's results.
//!
//! CSV output starts with a `# coconvex schema N` line followed by a header
//! row; JSON documents carry `schema_version` and `kind` fields. Big
//! integers are written as decimal strings in JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use coconvex_core::expectation::{MonteCarlo, TrendRow};
use coconvex_core::extremal::{BoundRow, ExtremalResult, SearchReport};
use coconvex_core::metrics::DistanceReport;
use coconvex_core::CountTable;
use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

pub fn csv_table<R, S>(header: &[&str], rows: R) -> Result<String>
where
    R: IntoIterator<Item = Vec<S>>,
    S: AsRef<str>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref))?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    let body = String::from_utf8(bytes).expect("csv output is UTF-8");
    Ok(format!("# coconvex schema {SCHEMA_VERSION}\n{body}"))
}

pub fn json_doc(kind: &str, body: Value) -> String {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "kind": kind });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

fn opt_json<T: ToString>(v: &Option<T>) -> Value {
    v.as_ref().map_or(Value::Null, |x| Value::String(x.to_string()))
}

fn big(v: &BigUint) -> Value {
    Value::String(v.to_string())
}

pub fn count_table(table: &CountTable, format: Format) -> Result<String> {
    let n = table.n();
    Ok(match format {
        Format::Text => {
            let mut s = format!("n = {n}\n{:>3} {:>4} {:>11} count\n", "k", "ell", "nontrivial");
            for (k, ell, nt, c) in table.rows() {
                writeln!(s, "{k:>3} {ell:>4} {:>11} {c}", if nt { "yes" } else { "no" }).unwrap();
            }
            writeln!(s, "total = {}\nnontrivial = {}", table.total(), table.total_nontrivial()).unwrap();
            s
        }
        Format::Csv => csv_table(
            &["n", "k", "ell", "nontrivial", "count"],
            table
                .rows()
                .map(|(k, ell, nt, c)| vec![n.to_string(), k.to_string(), ell.to_string(), nt.to_string(), c.to_string()]),
        )?,
        Format::Json => json_doc(
            "count_table",
            json!({
                "n": n,
                "total": big(&table.total()),
                "total_nontrivial": big(&table.total_nontrivial()),
                "rows": table.rows().map(|(k, ell, nt, c)| json!({
                    "k": k, "ell": ell, "nontrivial": nt, "count": big(c)
                })).collect::<Vec<_>>(),
            }),
        ),
    })
}

pub fn distance_report(r: &DistanceReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => {
            let mut s = format!("n = {}\n{:>3} {:>12} d_k\n", r.n, "k", "shared");
            for (k, shared, d) in &r.per_k {
                writeln!(s, "{k:>3} {shared:>12} {d}").unwrap();
            }
            writeln!(s, "d = {}\nrf = {}\nquartet = {}", r.d_total, r.rf, r.quartet).unwrap();
            s
        }
        Format::Csv => csv_table(
            &["k", "shared", "dk"],
            r.per_k.iter().map(|(k, s, d)| vec![k.to_string(), s.to_string(), d.to_string()]),
        )?,
        Format::Json => json_doc(
            "distance_report",
            json!({
                "n": r.n,
                "per_k": r.per_k.iter().map(|(k, s, d)| json!({"k": k, "shared": big(s), "dk": big(d)})).collect::<Vec<_>>(),
                "d": big(&r.d_total),
                "rf": r.rf,
                "quartet": r.quartet,
            }),
        ),
    })
}

/// A single named number, such as one distance.
pub fn scalar(kind: &str, value: &str, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => format!("{value}\n"),
        Format::Csv => csv_table(&[kind], [vec![value]])?,
        Format::Json => json_doc(kind, json!({ "value": value })),
    })
}

pub fn matrix(names: &[String], values: &[Vec<BigUint>], format: Format) -> Result<String> {
    let mut header = vec!["tree"];
    header.extend(names.iter().map(String::as_str));
    Ok(match format {
        Format::Json => json_doc(
            "distance_matrix",
            json!({
                "trees": names,
                "values": values.iter().map(|r| r.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        ),
        _ => csv_table(
            &header,
            names.iter().zip(values).map(|(name, row)| {
                let mut out = vec![name.clone()];
                out.extend(row.iter().map(BigUint::to_string));
                out
            }),
        )?,
    })
}

fn result_json(r: &ExtremalResult) -> Value {
    json!({
        "n": r.n,
        "k": r.k,
        "value": big(&r.value),
        "witness_count": r.witness_count,
        "witnesses": r.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "search_space": r.search_space,
    })
}

pub fn extremal_result(r: &ExtremalResult, format: Format) -> Result<String> {
    let name = match r.k {
        Some(k) => format!("c_{{{},{k}}}", r.n),
        None => format!("c_{}", r.n),
    };
    Ok(match format {
        Format::Text => {
            let mut s = format!(
                "{name} = {}\nminimizers: {} of {} canonical caterpillars\n",
                r.value, r.witness_count, r.search_space
            );
            for w in &r.witnesses {
                writeln!(s, "  {w}").unwrap();
            }
            s
        }
        Format::Csv => csv_table(
            &["n", "k", "value", "witness_count", "search_space"],
            [vec![
                r.n.to_string(),
                opt(&r.k),
                r.value.to_string(),
                r.witness_count.to_string(),
                r.search_space.to_string(),
            ]],
        )?,
        Format::Json => json_doc("extremal", result_json(r)),
    })
}

pub fn search_report(r: &SearchReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => {
            let mut s = String::new();
            for row in &r.per_k {
                writeln!(s, "c_{{{},{}}} = {} ({} minimizers)", r.n, row.k.unwrap_or(0), row.value, row.witness_count)
                    .unwrap();
            }
            writeln!(s, "c_{} = {} ({} minimizers)", r.n, r.total.value, r.total.witness_count).unwrap();
            s
        }
        Format::Csv => csv_table(
            &["n", "k", "value", "witness_count", "search_space"],
            r.per_k.iter().chain([&r.total]).map(|row| {
                vec![
                    row.n.to_string(),
                    opt(&row.k),
                    row.value.to_string(),
                    row.witness_count.to_string(),
                    row.search_space.to_string(),
                ]
            }),
        )?,
        Format::Json => json_doc(
            "extremal_search",
            json!({
                "n": r.n,
                "per_k": r.per_k.iter().map(result_json).collect::<Vec<_>>(),
                "total": result_json(&r.total),
            }),
        ),
    })
}

/// Bound table; `value` is the exhaustive minimum when it was computed.
pub fn bounds(rows: &[BoundRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => {
            let mut s = format!("{:>3} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10}\n", "n", "k", "value", "b31", "b32", "b33", "best");
            for r in rows {
                writeln!(
                    s,
                    "{:>3} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10}",
                    r.n,
                    r.k,
                    opt(&r.exhaustive),
                    opt(&r.bound_witness),
                    opt(&r.bound_truncated),
                    opt(&r.bound_middle),
                    r.best_bound()
                )
                .unwrap();
            }
            s
        }
        Format::Csv => csv_table(
            &["n", "k", "value", "bound_31", "bound_32", "bound_33", "witness_count"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.k.to_string(),
                    opt(&r.exhaustive),
                    opt(&r.bound_witness),
                    opt(&r.bound_truncated),
                    opt(&r.bound_middle),
                    opt(&r.witness_count),
                ]
            }),
        )?,
        Format::Json => json_doc(
            "bounds",
            json!({
                "rows": rows.iter().map(|r| json!({
                    "n": r.n,
                    "k": r.k,
                    "trivial": big(&r.trivial),
                    "value": opt_json(&r.exhaustive),
                    "bound_31": opt_json(&r.bound_witness),
                    "bound_32": opt_json(&r.bound_truncated),
                    "bound_33": opt_json(&r.bound_middle),
                    "best_bound": big(&r.best_bound()),
                    "witness_count": r.witness_count,
                    "consistent": r.consistent(),
                })).collect::<Vec<_>>(),
            }),
        ),
    })
}

pub fn rational(kind: &str, value: &BigRational, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => format!("{value}\n"),
        Format::Csv => csv_table(
            &["num", "den", "float"],
            [vec![value.numer().to_string(), value.denom().to_string(), coconvex_core::extremal::to_f64(value).to_string()]],
        )?,
        Format::Json => json_doc(
            kind,
            json!({
                "num": value.numer().to_string(),
                "den": value.denom().to_string(),
                "float": coconvex_core::extremal::to_f64(value),
            }),
        ),
    })
}

pub fn monte_carlo(n: usize, seed: u64, mc: &MonteCarlo, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => format!("{:.4} +- {:.4} ({} samples)\n", mc.mean(), mc.std_error(), mc.samples),
        Format::Csv => csv_table(
            &["n", "seed", "samples", "mean", "std_error"],
            [vec![
                n.to_string(),
                seed.to_string(),
                mc.samples.to_string(),
                mc.mean().to_string(),
                mc.std_error().to_string(),
            ]],
        )?,
        Format::Json => json_doc(
            "monte_carlo",
            json!({
                "n": n,
                "seed": seed,
                "samples": mc.samples,
                "mean": mc.mean(),
                "std_error": mc.std_error(),
                "sum": mc.sum.to_string(),
                "sum_sq": mc.sum_sq.to_string(),
            }),
        ),
    })
}

pub fn trend(rows: &[TrendRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => {
            let mut s = format!("{:>3} {:>16} ratio\n", "n", "E");
            for r in rows {
                writeln!(s, "{:>3} {:>16.3} {:.5}", r.n, coconvex_core::extremal::to_f64(&r.expected), r.ratio_f64()).unwrap();
            }
            s
        }
        Format::Csv => csv_table(
            &["n", "E_num", "E_den", "ratio_float"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.expected.numer().to_string(),
                    r.expected.denom().to_string(),
                    r.ratio_f64().to_string(),
                ]
            }),
        )?,
        Format::Json => json_doc(
            "trend",
            json!({
                "rows": rows.iter().map(|r| json!({
                    "n": r.n,
                    "E_num": r.expected.numer().to_string(),
                    "E_den": r.expected.denom().to_string(),
                    "ratio_float": r.ratio_f64(),
                    "expected_total_float": coconvex_core::extremal::to_f64(&r.expected_total),
                })).collect::<Vec<_>>(),
            }),
        ),
    })
}
