//! Text, CSV and JSON renderings of the statistics tables.
//!
//! Text output rounds to the precision of the reference tables; CSV and
//! JSON carry unrounded values.

use clap::ValueEnum;
use rqzeta_core::statistics::{AggregateReport, Category, CategoryRow, DistributionTable, IndexRow, RatioReport};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// `.606531` style: fixed decimals with the leading zero dropped below one.
pub fn fraction(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    s.strip_prefix("0.").map(|rest| format!(".{rest}")).unwrap_or(s)
}

/// Chi-squared values at three or so significant figures.
pub fn statistic(x: f64) -> String {
    if x >= 100.0 {
        format!("{x:.0}")
    } else if x >= 10.0 {
        format!("{x:.1}")
    } else if x >= 1.0 {
        format!("{x:.2}")
    } else {
        format!("{x:.3}")
    }
}

fn count(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

fn fit_line(label: &str, t: &DistributionTable) -> String {
    format!(
        "{label}chi-squared = {}, df = {}, significance = {}\n",
        statistic(t.chi_squared),
        t.df,
        fraction(t.significance, 3)
    )
}

fn category_json(c: &CategoryRow) -> Value {
    let (r, tail) = match c.category {
        Category::Exactly(v) => (v, false),
        Category::AtLeast(t) => (t, true),
    };
    json!({ "r": r, "tail": tail, "observed": c.observed, "expected": c.expected })
}

fn row_json(r: &IndexRow) -> Value {
    json!({
        "r": r.index,
        "observed": r.observed,
        "expected": r.expected,
        "observed_fraction": r.observed_fraction,
        "predicted_fraction": r.predicted_fraction,
    })
}

fn table_json(t: &DistributionTable) -> Value {
    json!({
        "population": t.population,
        "size": t.size,
        "rows": t.rows.iter().map(row_json).collect::<Vec<_>>(),
        "categories": t.categories.iter().map(category_json).collect::<Vec<_>>(),
        "chi_squared": t.chi_squared,
        "df": t.df,
        "significance": t.significance,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

const ROW_CSV_HEADER: &str = "r,observed,expected,observed_fraction,predicted_fraction";

/// A single-population table in the layout of the fixed-discriminant table.
pub fn single_table(caption: &str, t: &DistributionTable, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!("{caption}\nr & number & predicted number & predicted fraction\n");
            for r in &t.rows {
                s.push_str(&format!(
                    "{} & {} & {:.2} & {}\n",
                    r.index,
                    count(r.observed),
                    r.expected,
                    fraction(r.predicted_fraction, 6)
                ));
            }
            s.push_str(&fit_line("", t));
            s
        }
        Format::Csv => {
            let mut s = format!("{ROW_CSV_HEADER}\n");
            if t.size > 0 {
                for r in &t.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        r.index, r.observed, r.expected, r.observed_fraction, r.predicted_fraction
                    ));
                }
            }
            s
        }
        Format::Json => {
            let mut v = table_json(t);
            v["caption"] = json!(caption);
            pretty(&v)
        }
    }
}

/// Totals and per-discriminant averages side by side. `average_decimals`
/// follows the reference tables (2 for the limit prediction, 6 for the
/// exact one).
pub fn aggregate_table(caption: &str, a: &AggregateReport, average_decimals: usize, format: Format) -> String {
    let (t, avg) = (&a.totals, &a.averages);
    match format {
        Format::Text => {
            let mut s = format!(
                "{caption}\nr & total number & predicted total number & average number & predicted average number & predicted fraction\n"
            );
            let avg_fmt = |x: f64| {
                // Keep one significant digit for averages below the display precision.
                let d = if average_decimals == 2 && x != 0.0 && x.abs() < 0.01 { 3 } else { average_decimals };
                format!("{x:.d$}")
            };
            for (r, ar) in t.rows.iter().zip(&avg.rows) {
                s.push_str(&format!(
                    "{} & {} & {:.2} & {} & {} & {}\n",
                    r.index,
                    count(r.observed),
                    r.expected,
                    avg_fmt(ar.observed),
                    avg_fmt(ar.expected),
                    fraction(r.predicted_fraction, 6)
                ));
            }
            s.push_str(&format!("discriminants = {}\n", a.discriminants));
            s.push_str(&fit_line("totals: ", t));
            s.push_str(&fit_line("averages (heuristic): ", avg));
            s
        }
        Format::Csv => {
            let mut s = format!("{ROW_CSV_HEADER},average_observed,average_expected\n");
            if t.size > 0 {
                for (r, ar) in t.rows.iter().zip(&avg.rows) {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.index, r.observed, r.expected, r.observed_fraction, r.predicted_fraction, ar.observed, ar.expected
                    ));
                }
            }
            s
        }
        Format::Json => {
            let mut v = table_json(t);
            v["caption"] = json!(caption);
            v["discriminants"] = json!(a.discriminants);
            v["averages"] = table_json(avg);
            pretty(&v)
        }
    }
}

/// A table over classes or residues: `label` names the class column.
pub fn class_table(caption: &str, label: &str, t: &DistributionTable, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!("{caption}\n{label} & observed & expected & observed fraction & predicted fraction\n");
            for r in &t.rows {
                s.push_str(&format!(
                    "{} & {} & {:.2} & {} & {}\n",
                    r.index,
                    count(r.observed),
                    r.expected,
                    fraction(r.observed_fraction, 6),
                    fraction(r.predicted_fraction, 6)
                ));
            }
            s.push_str(&fit_line("", t));
            s
        }
        Format::Csv => single_table(caption, t, Format::Csv).replacen("r,", &format!("{label},"), 1),
        Format::Json => single_table(caption, t, Format::Json),
    }
}

pub fn ratio_table(caption: &str, r: &RatioReport, format: Format) -> String {
    let bins = r.histogram.len();
    let expected = r.pairs as f64 / bins as f64;
    let edge = |i: usize| i as f64 / bins as f64;
    match format {
        Format::Text => {
            let mut s = format!("{caption}\nbin & range & count & expected\n");
            for (i, &c) in r.histogram.iter().enumerate() {
                s.push_str(&format!("{i} & [{:.3}, {:.3}) & {c} & {expected:.2}\n", edge(i), edge(i + 1)));
            }
            s.push_str(&format!(
                "chi-squared = {}, df = {}, significance = {}\nKS distance = {:.4}\n",
                statistic(r.chi_squared),
                r.df,
                fraction(r.significance, 3),
                r.ks
            ));
            s
        }
        Format::Csv => {
            let mut s = String::from("bin,lo,hi,count,expected\n");
            for (i, &c) in r.histogram.iter().enumerate() {
                s.push_str(&format!("{i},{},{},{c},{expected}\n", edge(i), edge(i + 1)));
            }
            s
        }
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("ratio reports serialize");
            v["caption"] = json!(caption);
            pretty(&v)
        }
    }
}

pub fn json(v: &Value) -> String {
    pretty(v)
}
