//! `rqzeta`: special values of real quadratic L-functions, indices of
//! irregularity, checkpointed scans and the reports built from them.

mod error;
mod manifest;
mod render;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rqzeta_core::irregularity::{
    chi_irregularity_index, classical_irregularity_index, d_irregularity_index, high_valuation_survey,
    irregular_pairs, IndexRecord, RECORD_CSV_HEADER,
};
use rqzeta_core::lvalues::{format_rational, l_chi_exact, l_chi_mod, riemann_zeta_neg, zeta_d_exact};
use rqzeta_core::numtheory::{is_odd_prime, rational_mod};
use rqzeta_core::statistics::{
    aggregate_across_discriminants, build_distribution, ratio_uniformity_report, residue_class_report,
    residue_histogram, significance, Grouping, Prediction,
};
use rqzeta_core::FundamentalDiscriminant;
use serde_json::json;

use crate::error::{usage, CliResult};
use crate::manifest::Manifest;
use crate::render::Format;
use crate::scan::{load_records, run_scan, ScanKind, ScanRequest};

#[derive(Parser)]
#[command(name = "rqzeta", version, about = "Special values and irregularity indices of real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print L(1-2m, chi_D) exactly, or its residue mod p.
    Lvalue {
        #[arg(long)]
        disc: i64,
        #[arg(long)]
        m: u64,
        /// Reduce modulo this odd prime (needs p not dividing D and 2m <= p-1).
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Print zeta_D(1-2m), or zeta(1-2m) without --disc.
    Zeta {
        #[arg(long)]
        disc: Option<i64>,
        #[arg(long)]
        m: u64,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Index of irregularity of one prime.
    Index {
        #[arg(long)]
        disc: Option<i64>,
        /// The prime p.
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long = "type", value_enum, default_value = "chi")]
        index_type: IndexType,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compute index records into CSV shards with a manifest.
    Scan {
        #[arg(long, value_enum)]
        kind: ScanKind,
        #[arg(long)]
        disc: Option<i64>,
        #[arg(long)]
        dmax: Option<u64>,
        /// Scan the odd primes below this bound.
        #[arg(long)]
        pmax: Option<u64>,
        /// Scan an explicit comma-separated prime list.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Keep shards already completed by an earlier run.
        #[arg(long)]
        resume: bool,
        #[arg(long, hide = true)]
        stop_after: Option<usize>,
    },
    /// Render a table or conjecture report from finished scan shards.
    Report {
        #[arg(long, alias = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        table: Table,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Keep only records with p below this bound.
        #[arg(long)]
        pmax: Option<u64>,
        /// Keep only records with D below this bound.
        #[arg(long)]
        dmax: Option<u64>,
        /// Keep only records of this discriminant.
        #[arg(long)]
        disc: Option<i64>,
        #[arg(long)]
        allow_partial: bool,
        /// Bins of the 2m/p uniformity report.
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Modulus of the residue-class report.
        #[arg(long, default_value_t = 4)]
        classes_mod: u64,
        /// Prime whose irregular discriminants the histogram report bins.
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Exact prediction: give records with D = p their reduced test count.
        #[arg(long)]
        respect_exceptional: bool,
    },
    /// Largest valuation among hits for one prime, and the largest index.
    Survey {
        #[arg(long, alias = "in")]
        input: PathBuf,
        #[arg(long = "mod", default_value_t = 3)]
        modulus: u64,
        #[arg(long)]
        allow_partial: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Significance of a chi-squared value, or the residue histogram of
    /// L(1-2m, chi_D) mod p over 2 <= 2m <= p-1.
    Stats {
        #[arg(long)]
        statistic: Option<f64>,
        #[arg(long)]
        df: Option<usize>,
        #[arg(long)]
        disc: Option<i64>,
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexType {
    Chi,
    D,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    /// Fixed discriminant, limit prediction.
    #[value(name = "1")]
    One,
    /// Totals and averages over discriminants, limit prediction.
    #[value(name = "2")]
    Two,
    /// Totals and averages over discriminants, exact small-p prediction.
    #[value(name = "3")]
    Three,
    Residues,
    Ratios,
    Histogram,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn disc_arg(d: i64) -> CliResult<FundamentalDiscriminant> {
    Ok(FundamentalDiscriminant::new(d)?)
}

fn prime_arg(p: u64) -> CliResult<u64> {
    if is_odd_prime(p) {
        Ok(p)
    } else {
        Err(usage(format!("{p} is not an odd prime")))
    }
}

fn run(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::Lvalue { disc, m, modulus } => {
            let d = disc_arg(disc)?;
            Ok(match modulus {
                Some(p) => format!("{}\n", l_chi_mod(d, m, p)?),
                None => format!("{}\n", format_rational(&l_chi_exact(d, m)?)),
            })
        }
        Command::Zeta { disc, m, modulus } => {
            let value = match disc {
                Some(d) => zeta_d_exact(disc_arg(d)?, m)?,
                None => riemann_zeta_neg(m)?,
            };
            Ok(match modulus {
                Some(p) => {
                    prime_arg(p)?;
                    let r = rational_mod(&value, p)
                        .ok_or_else(|| usage(format!("{p} divides the denominator of the value")))?;
                    format!("{r}\n")
                }
                None => format!("{}\n", format_rational(&value)),
            })
        }
        Command::Index { disc, modulus, index_type, format } => {
            let p = prime_arg(modulus)?;
            let record = match (index_type, disc) {
                (IndexType::Classical, None) => classical_irregularity_index(p)?,
                (IndexType::Classical, Some(_)) => return Err(usage("the classical index takes no --disc")),
                (_, None) => return Err(usage("--disc is required for chi and D indices")),
                (IndexType::Chi, Some(d)) => chi_irregularity_index(disc_arg(d)?, p)?,
                (IndexType::D, Some(d)) => d_irregularity_index(disc_arg(d)?, p)?,
            };
            Ok(render_record(&record, format))
        }
        Command::Scan { kind, disc, dmax, pmax, primes, out, workers, resume, stop_after } => {
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
                .max(1);
            let req = ScanRequest { kind, disc, dmax, pmax, primes, workers, resume, stop_after };
            let s = run_scan(&req, &out)?;
            Ok(format!(
                "shards={} computed={} rows={} complete={}\n",
                s.shards, s.computed, s.rows, s.complete
            ))
        }
        Command::Report {
            input,
            table,
            format,
            pmax,
            dmax,
            disc,
            allow_partial,
            bins,
            classes_mod,
            modulus,
            respect_exceptional,
        } => {
            let (manifest, mut records) = load_records(&input, allow_partial)?;
            if let Some(x) = pmax {
                records.retain(|r| r.p() < x);
            }
            if let Some(x) = dmax {
                records.retain(|r| r.disc().is_some_and(|d| d.get() < x));
            }
            if let Some(d) = disc {
                let d = disc_arg(d)?;
                records.retain(|r| r.disc() == Some(d));
            }
            let caption = caption(&manifest, &records, pmax, dmax);
            report(table, &records, &caption, format, bins, classes_mod, modulus, respect_exceptional)
        }
        Command::Survey { input, modulus, allow_partial, format } => {
            let p = prime_arg(modulus)?;
            let (_, records) = load_records(&input, allow_partial)?;
            survey(&records, p, format)
        }
        Command::Stats { statistic, df, disc, modulus, format } => match (statistic, disc) {
            (Some(x), None) => {
                if x < 0.0 {
                    return Err(usage("the statistic must be nonnegative"));
                }
                let df = df.filter(|&k| k > 0).ok_or_else(|| usage("--df must be a positive integer"))?;
                let sig = significance(x, df);
                Ok(match format {
                    Format::Json => render::json(&json!({ "statistic": x, "df": df, "significance": sig })),
                    Format::Csv => format!("statistic,df,significance\n{x},{df},{sig}\n"),
                    Format::Text => format!(
                        "chi-squared = {x}, df = {df}, significance = {}\n",
                        render::fraction(sig, 3)
                    ),
                })
            }
            (None, Some(d)) => {
                let d = disc_arg(d)?;
                let p = prime_arg(modulus.ok_or_else(|| usage("--mod is required with --disc"))?)?;
                let values = (1..=(p - 1) / 2).map(|m| l_chi_mod(d, m, p)).collect::<Result<Vec<_>, _>>()?;
                let t = residue_histogram(&values, p)?;
                let caption = format!("L(1-2m, chi_{d}) mod {p} for 2 <= 2m <= {}", p - 1);
                Ok(render::class_table(&caption, "residue", &t, format))
            }
            _ => Err(usage("give either --statistic with --df, or --disc with --mod")),
        },
    }
}

fn render_record(r: &IndexRecord, format: Format) -> String {
    match format {
        Format::Csv => format!("{RECORD_CSV_HEADER}\n{}\n", r.to_csv_row()),
        Format::Json => render::json(&serde_json::to_value(r).expect("records serialize")),
        Format::Text => {
            let d = r.disc().map(|d| format!("D={d} ")).unwrap_or_default();
            let hits: Vec<String> = r.hits.iter().map(|h| format!("{}:{}", h.two_m, h.valuation)).collect();
            format!("{d}p={} delta={} index={} hits={}\n", r.p(), r.context.delta, r.index(), hits.join(";"))
        }
    }
}

fn caption(manifest: &Manifest, records: &[IndexRecord], pmax: Option<u64>, dmax: Option<u64>) -> String {
    let discs: std::collections::BTreeSet<u64> = records.iter().filter_map(|r| r.disc().map(|d| d.get())).collect();
    let d_part = match (discs.len(), dmax.or_else(|| manifest.get("dmax").and_then(|v| v.parse().ok()))) {
        (1, _) => format!("D={}", discs.iter().next().copied().unwrap_or(0)),
        (_, Some(x)) => format!("D<{x}"),
        _ => "all D".to_string(),
    };
    let p_part = match (pmax, manifest.get("pmax"), manifest.get("primes")) {
        (Some(x), _, _) => format!("p<{x}"),
        (None, Some(x), _) => format!("p<{x}"),
        (None, None, Some(list)) => format!("p in {{{list}}}"),
        _ => "all p".to_string(),
    };
    format!("Results for {d_part} and {p_part}")
}

#[allow(clippy::too_many_arguments)]
fn report(
    table: Table,
    records: &[IndexRecord],
    caption: &str,
    format: Format,
    bins: usize,
    classes_mod: u64,
    modulus: Option<u64>,
    respect_exceptional: bool,
) -> CliResult<String> {
    match table {
        Table::One => {
            let t = build_distribution(records, Prediction::Limit, &Grouping::wagstaff())?;
            Ok(render::single_table(caption, &t, format))
        }
        Table::Two => {
            if records.is_empty() {
                let t = build_distribution(records, Prediction::Limit, &Grouping::wagstaff())?;
                return Ok(render::single_table(caption, &t, format));
            }
            let a = aggregate_across_discriminants(records, Prediction::Limit, &Grouping::wagstaff())?;
            Ok(render::aggregate_table(caption, &a, 2, format))
        }
        Table::Three => {
            let t_max = records.iter().map(|r| (r.p() - 1) / 2).max().unwrap_or(1);
            let grouping = Grouping::singletons(t_max + 1);
            let prediction = Prediction::ExactSmallP { respect_exceptional };
            if records.is_empty() {
                let t = build_distribution(records, prediction, &grouping)?;
                return Ok(render::single_table(caption, &t, format));
            }
            let a = aggregate_across_discriminants(records, prediction, &grouping)?;
            Ok(render::aggregate_table(caption, &a, 6, format))
        }
        Table::Residues => {
            let discs: std::collections::BTreeSet<_> = records.iter().map(|r| r.disc()).collect();
            if discs.len() > 1 {
                return Err(usage("the residue-class report needs a single discriminant; pass --disc"));
            }
            let all: Vec<u64> = records.iter().map(|r| r.p()).collect();
            let irregular: Vec<u64> = records.iter().filter(|r| r.index() > 0).map(|r| r.p()).collect();
            let t = residue_class_report(&irregular, &all, classes_mod)?;
            let caption = format!("{caption}: irregular primes by residue class mod {classes_mod}");
            Ok(render::class_table(&caption, "class", &t, format))
        }
        Table::Ratios => {
            let r = ratio_uniformity_report(&irregular_pairs(records), bins)?;
            let caption = format!("{caption}: 2m/p over {} irregular pairs", r.pairs);
            Ok(render::ratio_table(&caption, &r, format))
        }
        Table::Histogram => {
            let p = prime_arg(modulus.ok_or_else(|| usage("--mod is required for the histogram report"))?)?;
            let values: Vec<u64> = records
                .iter()
                .filter(|r| r.p() == p && r.index() > 0)
                .filter_map(|r| r.disc().map(|d| d.get() % p))
                .collect();
            let t = residue_histogram(&values, p)?;
            let caption = format!("{caption}: discriminants with a hit at p = {p}, by D mod {p}");
            Ok(render::class_table(&caption, "residue", &t, format))
        }
    }
}

fn survey(records: &[IndexRecord], p: u64, format: Format) -> CliResult<String> {
    let (max_v, at) = high_valuation_survey(records, p);
    let largest = records.iter().map(|r| r.index()).max().unwrap_or(0);
    let count = records.iter().filter(|r| r.index() == largest).count();
    Ok(match format {
        Format::Json => render::json(&json!({
            "p": p,
            "max_valuation": max_v,
            "attained_at": at.iter().map(|&(d, m)| json!({ "D": d, "two_m": m })).collect::<Vec<_>>(),
            "largest_index": largest,
            "largest_index_count": count,
        })),
        Format::Csv => {
            let mut s = String::from("D,two_m,valuation\n");
            for (d, m) in &at {
                s.push_str(&format!("{d},{m},{max_v}\n"));
            }
            s
        }
        Format::Text => {
            let mut s = format!("p={p} max {max_v}\n");
            for (d, m) in &at {
                s.push_str(&format!("D={d} 2m={m}\n"));
            }
            s.push_str(&format!("largest index {largest}, count {count}\n"));
            s
        }
    })
}
