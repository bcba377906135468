//! Sharded, resumable scans and the loader that reads their output back.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use rqzeta_core::irregularity::{
    check_table3_primes, scan_fixed_disc_primes, scan_fixed_primes_with, IndexKind, IndexRecord, Table3Context,
    RECORD_CSV_HEADER,
};
use rqzeta_core::numtheory::{is_odd_prime, odd_primes_up_to};
use rqzeta_core::FundamentalDiscriminant;

use crate::error::{incomplete, usage, CliResult};
use crate::manifest::{sha256_hex, write_atomic, Manifest, ShardEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    /// One discriminant, all odd primes below --pmax; shards are prime blocks.
    FixedDisc,
    /// All discriminants below --dmax against a prime set; 10^3-wide D blocks.
    Grid,
    /// Divisor-sum route for p in {3, 5}; 10^4-wide D blocks.
    Million,
}

impl ScanKind {
    fn name(self) -> &'static str {
        match self {
            ScanKind::FixedDisc => "fixed-disc",
            ScanKind::Grid => "grid",
            ScanKind::Million => "million",
        }
    }

    fn block(self) -> u64 {
        match self {
            ScanKind::FixedDisc | ScanKind::Grid => 1_000,
            ScanKind::Million => 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanRequest {
    pub kind: ScanKind,
    pub disc: Option<i64>,
    pub dmax: Option<u64>,
    pub pmax: Option<u64>,
    pub primes: Option<Vec<u64>>,
    pub workers: usize,
    pub resume: bool,
    /// Stop after computing this many shards (leaves the scan incomplete).
    pub stop_after: Option<usize>,
}

/// Validated scan: parameters echoed into the manifest plus the shard ranges.
struct Plan {
    kind: ScanKind,
    disc: Option<FundamentalDiscriminant>,
    primes: Vec<u64>,
    params: Vec<(String, String)>,
    ranges: Vec<(u64, u64)>,
}

fn prime_set(pmax: Option<u64>, primes: &Option<Vec<u64>>) -> CliResult<(Vec<u64>, (String, String))> {
    match (pmax, primes) {
        (Some(_), Some(_)) => Err(usage("give either --pmax or --primes, not both")),
        (Some(x), None) => Ok((odd_primes_up_to(x), ("pmax".into(), x.to_string()))),
        (None, Some(list)) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            if let Some(p) = list.iter().find(|&&p| !is_odd_prime(p)) {
                return Err(usage(format!("{p} is not an odd prime")));
            }
            let echo = list.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            Ok((list, ("primes".into(), echo)))
        }
        (None, None) => Err(usage("a prime bound is required (--pmax or --primes)")),
    }
}

fn blocks(lo: u64, hi: u64, width: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = lo - lo % width;
    while start < hi {
        out.push((start.max(lo), (start + width).min(hi)));
        start += width;
    }
    out
}

fn plan(req: &ScanRequest) -> CliResult<Plan> {
    let kind = req.kind;
    let mut params = vec![("kind".to_string(), kind.name().to_string())];
    let (disc, primes, ranges) = match kind {
        ScanKind::FixedDisc => {
            let d = req.disc.ok_or_else(|| usage("fixed-disc scans need --disc"))?;
            let disc = FundamentalDiscriminant::new(d)?;
            if req.dmax.is_some() {
                return Err(usage("--dmax does not apply to fixed-disc scans"));
            }
            let (primes, echo) = prime_set(req.pmax, &req.primes)?;
            params.push(("disc".into(), d.to_string()));
            params.push(echo);
            params.push(("mode".into(), "full".into()));
            params.push(("partition".into(), "p".into()));
            let top = primes.last().map_or(0, |p| p + 1);
            (Some(disc), primes, blocks(0, top, kind.block()))
        }
        ScanKind::Grid | ScanKind::Million => {
            if req.disc.is_some() {
                return Err(usage("--disc applies only to fixed-disc scans"));
            }
            let dmax = match (kind, req.dmax) {
                (_, Some(x)) => x,
                (ScanKind::Million, None) => 1_000_000,
                _ => return Err(usage("grid scans need --dmax")),
            };
            let (primes, echo) = if kind == ScanKind::Million {
                if req.pmax.is_some() {
                    return Err(usage("million scans take --primes (a subset of 3,5), not --pmax"));
                }
                prime_set(None, &Some(req.primes.clone().unwrap_or_else(|| vec![3, 5])))?
            } else {
                prime_set(req.pmax, &req.primes)?
            };
            if kind == ScanKind::Million {
                check_table3_primes(&primes)?;
            }
            params.push(("dmax".into(), dmax.to_string()));
            params.push(echo);
            let mode = if kind == ScanKind::Million { "table3" } else { "full" };
            params.push(("mode".into(), mode.into()));
            params.push(("partition".into(), "D".into()));
            (None, primes, blocks(0, dmax, kind.block()))
        }
    };
    params.push(("block".into(), kind.block().to_string()));
    params.push(("shards".into(), ranges.len().to_string()));
    Ok(Plan { kind, disc, primes, params, ranges })
}

/// Outcome of [`run_scan`].
pub struct ScanSummary {
    pub shards: usize,
    pub computed: usize,
    pub rows: u64,
    pub complete: bool,
}

pub fn run_scan(req: &ScanRequest, out: &Path) -> CliResult<ScanSummary> {
    let plan = plan(req)?;
    fs::create_dir_all(out)?;

    let fresh = Manifest {
        params: plan.params.clone(),
        shards: plan.ranges.iter().enumerate().map(|(i, &(lo, hi))| ShardEntry::pending(i, lo, hi)).collect(),
    };
    let mut manifest = if req.resume {
        match Manifest::load(out) {
            Ok(old) => {
                if old.params != plan.params {
                    return Err(usage(format!(
                        "cannot resume: {} holds a scan with different parameters",
                        out.display()
                    )));
                }
                let mut m = fresh;
                for (entry, prev) in m.shards.iter_mut().zip(old.shards) {
                    if prev.complete && shard_intact(out, &prev) {
                        *entry = prev;
                    }
                }
                m
            }
            Err(_) => fresh,
        }
    } else {
        fresh
    };
    manifest.store(out)?;

    let table3 = match plan.kind {
        ScanKind::Million => Some(Table3Context::new(plan.ranges.last().map_or(0, |r| r.1))?),
        _ => None,
    };
    let mut computed = 0;
    for i in 0..manifest.shards.len() {
        if manifest.shards[i].complete {
            continue;
        }
        if req.stop_after.is_some_and(|n| computed >= n) {
            break;
        }
        let (lo, hi) = (manifest.shards[i].lo, manifest.shards[i].hi);
        let records = match plan.disc {
            Some(disc) => {
                let subset: Vec<u64> = plan.primes.iter().copied().filter(|&p| lo <= p && p < hi).collect();
                scan_fixed_disc_primes(disc, &subset, req.workers)?
            }
            None => scan_fixed_primes_with(lo, hi, &plan.primes, table3.as_ref(), req.workers)?,
        };
        let bytes = render_shard(&records);
        let entry = &mut manifest.shards[i];
        write_atomic(&out.join(&entry.file), &bytes)?;
        entry.rows = records.len() as u64;
        entry.digest = Some(sha256_hex(&bytes));
        entry.complete = true;
        manifest.store(out)?;
        computed += 1;
    }
    Ok(ScanSummary {
        shards: manifest.shards.len(),
        computed,
        rows: manifest.shards.iter().map(|s| s.rows).sum(),
        complete: manifest.is_complete(),
    })
}

fn render_shard(records: &[IndexRecord]) -> Vec<u8> {
    let mut s = String::with_capacity(32 * (records.len() + 1));
    s.push_str(RECORD_CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.to_csv_row());
        s.push('\n');
    }
    s.into_bytes()
}

fn shard_intact(dir: &Path, entry: &ShardEntry) -> bool {
    match (fs::read(dir.join(&entry.file)), &entry.digest) {
        (Ok(bytes), Some(d)) => &sha256_hex(&bytes) == d,
        _ => false,
    }
}

/// Records of a finished scan, in shard order. An incomplete scan is an
/// error unless `allow_partial`, in which case only finished shards are read.
pub fn load_records(dir: &Path, allow_partial: bool) -> CliResult<(Manifest, Vec<IndexRecord>)> {
    let manifest = Manifest::load(dir)?;
    if !manifest.is_complete() && !allow_partial {
        let done = manifest.shards.iter().filter(|s| s.complete).count();
        return Err(incomplete(format!(
            "scan in {} is incomplete ({done} of {} shards); rerun with --resume or pass --allow-partial",
            dir.display(),
            manifest.shards.len()
        )));
    }
    let mut records = Vec::new();
    for entry in manifest.shards.iter().filter(|s| s.complete) {
        let bytes = fs::read(dir.join(&entry.file))
            .map_err(|e| incomplete(format!("cannot read shard {}: {e}", entry.file)))?;
        if entry.digest.as_deref() != Some(sha256_hex(&bytes).as_str()) {
            return Err(incomplete(format!("shard {} does not match its manifest digest", entry.file)));
        }
        let text = String::from_utf8(bytes).map_err(|_| incomplete(format!("shard {} is not UTF-8", entry.file)))?;
        let mut lines = text.lines();
        if lines.next() != Some(RECORD_CSV_HEADER) {
            return Err(incomplete(format!("shard {} has an unexpected header", entry.file)));
        }
        for line in lines.filter(|l| !l.is_empty()) {
            records.push(
                IndexRecord::from_csv_row(line, IndexKind::Chi)
                    .map_err(|e| incomplete(format!("shard {}: {e}", entry.file)))?,
            );
        }
    }
    Ok((manifest, records))
}
