//! Indices of χ-, D- and classical irregularity, and the scan drivers that
//! compute them over ranges of primes or discriminants.
//!
//! For a real quadratic discriminant `D` and an odd prime `p`, let
//! `δ = p - 1`, or `δ = (p - 1)/2` when `D = p`. The tested values are
//! `L(1-2m, χ_D)` for `2 ≤ 2m ≤ δ - 2` together with a δ-term:
//! `L(1-δ, χ_D)` itself when `D ≠ p`, and `p · L(1-δ, χ_D)` when `D = p`.
//! A tested value is a hit when `p` divides it, i.e. its p-adic valuation
//! is at least one.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bernoulli::{
    bernoulli_exact, bernoulli_mod_table_in, generalized_bernoulli_exact_even, generalized_bernoulli_mod_table,
};
use crate::error::{Error, Result};
use crate::lvalues::{l_chi_exact, siegel_l_values};
use crate::numtheory::{
    divisor_sigma_sieve, enumerate_fundamental_discriminants, is_odd_prime, odd_primes_up_to, p_adic_valuation,
    FundamentalDiscriminant, ModRing, PValuation, ResidueRing, SigmaTable, WideModRing,
};

/// `δ = p - 1`, or `(p - 1)/2` when `D = p`.
pub fn delta(disc: FundamentalDiscriminant, p: u64) -> u64 {
    if disc.get() == p {
        (p - 1) / 2
    } else {
        p - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegularityContext {
    /// `None` for the classical (rational) index.
    pub disc: Option<FundamentalDiscriminant>,
    pub p: u64,
    pub delta: u64,
}

impl RegularityContext {
    pub fn new(disc: FundamentalDiscriminant, p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { disc: Some(disc), p, delta: delta(disc, p) })
    }

    pub fn classical(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { disc: None, p, delta: p - 1 })
    }

    /// `D = p`, the case with the halved range and the p-multiplier.
    pub fn is_exceptional(&self) -> bool {
        self.disc.is_some_and(|d| d.get() == self.p)
    }

    /// Number of tested values, `δ/2`.
    pub fn test_count(&self) -> u64 {
        self.delta / 2
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) && p < (1 << 32) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Chi,
    D,
    Classical,
}

/// A tested exponent `2m` at which `p` divides the tested value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hit {
    pub two_m: u64,
    /// Valuation of the tested value (including the p-multiplier, if any).
    pub valuation: PValuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub context: RegularityContext,
    pub kind: IndexKind,
    /// Sorted by `two_m`.
    pub hits: Vec<Hit>,
}

impl IndexRecord {
    pub fn index(&self) -> usize {
        self.hits.len()
    }

    pub fn disc(&self) -> Option<FundamentalDiscriminant> {
        self.context.disc
    }

    pub fn p(&self) -> u64 {
        self.context.p
    }
}

/// `(p, 2m)` with `p` dividing the tested value of `D` at `1 - 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IrregularPair {
    pub p: u64,
    pub two_m: u64,
    pub disc: FundamentalDiscriminant,
    pub valuation: i64,
}

/// When a tested valuation counts as a hit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitRule {
    /// `v_p ≥ 1`.
    #[default]
    Divisible,
    /// `v_p ≠ 0`; sensitivity variant that also flags p in the denominator.
    NonUnit,
}

impl HitRule {
    pub fn is_hit(self, v: PValuation) -> bool {
        match (self, v) {
            (_, PValuation::Infinite) => true,
            (HitRule::Divisible, PValuation::Finite(v)) => v >= 1,
            (HitRule::NonUnit, PValuation::Finite(v)) => v != 0,
        }
    }
}

fn record(context: RegularityContext, kind: IndexKind, tested: &[(u64, PValuation)], rule: HitRule) -> IndexRecord {
    let hits = tested
        .iter()
        .filter(|(_, v)| rule.is_hit(*v))
        .map(|&(two_m, valuation)| Hit { two_m, valuation })
        .collect();
    IndexRecord { context, kind, hits }
}

/// Valuations `v_p(L(1-2m, χ_D))` for `2m = 2, 4, …, δ`.
///
/// When `p ∤ D` the residues come from the modular sweep modulo the largest
/// `p^e < 2^32`; values vanishing there are redone modulo `p^e < 2^63`, and
/// only values vanishing even there are recomputed exactly. When `p | D`
/// the exact route is used throughout.
pub fn l_valuations(disc: FundamentalDiscriminant, p: u64) -> Result<Vec<(u64, PValuation)>> {
    let ctx = RegularityContext::new(disc, p)?;
    if disc.get().is_multiple_of(p) {
        let values = generalized_bernoulli_exact_even(disc, ctx.delta as usize);
        return Ok(values
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let two_m = 2 * i as u64 + 2;
                let l = -b / BigRational::from_integer(two_m.into());
                (two_m, p_adic_valuation(&l, p))
            })
            .collect());
    }
    let narrow = modular_l_valuations(disc, p, ctx.delta, ModRing::largest_prime_power(p).0)?;
    if narrow.iter().all(|(_, v)| v.is_some()) {
        return Ok(narrow.into_iter().map(|(m, v)| (m, PValuation::Finite(v.unwrap()))).collect());
    }
    let wide = modular_l_valuations(disc, p, ctx.delta, WideModRing::largest_prime_power(p).0)?;
    wide.into_iter()
        .map(|(two_m, v)| {
            let v = match v {
                Some(v) => PValuation::Finite(v),
                None => p_adic_valuation(&l_chi_exact(disc, two_m / 2)?, p),
            };
            Ok((two_m, v))
        })
        .collect()
}

fn modular_l_valuations<R: ResidueRing>(
    disc: FundamentalDiscriminant,
    p: u64,
    delta: u64,
    ring: R,
) -> Result<Vec<(u64, Option<i64>)>> {
    let table = generalized_bernoulli_mod_table(disc, p, ring)?;
    Ok((2..=delta)
        .step_by(2)
        .map(|two_m| {
            let b = table.get(two_m as usize).expect("2m ≤ p - 1");
            let inv = ring.inv(two_m).expect("2m < p");
            (two_m, ring.residue_valuation(ring.neg(ring.mul(b, inv)), p))
        })
        .collect())
}

/// Valuations of the χ-tested values (with the p-multiplier on the δ-term
/// when `D = p`).
fn chi_tested(disc: FundamentalDiscriminant, p: u64) -> Result<Vec<(u64, PValuation)>> {
    let ctx = RegularityContext::new(disc, p)?;
    let mut tested = l_valuations(disc, p)?;
    if ctx.is_exceptional() {
        if let Some(last) = tested.last_mut() {
            last.1 = last.1.shift(1);
        }
    }
    Ok(tested)
}

/// Index of χ-irregularity of `p` for `Q(√D)`.
pub fn chi_irregularity_index(disc: FundamentalDiscriminant, p: u64) -> Result<IndexRecord> {
    chi_irregularity_index_with(disc, p, HitRule::Divisible)
}

pub fn chi_irregularity_index_with(disc: FundamentalDiscriminant, p: u64, rule: HitRule) -> Result<IndexRecord> {
    let ctx = RegularityContext::new(disc, p)?;
    Ok(record(ctx, IndexKind::Chi, &chi_tested(disc, p)?, rule))
}

/// `v_p(ζ(1-2m)) = v_p(B_{2m})` for `2m = 2, …, upto` (`upto ≤ p - 1`);
/// `v_p(ζ(2-p)) = -1` by von Staudt–Clausen.
pub fn riemann_valuations(p: u64, upto: u64) -> Result<Vec<(u64, PValuation)>> {
    check_prime(p)?;
    if upto > p - 1 {
        return Err(Error::IndexOutOfRange { n: upto, p });
    }
    let narrow = bernoulli_mod_table_in(p, ModRing::largest_prime_power(p).0)?;
    let mut wide = None;
    (2..=upto)
        .step_by(2)
        .map(|two_m| {
            if two_m == p - 1 {
                return Ok((two_m, PValuation::Finite(-1)));
            }
            let n = two_m as usize;
            let residue = narrow.get(n).expect("2m ≤ p - 3");
            if let Some(v) = ModRing::new(narrow.modulus()).residue_valuation(residue, p) {
                return Ok((two_m, PValuation::Finite(v)));
            }
            if wide.is_none() {
                wide = Some(bernoulli_mod_table_in(p, WideModRing::largest_prime_power(p).0)?);
            }
            let table = wide.as_ref().expect("just built");
            let ring = WideModRing::new(table.modulus());
            let v = match ring.residue_valuation(table.get(n).expect("2m ≤ p - 3"), p) {
                Some(v) => PValuation::Finite(v),
                None => p_adic_valuation(&bernoulli_exact(n), p),
            };
            Ok((two_m, v))
        })
        .collect()
}

/// Index of D-irregularity: the tested values are `ζ_D(1-2m)` for interior
/// `2m` and `p · ζ_D(1-δ)` for the δ-term.
pub fn d_irregularity_index(disc: FundamentalDiscriminant, p: u64) -> Result<IndexRecord> {
    d_irregularity_index_with(disc, p, HitRule::Divisible)
}

pub fn d_irregularity_index_with(disc: FundamentalDiscriminant, p: u64, rule: HitRule) -> Result<IndexRecord> {
    let ctx = RegularityContext::new(disc, p)?;
    let l = l_valuations(disc, p)?;
    let z = riemann_valuations(p, ctx.delta)?;
    let mut tested: Vec<(u64, PValuation)> =
        l.iter().zip(&z).map(|(&(two_m, vl), &(_, vz))| (two_m, vl + vz)).collect();
    if let Some(last) = tested.last_mut() {
        last.1 = last.1.shift(1);
    }
    Ok(record(ctx, IndexKind::D, &tested, rule))
}

/// Classical index: how many of `B_2, B_4, …, B_{p-3}` are divisible by `p`.
pub fn classical_irregularity_index(p: u64) -> Result<IndexRecord> {
    let ctx = RegularityContext::classical(p)?;
    let tested = riemann_valuations(p, p - 3)?;
    Ok(record(ctx, IndexKind::Classical, &tested, HitRule::Divisible))
}

/// Builds records from exact `L(1-2m, χ_D)` values (index `m - 1`).
fn chi_records_from_exact(
    disc: FundamentalDiscriminant,
    l_values: &[BigRational],
    primes: &[u64],
) -> Result<Vec<IndexRecord>> {
    primes
        .iter()
        .map(|&p| {
            let ctx = RegularityContext::new(disc, p)?;
            let mut tested: Vec<(u64, PValuation)> = l_values[..ctx.test_count() as usize]
                .iter()
                .enumerate()
                .map(|(i, l)| (2 * i as u64 + 2, p_adic_valuation(l, p)))
                .collect();
            if ctx.is_exceptional() {
                if let Some(last) = tested.last_mut() {
                    last.1 = last.1.shift(1);
                }
            }
            Ok(record(ctx, IndexKind::Chi, &tested, HitRule::Divisible))
        })
        .collect()
}

/// Applies `f` to every item on `workers` threads, keeping input order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(workers: usize, items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(_workers: usize, items: &[T], f: F) -> Result<Vec<U>>
where
    F: Fn(&T) -> Result<U>,
{
    items.iter().map(f).collect()
}

/// χ-index records of `D` for every odd prime `p < p_max`, ascending in `p`.
pub fn scan_fixed_disc(disc: FundamentalDiscriminant, p_max: u64, workers: usize) -> Result<Vec<IndexRecord>> {
    let primes = odd_primes_up_to(p_max);
    scan_fixed_disc_primes(disc, &primes, workers)
}

pub fn scan_fixed_disc_primes(disc: FundamentalDiscriminant, primes: &[u64], workers: usize) -> Result<Vec<IndexRecord>> {
    // Largest primes first so the costliest tasks start early.
    let mut order: Vec<u64> = primes.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    let mut records = map_ordered(workers, &order, |&p| chi_irregularity_index(disc, p))?;
    records.sort_by_key(|r| r.context.p);
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Every tested `2m ≤ δ` from exact generalized Bernoulli numbers.
    Full,
    /// `p ∈ {3, 5}` from the divisor-sum values `L(-1, χ)` and `L(-3, χ)`.
    Table3,
}

/// Divisor-sum tables shared by a table3 scan.
#[derive(Debug, Clone)]
pub struct Table3Context {
    sigma1: SigmaTable,
    sigma3: SigmaTable,
}

impl Table3Context {
    /// Tables covering every discriminant below `hi`.
    pub fn new(hi: u64) -> Result<Self> {
        let limit = (hi.saturating_sub(1) / 4).max(1);
        Ok(Self { sigma1: divisor_sigma_sieve(1, limit)?, sigma3: divisor_sigma_sieve(3, limit)? })
    }

    fn records(&self, disc: FundamentalDiscriminant, primes: &[u64]) -> Result<Vec<IndexRecord>> {
        let values = siegel_l_values(disc, &self.sigma1, &self.sigma3)?;
        primes
            .iter()
            .map(|&p| {
                let ctx = RegularityContext::new(disc, p)?;
                let mut tested: Vec<(u64, PValuation)> =
                    (1..=ctx.test_count()).map(|m| (2 * m, values.valuation(m, p))).collect();
                if ctx.is_exceptional() {
                    if let Some(last) = tested.last_mut() {
                        last.1 = last.1.shift(1);
                    }
                }
                Ok(record(ctx, IndexKind::Chi, &tested, HitRule::Divisible))
            })
            .collect()
    }
}

pub fn check_table3_primes(primes: &[u64]) -> Result<()> {
    match primes.iter().find(|&&p| p != 3 && p != 5) {
        Some(&p) => Err(Error::Table3Primes(p)),
        None => Ok(()),
    }
}

/// χ-index records for every fundamental `D` in `[lo, hi)` and every prime
/// in `primes`, ordered by `(D, p)`.
pub fn scan_fixed_primes(
    lo: u64,
    hi: u64,
    primes: &[u64],
    mode: ScanMode,
    workers: usize,
) -> Result<Vec<IndexRecord>> {
    let table3 = match mode {
        ScanMode::Table3 => {
            check_table3_primes(primes)?;
            Some(Table3Context::new(hi)?)
        }
        ScanMode::Full => None,
    };
    scan_fixed_primes_with(lo, hi, primes, table3.as_ref(), workers)
}

/// As [`scan_fixed_primes`]; a supplied [`Table3Context`] selects the
/// divisor-sum route and must cover `hi`.
pub fn scan_fixed_primes_with(
    lo: u64,
    hi: u64,
    primes: &[u64],
    table3: Option<&Table3Context>,
    workers: usize,
) -> Result<Vec<IndexRecord>> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for &p in &primes {
        check_prime(p)?;
    }
    let discs = enumerate_fundamental_discriminants(lo, hi);
    let per_disc = match table3 {
        Some(ctx) => {
            check_table3_primes(&primes)?;
            map_ordered(workers, &discs, |&d| ctx.records(d, &primes))?
        }
        None => {
            let n_max = primes.iter().map(|&p| p - 1).max().unwrap_or(0) as usize;
            map_ordered(workers, &discs, |&d| {
                let l_values: Vec<BigRational> = generalized_bernoulli_exact_even(d, n_max)
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| -b / BigRational::from_integer((2 * i as u64 + 2).into()))
                    .collect();
                chi_records_from_exact(d, &l_values, &primes)
            })?
        }
    };
    Ok(per_disc.into_iter().flatten().collect())
}

/// Largest hit valuation among records for `p`, with every `(D, 2m)`
/// attaining it; `(0, [])` when there are no hits.
pub fn high_valuation_survey(records: &[IndexRecord], p: u64) -> (i64, Vec<(u64, u64)>) {
    let mut best = 0i64;
    let mut at = Vec::new();
    for r in records.iter().filter(|r| r.context.p == p) {
        for hit in &r.hits {
            let Some(v) = hit.valuation.finite() else { continue };
            let d = r.context.disc.map_or(0, |d| d.get());
            if v > best {
                best = v;
                at.clear();
            }
            if v == best && v > 0 {
                at.push((d, hit.two_m));
            }
        }
    }
    (best, at)
}

/// Irregular pairs carried by χ- or D-records.
pub fn irregular_pairs(records: &[IndexRecord]) -> Vec<IrregularPair> {
    records
        .iter()
        .filter_map(|r| r.context.disc.map(|d| (r, d)))
        .flat_map(|(r, disc)| {
            r.hits.iter().map(move |h| IrregularPair {
                p: r.context.p,
                two_m: h.two_m,
                disc,
                valuation: h.valuation.finite().unwrap_or(i64::MAX),
            })
        })
        .collect()
}

/// Header of the index-record CSV.
pub const RECORD_CSV_HEADER: &str = "D,p,delta,index,hits";

/// Header of the irregular-pair CSV.
pub const PAIR_CSV_HEADER: &str = "p,two_m,D,valuation";

impl IrregularPair {
    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{}", self.p, self.two_m, self.disc, self.valuation)
    }
}

struct HitList<'a>(&'a [Hit]);

impl fmt::Display for HitList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}:{}", h.two_m, h.valuation)?;
        }
        Ok(())
    }
}

impl IndexRecord {
    /// One CSV row under [`RECORD_CSV_HEADER`]; `D` is empty for classical records.
    pub fn to_csv_row(&self) -> String {
        let d = self.context.disc.map(|d| d.to_string()).unwrap_or_default();
        format!("{d},{},{},{},{}", self.context.p, self.context.delta, self.index(), HitList(&self.hits))
    }

    /// Parses a row written by [`IndexRecord::to_csv_row`].
    pub fn from_csv_row(line: &str, kind: IndexKind) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("malformed record row {line:?}: {what}"));
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        let disc = if fields[0].is_empty() {
            None
        } else {
            let d: i64 = fields[0].parse().map_err(|_| bad("D"))?;
            Some(FundamentalDiscriminant::new(d)?)
        };
        let p: u64 = fields[1].parse().map_err(|_| bad("p"))?;
        let delta: u64 = fields[2].parse().map_err(|_| bad("delta"))?;
        let index: usize = fields[3].parse().map_err(|_| bad("index"))?;
        let hits = if fields[4].is_empty() {
            Vec::new()
        } else {
            fields[4]
                .split(';')
                .map(|h| {
                    let (m, v) = h.split_once(':').ok_or_else(|| bad("hit"))?;
                    let valuation = if v == "inf" {
                        PValuation::Infinite
                    } else {
                        PValuation::Finite(v.parse().map_err(|_| bad("valuation"))?)
                    };
                    Ok(Hit { two_m: m.parse().map_err(|_| bad("2m"))?, valuation })
                })
                .collect::<Result<Vec<_>>>()?
        };
        if hits.len() != index {
            return Err(bad("index does not match the hit list"));
        }
        Ok(IndexRecord { context: RegularityContext { disc, p, delta }, kind, hits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> FundamentalDiscriminant {
        FundamentalDiscriminant::new(d).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(disc(5), 7), 6);
        assert_eq!(delta(disc(5), 5), 2);
        assert_eq!(delta(disc(13), 13), 6);
    }

    #[test]
    fn delta_is_even() {
        for d in enumerate_fundamental_discriminants(2, 200) {
            for p in odd_primes_up_to(100) {
                assert_eq!(delta(d, p) % 2, 0, "D={d} p={p}");
            }
        }
    }

    #[test]
    fn chi_index_examples() {
        let r = chi_irregularity_index(disc(5), 5).unwrap();
        assert_eq!(r.index(), 0);
        assert_eq!(r.context.delta, 2);
        let r = chi_irregularity_index(disc(24), 3).unwrap();
        assert_eq!(r.index(), 1);
        assert_eq!(r.hits, vec![Hit { two_m: 2, valuation: PValuation::Finite(1) }]);
        assert_eq!(chi_irregularity_index(disc(13), 3).unwrap().index(), 0);
        assert!(chi_irregularity_index(disc(13), 9).is_err());
    }

    #[test]
    fn strict_rule_flags_denominators() {
        // L(-1, χ_5) = -2/5 has v_5 = -1; with the multiplier the tested value is -2.
        let r = chi_irregularity_index_with(disc(5), 5, HitRule::NonUnit).unwrap();
        assert_eq!(r.index(), 0);
        let r = d_irregularity_index_with(disc(5), 7, HitRule::NonUnit).unwrap();
        let plain = d_irregularity_index(disc(5), 7).unwrap();
        assert!(r.index() >= plain.index());
    }

    #[test]
    fn d_index_examples() {
        assert_eq!(d_irregularity_index(disc(13), 3).unwrap().index(), 0);
        let r = d_irregularity_index(disc(24), 3).unwrap();
        assert_eq!(r.hits, vec![Hit { two_m: 2, valuation: PValuation::Finite(1) }]);
        assert_eq!(d_irregularity_index(disc(5), 5).unwrap().index(), 0);
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_irregularity_index(3).unwrap().index(), 0);
        let r = classical_irregularity_index(37).unwrap();
        assert_eq!(r.index(), 1);
        assert_eq!(r.hits[0].two_m, 32);
        assert!(classical_irregularity_index(691).unwrap().hits.iter().any(|h| h.two_m == 12));
    }

    #[test]
    fn scan_structure() {
        let recs = scan_fixed_disc(disc(5), 10, 1).unwrap();
        assert_eq!(recs.iter().map(|r| r.p()).collect::<Vec<_>>(), vec![3, 5, 7]);
        assert_eq!(scan_fixed_disc(disc(8), 1000, 1).unwrap().len(), 167);
        let recs = scan_fixed_primes(2, 30, &[3], ScanMode::Table3, 1).unwrap();
        assert_eq!(recs.len(), 9);
        assert_eq!(scan_fixed_primes(2, 30, &[7], ScanMode::Table3, 1).unwrap_err(), Error::Table3Primes(7));
    }

    #[test]
    fn scan_routes_agree() {
        // exact batch, modular per-record, and divisor-sum routes
        let primes = [3u64, 5];
        let full = scan_fixed_primes(2, 2000, &primes, ScanMode::Full, 1).unwrap();
        let t3 = scan_fixed_primes(2, 2000, &primes, ScanMode::Table3, 1).unwrap();
        assert_eq!(full, t3);
        let primes: Vec<u64> = odd_primes_up_to(40);
        let full = scan_fixed_primes(2, 300, &primes, ScanMode::Full, 1).unwrap();
        for r in &full {
            let single = chi_irregularity_index(r.disc().unwrap(), r.p()).unwrap();
            assert_eq!(&single, r);
        }
    }

    #[test]
    fn survey_edge_cases() {
        assert_eq!(high_valuation_survey(&[], 3), (0, vec![]));
        let r = chi_irregularity_index(disc(13), 3).unwrap();
        assert_eq!(high_valuation_survey(&[r], 3), (0, vec![]));
        let r = chi_irregularity_index(disc(24), 3).unwrap();
        assert_eq!(high_valuation_survey(&[r], 3), (1, vec![(24, 2)]));
    }

    #[test]
    fn csv_row_round_trip() {
        let recs = scan_fixed_disc(disc(5), 200, 1).unwrap();
        for r in recs {
            let row = r.to_csv_row();
            assert_eq!(IndexRecord::from_csv_row(&row, IndexKind::Chi).unwrap(), r);
        }
        assert!(IndexRecord::from_csv_row("5,7,6,1,", IndexKind::Chi).is_err());
        assert!(IndexRecord::from_csv_row("9,7,6,0,", IndexKind::Chi).is_err());
    }
}
