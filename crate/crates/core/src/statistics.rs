//! Predicted index distributions, grouped chi-squared statistics with their
//! significance levels, and the residue-class, ratio and residue reports.
//!
//! This is the only floating-point module. The exact small-p distribution is
//! also available in rational form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irregularity::{IndexRecord, IrregularPair};

/// `(1/2)^r e^{-1/2} / r!`, the limiting fraction of primes with index `r`.
pub fn limit_fraction(r: u64) -> f64 {
    let mut f = (-0.5f64).exp();
    for k in 1..=r {
        f *= 0.5 / k as f64;
    }
    f
}

fn binomial_trials(p: u64, is_d_equal_p: bool) -> u64 {
    // D = p only occurs for p ≡ 1 mod 4, where (p-1)/4 = δ/2 exactly.
    if is_d_equal_p {
        (p - 1) / 4
    } else {
        (p - 1) / 2
    }
}

/// `P(r) = C(T, r) (1/p)^r (1 - 1/p)^{T-r}` for `r = 0..=T`, with `T = δ/2`.
pub fn exact_index_distribution(p: u64, is_d_equal_p: bool) -> Vec<BigRational> {
    let t = binomial_trials(p, is_d_equal_p);
    let denom = BigInt::from(p).pow(t as u32);
    let q = BigInt::from(p - 1);
    let mut out = Vec::with_capacity(t as usize + 1);
    let mut binom = BigInt::one();
    for r in 0..=t {
        if r > 0 {
            binom = binom * BigInt::from(t - r + 1) / BigInt::from(r);
        }
        let num = &binom * q.pow((t - r) as u32);
        out.push(BigRational::new(num, denom.clone()));
    }
    out
}

/// Floating-point version of [`exact_index_distribution`], evaluated in log space.
pub fn exact_index_probabilities(p: u64, is_d_equal_p: bool) -> Vec<f64> {
    let t = binomial_trials(p, is_d_equal_p);
    let ln_hit = -(p as f64).ln();
    let ln_miss = (-1.0 / p as f64).ln_1p();
    let mut out = Vec::with_capacity(t as usize + 1);
    let mut ln_binom = 0.0;
    for r in 0..=t {
        if r > 0 {
            ln_binom += ((t - r + 1) as f64).ln() - (r as f64).ln();
        }
        out.push((ln_binom + r as f64 * ln_hit + (t - r) as f64 * ln_miss).exp());
    }
    out
}

/// An index class: a single value or a tail `r ≥ t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Exactly(u64),
    AtLeast(u64),
}

impl Category {
    pub fn contains(&self, r: u64) -> bool {
        match *self {
            Category::Exactly(v) => r == v,
            Category::AtLeast(t) => r >= t,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Exactly(v) => write!(f, "{v}"),
            Category::AtLeast(t) => write!(f, ">={t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grouping(Vec<Category>);

impl Grouping {
    /// `{0}, {1}, {2}, {≥3}`.
    pub fn wagstaff() -> Self {
        Self::tail_at(3)
    }

    /// Singletons below `t` and one tail class `≥ t`.
    pub fn tail_at(t: u64) -> Self {
        let mut cats: Vec<Category> = (0..t).map(Category::Exactly).collect();
        cats.push(Category::AtLeast(t));
        Grouping(cats)
    }

    /// `{0}, ..., {n-1}` with no tail class.
    pub fn singletons(n: u64) -> Self {
        Grouping((0..n).map(Category::Exactly).collect())
    }

    /// An explicit category list; the classes must be pairwise disjoint.
    pub fn explicit(categories: Vec<Category>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::InvalidArgument("a grouping needs at least one category".into()));
        }
        let tails: Vec<u64> = categories
            .iter()
            .filter_map(|c| match c {
                Category::AtLeast(t) => Some(*t),
                _ => None,
            })
            .collect();
        if tails.len() > 1 {
            return Err(Error::InvalidArgument("at most one tail category is allowed".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &categories {
            if let Category::Exactly(v) = c {
                if !seen.insert(*v) || tails.first().is_some_and(|t| v >= t) {
                    return Err(Error::InvalidArgument(format!("category {v} overlaps another category")));
                }
            }
        }
        Ok(Grouping(categories))
    }

    pub fn categories(&self) -> &[Category] {
        &self.0
    }

    fn find(&self, r: u64) -> Option<usize> {
        self.0.iter().position(|c| c.contains(r))
    }

    /// Largest value that must be shown as its own row.
    fn display_floor(&self) -> u64 {
        self.0
            .iter()
            .map(|c| match *c {
                Category::Exactly(v) => v,
                Category::AtLeast(t) => t + 1,
            })
            .max()
            .unwrap_or(0)
    }
}

impl Default for Grouping {
    fn default() -> Self {
        Self::wagstaff()
    }
}

/// `Σ (o - e)² / e` over categories, with `df = #categories - 1`.
pub fn chi_squared_statistic(observed: &[f64], expected: &[f64]) -> Result<(f64, usize)> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected must be nonempty and of equal length".into()));
    }
    let mut stat = 0.0;
    for (i, (&o, &e)) in observed.iter().zip(expected).enumerate() {
        if e <= 0.0 {
            return Err(Error::ZeroExpected(i.to_string()));
        }
        stat += (o - e) * (o - e) / e;
    }
    Ok((stat, observed.len() - 1))
}

/// Upper-tail probability of the chi-squared distribution, `Q(df/2, x/2)`.
pub fn significance(statistic: f64, df: usize) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    if df == 0 {
        return 0.0;
    }
    regularized_gamma_q(df as f64 / 2.0, statistic / 2.0)
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 10_000;

/// Regularized upper incomplete gamma `Q(a, x)`, `a > 0`, `x ≥ 0`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a {
        (1.0 - gamma_p_series(a, x)).clamp(0.0, 1.0)
    } else {
        gamma_q_continued_fraction(a, x).clamp(0.0, 1.0)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

// Modified Lentz evaluation of the continued fraction for Q.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    h * gamma_prefactor(a, x)
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// How expected counts are predicted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// `N · limit_fraction(r)`.
    #[default]
    Limit,
    /// Sum over records of the per-prime binomial probabilities.
    /// With `respect_exceptional`, a record with `D = p` uses `T = (p-1)/4`
    /// trials instead of `(p-1)/2`.
    ExactSmallP { respect_exceptional: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Primes for one fixed discriminant.
    PrimesFixedDiscriminant,
    /// `(D, p)` pairs over several discriminants.
    PairsVaryingDiscriminant,
    /// Plain samples (residues, primes in classes).
    Samples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub index: u64,
    pub observed: f64,
    pub expected: f64,
    /// `u_r(x)`.
    pub observed_fraction: f64,
    pub predicted_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: Category,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub population: Population,
    pub size: u64,
    pub rows: Vec<IndexRow>,
    pub categories: Vec<CategoryRow>,
    pub chi_squared: f64,
    pub df: usize,
    pub significance: f64,
}

impl DistributionTable {
    fn from_parts(population: Population, size: u64, rows: Vec<IndexRow>, categories: Vec<CategoryRow>) -> Result<Self> {
        let df = categories.len().saturating_sub(1);
        let (chi_squared, significance) = if size == 0 {
            (0.0, 1.0)
        } else {
            if let Some(c) = categories.iter().find(|c| c.expected <= 0.0) {
                return Err(Error::ZeroExpected(c.category.to_string()));
            }
            let obs: Vec<f64> = categories.iter().map(|c| c.observed).collect();
            let exp: Vec<f64> = categories.iter().map(|c| c.expected).collect();
            let (stat, _) = chi_squared_statistic(&obs, &exp)?;
            (stat, significance(stat, df))
        };
        Ok(Self { population, size, rows, categories, chi_squared, df, significance })
    }

    fn scaled(&self, k: f64) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| IndexRow { observed: r.observed / k, expected: r.expected / k, ..r.clone() })
            .collect();
        let categories = self
            .categories
            .iter()
            .map(|c| CategoryRow { observed: c.observed / k, expected: c.expected / k, ..c.clone() })
            .collect();
        Self::from_parts(self.population, self.size, rows, categories)
    }
}

fn population_of(records: &[IndexRecord]) -> Population {
    let first = records.first().map(|r| r.disc());
    if records.iter().all(|r| Some(r.disc()) == first) {
        Population::PrimesFixedDiscriminant
    } else {
        Population::PairsVaryingDiscriminant
    }
}

/// Observed and predicted index distribution of `records`, grouped for the
/// chi-squared statistic. Rows run from 0 to the largest observed index (at
/// least through the grouping's singletons).
pub fn build_distribution(
    records: &[IndexRecord],
    prediction: Prediction,
    grouping: &Grouping,
) -> Result<DistributionTable> {
    let n = records.len();
    let population = population_of(records);
    let max_index = records.iter().map(|r| r.index() as u64).max().unwrap_or(0);

    let mut observed_by_index = vec![0u64; max_index as usize + 1];
    for r in records {
        observed_by_index[r.index()] += 1;
    }

    let nf = n as f64;
    let cats = grouping.categories();
    let mut cat_observed = vec![0.0; cats.len()];
    for (r, &count) in observed_by_index.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let i = grouping.find(r as u64).ok_or_else(|| {
            Error::InvalidArgument(format!("index {r} is not covered by the grouping"))
        })?;
        cat_observed[i] += count as f64;
    }

    let (expected_at, cat_expected): (Box<dyn Fn(u64) -> f64>, Vec<f64>) = match prediction {
        Prediction::Limit => {
            let cat_expected = cats
                .iter()
                .map(|c| match *c {
                    Category::Exactly(v) => nf * limit_fraction(v),
                    Category::AtLeast(t) => nf * (1.0 - (0..t).map(limit_fraction).sum::<f64>()),
                })
                .collect();
            (Box::new(move |r| nf * limit_fraction(r)), cat_expected)
        }
        Prediction::ExactSmallP { respect_exceptional } => {
            let mut cache: HashMap<(u64, bool), Vec<f64>> = HashMap::new();
            let mut by_index: Vec<f64> = Vec::new();
            for rec in records {
                let exc = respect_exceptional && rec.context.is_exceptional();
                let probs = cache.entry((rec.p(), exc)).or_insert_with(|| exact_index_probabilities(rec.p(), exc));
                if by_index.len() < probs.len() {
                    by_index.resize(probs.len(), 0.0);
                }
                for (acc, &q) in by_index.iter_mut().zip(probs.iter()) {
                    *acc += q;
                }
            }
            let cat_expected = cats
                .iter()
                .map(|c| by_index.iter().enumerate().filter(|(r, _)| c.contains(*r as u64)).map(|(_, q)| q).sum())
                .collect();
            (Box::new(move |r| by_index.get(r as usize).copied().unwrap_or(0.0)), cat_expected)
        }
    };

    let last_row = max_index.max(match prediction {
        Prediction::Limit => grouping.display_floor(),
        Prediction::ExactSmallP { .. } => {
            let t_max = records.iter().map(|r| (r.p() - 1) / 2).max().unwrap_or(0);
            t_max.min(grouping.display_floor())
        }
    });
    let rows = (0..=last_row)
        .map(|r| {
            let observed = observed_by_index.get(r as usize).copied().unwrap_or(0) as f64;
            let expected = expected_at(r);
            IndexRow {
                index: r,
                observed,
                expected,
                observed_fraction: if n == 0 { 0.0 } else { observed / nf },
                predicted_fraction: match prediction {
                    Prediction::Limit => limit_fraction(r),
                    _ if n == 0 => 0.0,
                    _ => expected / nf,
                },
            }
        })
        .collect();
    let categories = cats
        .iter()
        .zip(cat_observed.into_iter().zip(cat_expected))
        .map(|(&category, (observed, expected))| CategoryRow { category, observed, expected })
        .collect();
    DistributionTable::from_parts(population, n as u64, rows, categories)
}

/// Totals over all records, and the same table divided by the number of
/// distinct discriminants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub discriminants: usize,
    pub totals: DistributionTable,
    /// Per-discriminant means; its chi-squared is a heuristic figure.
    pub averages: DistributionTable,
}

pub fn aggregate_across_discriminants(
    records: &[IndexRecord],
    prediction: Prediction,
    grouping: &Grouping,
) -> Result<AggregateReport> {
    let discs: BTreeSet<_> = records.iter().map(|r| r.disc().map(|d| d.get())).collect();
    if discs.is_empty() {
        return Err(Error::InvalidArgument("aggregation needs records for at least one discriminant".into()));
    }
    let totals = build_distribution(records, prediction, grouping)?;
    let averages = totals.scaled(discs.len() as f64)?;
    Ok(AggregateReport { discriminants: discs.len(), totals, averages })
}

/// Distribution of `irregular` primes over the residue classes mod `n`,
/// against the share of `all_odd_primes` in each class.
pub fn residue_class_report(irregular: &[u64], all_odd_primes: &[u64], n: u64) -> Result<DistributionTable> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("modulus must be at least 3 (got {n})")));
    }
    if irregular.is_empty() || all_odd_primes.is_empty() {
        return Err(Error::InvalidArgument("prime sets must be nonempty".into()));
    }
    let mut classes: BTreeSet<u64> = (1..n).filter(|c| c.gcd(&n) == 1).collect();
    classes.extend(all_odd_primes.iter().filter(|&&q| n.is_multiple_of(q)).map(|q| q % n));

    let mut all_counts: HashMap<u64, u64> = HashMap::new();
    for &q in all_odd_primes {
        *all_counts.entry(q % n).or_default() += 1;
    }
    let mut irr_counts: HashMap<u64, u64> = HashMap::new();
    for &q in irregular {
        *irr_counts.entry(q % n).or_default() += 1;
    }
    let total_irr = irregular.len() as f64;
    let total_all = all_odd_primes.len() as f64;
    let rows: Vec<IndexRow> = classes
        .iter()
        .map(|&c| {
            let observed = irr_counts.get(&c).copied().unwrap_or(0) as f64;
            let share = all_counts.get(&c).copied().unwrap_or(0) as f64 / total_all;
            IndexRow {
                index: c,
                observed,
                expected: total_irr * share,
                observed_fraction: observed / total_irr,
                predicted_fraction: share,
            }
        })
        .collect();
    sample_table(irregular.len() as u64, rows)
}

fn sample_table(size: u64, rows: Vec<IndexRow>) -> Result<DistributionTable> {
    let categories = rows
        .iter()
        .map(|r| CategoryRow { category: Category::Exactly(r.index), observed: r.observed, expected: r.expected })
        .collect();
    DistributionTable::from_parts(Population::Samples, size, rows, categories)
}

/// Counts of residues `0..p` against the uniform expectation `N/p`.
pub fn residue_histogram(values: &[u64], p: u64) -> Result<DistributionTable> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("residue histogram needs at least one value".into()));
    }
    if p < 2 {
        return Err(Error::NotOddPrime(p));
    }
    let mut counts = vec![0u64; p as usize];
    for &v in values {
        counts[(v % p) as usize] += 1;
    }
    let n = values.len() as f64;
    let rows = counts
        .iter()
        .enumerate()
        .map(|(c, &k)| IndexRow {
            index: c as u64,
            observed: k as f64,
            expected: n / p as f64,
            observed_fraction: k as f64 / n,
            predicted_fraction: 1.0 / p as f64,
        })
        .collect();
    sample_table(values.len() as u64, rows)
}

/// Uniformity of `2m/p` over irregular pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub pairs: usize,
    /// Counts per equal-width bin of `(0, 1)`.
    pub histogram: Vec<u64>,
    pub chi_squared: f64,
    pub df: usize,
    pub significance: f64,
    /// Kolmogorov–Smirnov distance to the uniform distribution.
    pub ks: f64,
}

pub fn ratio_uniformity_report(pairs: &[IrregularPair], bins: usize) -> Result<RatioReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("ratio report needs at least one irregular pair".into()));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins (got {bins})")));
    }
    let mut ratios: Vec<f64> = pairs.iter().map(|pr| pr.two_m as f64 / pr.p as f64).collect();
    ratios.sort_by(f64::total_cmp);

    let mut histogram = vec![0u64; bins];
    for &u in &ratios {
        histogram[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let n = ratios.len() as f64;
    let expected = vec![n / bins as f64; bins];
    let observed: Vec<f64> = histogram.iter().map(|&k| k as f64).collect();
    let (chi_squared, df) = chi_squared_statistic(&observed, &expected)?;
    Ok(RatioReport {
        pairs: pairs.len(),
        histogram,
        chi_squared,
        df,
        significance: significance(chi_squared, df),
        ks: ks_uniform(&ratios),
    })
}

/// Kolmogorov–Smirnov distance of sorted samples in `[0, 1]` to the uniform CDF.
pub fn ks_uniform(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let above = (i + 1) as f64 / n - u;
            let below = u - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Sum of a rational probability vector; used to check normalization.
pub fn rational_total(probs: &[BigRational]) -> BigRational {
    probs.iter().fold(BigRational::zero(), |acc, q| acc + q)
}
