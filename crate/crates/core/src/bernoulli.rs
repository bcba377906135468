//! Bernoulli numbers, exact and modulo prime powers, and the generalized
//! Bernoulli numbers `B_{n,χ}` of real quadratic characters.
//!
//! `B_1 = -1/2` throughout. The generalized numbers are expanded as
//!
//! ```text
//! B_{n,χ} = (1/D) Σ_{j=0}^{n} C(n, j) B_j D^j S_{n-j},   S_k = Σ_{a=1}^{D} χ(a) a^k
//! ```
//!
//! and since `S_0 = 0` for a nontrivial character the `j = n` term always
//! vanishes, so `B_n` itself is never needed to obtain `B_{n,χ}`.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{FundamentalDiscriminant, ModRing, ResidueRing};

static BERNOULLI_CACHE: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// Exact `B_n`, memoized across calls.
pub fn bernoulli_exact(n: usize) -> BigRational {
    if let Some(b) = BERNOULLI_CACHE.read().unwrap().get(n) {
        return b.clone();
    }
    let mut cache = BERNOULLI_CACHE.write().unwrap();
    while cache.len() <= n {
        let k = cache.len();
        let next = next_bernoulli(&cache, k);
        cache.push(next);
    }
    cache[n].clone()
}

/// `B_0, …, B_n` in one call.
pub fn bernoulli_exact_upto(n: usize) -> Vec<BigRational> {
    bernoulli_exact(n);
    BERNOULLI_CACHE.read().unwrap()[..=n].to_vec()
}

// Σ_{j=0}^{k} C(k+1, j) B_j = 0, solved for B_k.
fn next_bernoulli(prev: &[BigRational], k: usize) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    if k > 1 && k % 2 == 1 {
        return BigRational::zero();
    }
    let row = binomial_row(k + 1);
    let mut acc = BigRational::zero();
    for (j, b) in prev.iter().enumerate().take(k) {
        if !b.is_zero() {
            acc += b * BigRational::from_integer(row[j].clone());
        }
    }
    -acc / BigRational::from_integer(BigInt::from(k + 1))
}

/// `C(n, 0), …, C(n, n)`.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for j in 1..=n {
        c = c * BigInt::from(n + 1 - j) / BigInt::from(j);
        row.push(c.clone());
    }
    row
}

/// Pascal rows modulo `m`, advanced one row at a time.
struct PascalRows<R> {
    ring: R,
    row: Vec<u64>,
    n: usize,
}

impl<R: ResidueRing> PascalRows<R> {
    fn new(ring: R, capacity: usize) -> Self {
        let mut row = vec![0; capacity + 1];
        row[0] = 1 % ring.modulus();
        Self { ring, row, n: 0 }
    }

    fn advance(&mut self) {
        self.n += 1;
        for j in (1..=self.n).rev() {
            self.row[j] = self.ring.add(self.row[j], self.row[j - 1]);
        }
    }
}

/// Residues of `B_0, …, B_{p-3}` (and `B_{p-2}`) modulo a power of `p`.
///
/// Each step of the recurrence divides by `k + 1 ≤ p - 2`, a unit, and every
/// `B_k` with `k < p - 1` is p-integral, so the residues are exact images.
#[derive(Debug, Clone)]
pub struct ModularBernoulliTable {
    p: u64,
    modulus: u64,
    values: Vec<u64>,
}

impl ModularBernoulliTable {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Residue of `B_n`; `None` outside `0 ≤ n ≤ p - 2`, where the
    /// von Staudt–Clausen denominator makes `B_n` non-integral at `p`.
    pub fn get(&self, n: usize) -> Option<u64> {
        self.values.get(n).copied()
    }
}

/// `B_n mod p` for `n ≤ p - 3`.
pub fn bernoulli_mod_table(p: u64) -> Result<ModularBernoulliTable> {
    bernoulli_mod_table_in(p, ModRing::new(check_odd_prime(p)?))
}

/// As [`bernoulli_mod_table`], modulo the largest power of `p` below `2^32`.
pub fn bernoulli_mod_table_deep(p: u64) -> Result<ModularBernoulliTable> {
    bernoulli_mod_table_in(p, ModRing::largest_prime_power(check_odd_prime(p)?).0)
}

fn check_odd_prime(p: u64) -> Result<u64> {
    if crate::numtheory::is_odd_prime(p) && p < (1 << 32) {
        Ok(p)
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// Residues of `B_n` for `n ≤ p - 2` in any ring `Z/p^e`.
pub fn bernoulli_mod_table_in<R: ResidueRing>(p: u64, ring: R) -> Result<ModularBernoulliTable> {
    check_odd_prime(p)?;
    let top = (p - 2) as usize;
    let mut values = vec![0u64; top + 1];
    values[0] = 1 % ring.modulus();
    let mut pascal = PascalRows::new(ring, top + 1);
    pascal.advance();
    for k in 1..=top {
        pascal.advance();
        if let Some(b) = bernoulli_step(&ring, &pascal.row, &values, k) {
            values[k] = b;
        }
    }
    Ok(ModularBernoulliTable { p, modulus: ring.modulus(), values })
}

/// Character power sums `S_k = Σ_{a=1}^{D} χ(a) a^k`, exact or reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterPowerSums {
    Exact(Vec<BigInt>),
    Reduced { modulus: u64, sums: Vec<u64> },
}

impl CharacterPowerSums {
    pub fn len(&self) -> usize {
        match self {
            CharacterPowerSums::Exact(s) => s.len(),
            CharacterPowerSums::Reduced { sums, .. } => sums.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact(&self) -> Option<&[BigInt]> {
        match self {
            CharacterPowerSums::Exact(s) => Some(s),
            CharacterPowerSums::Reduced { .. } => None,
        }
    }

    pub fn reduced(&self) -> Option<&[u64]> {
        match self {
            CharacterPowerSums::Exact(_) => None,
            CharacterPowerSums::Reduced { sums, .. } => Some(sums),
        }
    }
}

/// `S_0, …, S_{k_max}`; reduced modulo `modulus` (below `2^32`) when given.
pub fn character_power_sums(
    disc: FundamentalDiscriminant,
    k_max: usize,
    modulus: Option<u64>,
) -> CharacterPowerSums {
    let chi = disc.character().period();
    match modulus {
        None => CharacterPowerSums::Exact(exact_power_sums(&chi, k_max)),
        Some(m) => {
            let ring = ModRing::new(m);
            CharacterPowerSums::Reduced { modulus: m, sums: reduced_power_sums(&ring, &chi, k_max) }
        }
    }
}

fn exact_power_sums(chi: &[i8], k_max: usize) -> Vec<BigInt> {
    let mut pos = vec![BigInt::zero(); k_max + 1];
    let mut neg = vec![BigInt::zero(); k_max + 1];
    let mut power = BigInt::zero();
    for (i, &c) in chi.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let a = (i + 1) as u64;
        let target = if c > 0 { &mut pos } else { &mut neg };
        power.set_one();
        for slot in target.iter_mut() {
            *slot += &power;
            power *= a;
        }
    }
    pos.into_iter().zip(neg).map(|(a, b)| a - b).collect()
}

fn reduced_power_sums<R: ResidueRing>(ring: &R, chi: &[i8], k_max: usize) -> Vec<u64> {
    let mut sums = vec![0u64; k_max + 1];
    for (i, &c) in chi.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let a = (i as u64 + 1) % ring.modulus();
        let mut power = 1 % ring.modulus();
        for s in sums.iter_mut() {
            *s = if c > 0 { ring.add(*s, power) } else { ring.sub(*s, power) };
            power = ring.mul(power, a);
        }
    }
    sums
}

/// Exact `B_{n,χ_D}`.
pub fn generalized_bernoulli_exact(disc: FundamentalDiscriminant, n: usize) -> BigRational {
    let sums = character_power_sums(disc, n, None);
    generalized_from_sums(disc, n, sums.exact().expect("exact sums"))
}

fn generalized_from_sums(disc: FundamentalDiscriminant, n: usize, sums: &[BigInt]) -> BigRational {
    let bern = bernoulli_exact_upto(n);
    let row = binomial_row(n);
    let d = BigInt::from(disc.get());
    let mut d_pow = BigInt::one();
    let mut acc = BigRational::zero();
    for j in 0..n {
        if !bern[j].is_zero() && !sums[n - j].is_zero() {
            let coeff = &row[j] * &d_pow * &sums[n - j];
            acc += &bern[j] * BigRational::from_integer(coeff);
        }
        d_pow *= &d;
    }
    acc / BigRational::from_integer(d)
}

/// Exact `B_{n,χ_D}` for every even `n ≤ n_max` (index `n / 2 - 1`), sharing
/// one set of power sums and a common Bernoulli denominator.
pub fn generalized_bernoulli_exact_even(disc: FundamentalDiscriminant, n_max: usize) -> Vec<BigRational> {
    if n_max < 2 {
        return Vec::new();
    }
    let sums = exact_power_sums(&disc.character().period(), n_max);
    let bern = bernoulli_exact_upto(n_max);
    let common = bern.iter().fold(BigInt::one(), |acc, b| acc.lcm(b.denom()));
    let scaled: Vec<BigInt> = bern.iter().map(|b| b.numer() * (&common / b.denom())).collect();
    let d = BigInt::from(disc.get());
    let d_pows: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |x| Some(x * &d))
        .take(n_max + 1)
        .collect();
    let weighted: Vec<BigInt> = scaled.iter().zip(&d_pows).map(|(a, b)| a * b).collect();
    let denom = &common * &d;
    (2..=n_max)
        .step_by(2)
        .map(|n| {
            let row = binomial_row(n);
            let mut acc = BigInt::zero();
            for j in 0..n {
                if !weighted[j].is_zero() {
                    acc += &row[j] * &weighted[j] * &sums[n - j];
                }
            }
            BigRational::new(acc, denom.clone())
        })
        .collect()
}

/// Residues of `B_{n,χ_D}` for even `n ≤ p - 1` modulo a power of `p`.
#[derive(Debug, Clone)]
pub struct ModularGeneralizedTable {
    p: u64,
    modulus: u64,
    /// Index `n`; odd entries unused.
    values: Vec<u64>,
    bernoulli: Vec<u64>,
}

impl ModularGeneralizedTable {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Residue of `B_{n,χ}` for even `2 ≤ n ≤ p - 1`.
    pub fn get(&self, n: usize) -> Option<u64> {
        (n >= 2 && n.is_multiple_of(2)).then(|| self.values.get(n).copied()).flatten()
    }

    /// Residue of the plain `B_n` for `n ≤ p - 2`, a by-product of the sweep.
    pub fn bernoulli(&self, n: usize) -> Option<u64> {
        self.bernoulli.get(n).copied()
    }
}

/// `B_{n,χ_D} mod p`.
pub fn generalized_bernoulli_mod(disc: FundamentalDiscriminant, n: usize, p: u64) -> Result<u64> {
    let table = generalized_bernoulli_mod_table(disc, p, ModRing::new(check_odd_prime(p)?))?;
    table.get(n).ok_or(Error::IndexOutOfRange { n: n as u64, p })
}

/// Every even `B_{n,χ_D}` with `n ≤ p - 1` modulo `ring` (a power of `p`),
/// in one Pascal sweep of `O(p²)` ring operations.
pub fn generalized_bernoulli_mod_table<R: ResidueRing>(
    disc: FundamentalDiscriminant,
    p: u64,
    ring: R,
) -> Result<ModularGeneralizedTable> {
    check_odd_prime(p)?;
    let d = disc.get();
    if d.is_multiple_of(p) {
        return Err(Error::PrimeDividesDiscriminant { p, disc: d });
    }
    let top = (p - 1) as usize;
    let sums = reduced_power_sums(&ring, &disc.character().period(), top);
    let d_mod = d % ring.modulus();
    let d_inv = ring.inv(d_mod).expect("p does not divide D");

    let mut bern = vec![0u64; top];
    // weighted[j] = B_j D^j
    let mut weighted = vec![0u64; top];
    let mut values = vec![0u64; top + 1];
    let mut pascal = PascalRows::new(ring, top + 1);
    bern[0] = 1 % ring.modulus();
    weighted[0] = bern[0];
    for k in 1..=top {
        // Row k: B_{k,χ} uses B_j for j < k; B_{k-1} uses C(k, ·).
        pascal.advance();
        if k >= 2 {
            if let Some(b) = bernoulli_step(&ring, &pascal.row, &bern, k - 1) {
                bern[k - 1] = b;
                weighted[k - 1] = ring.mul(b, ring.pow(d_mod, (k - 1) as u64));
            }
        }
        if k % 2 == 0 {
            let row = &pascal.row;
            let mut acc = ring.mul(row[1], ring.mul(weighted[1], sums[k - 1]));
            acc = ring.add(acc, ring.mul(weighted[0], sums[k]));
            for j in (2..k).step_by(2) {
                acc = ring.add(acc, ring.mul(row[j], ring.mul(weighted[j], sums[k - j])));
            }
            values[k] = ring.mul(acc, d_inv);
        }
    }
    Ok(ModularGeneralizedTable { p, modulus: ring.modulus(), values, bernoulli: bern })
}

// B_k from a Pascal row holding C(k + 1, ·); None when B_k = 0 by parity.
fn bernoulli_step<R: ResidueRing>(ring: &R, row: &[u64], values: &[u64], k: usize) -> Option<u64> {
    if k > 1 && k % 2 == 1 {
        return None;
    }
    let mut acc = row[0];
    if k > 1 {
        acc = ring.add(acc, ring.mul(row[1], values[1]));
        for j in (2..k).step_by(2) {
            acc = ring.add(acc, ring.mul(row[j], values[j]));
        }
    }
    let inv = ring.inv((k + 1) as u64).expect("k + 1 < p is a unit");
    Some(ring.neg(ring.mul(acc, inv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{enumerate_fundamental_discriminants, odd_primes_up_to, p_adic_valuation, rational_mod, PValuation};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn disc(d: i64) -> FundamentalDiscriminant {
        FundamentalDiscriminant::new(d).unwrap()
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli_exact(0), q(1, 1));
        assert_eq!(bernoulli_exact(1), q(-1, 2));
        assert_eq!(bernoulli_exact(2), q(1, 6));
        assert_eq!(bernoulli_exact(12), q(-691, 2730));
    }

    #[test]
    fn odd_bernoulli_vanish() {
        for n in (3..=99).step_by(2) {
            assert!(bernoulli_exact(n).is_zero(), "B_{n}");
        }
    }

    #[test]
    fn von_staudt_clausen_denominators() {
        for n in (2..=60).step_by(2) {
            let expected: u64 = (2..=n as u64 + 1)
                .filter(|&q| crate::numtheory::is_odd_prime(q) || q == 2)
                .filter(|q| (n as u64).is_multiple_of(q - 1))
                .product();
            assert_eq!(bernoulli_exact(n).denom(), &BigInt::from(expected), "B_{n}");
        }
    }

    #[test]
    fn modular_table_examples() {
        assert_eq!(bernoulli_mod_table(7).unwrap().get(2), Some(6));
        assert_eq!(bernoulli_mod_table(5).unwrap().get(2), Some(1));
        for p in [3, 5, 7, 101] {
            assert_eq!(bernoulli_mod_table(p).unwrap().get(0), Some(1));
        }
        assert!(bernoulli_mod_table(9).is_err());
    }

    #[test]
    fn modular_matches_exact() {
        for p in odd_primes_up_to(100) {
            let table = bernoulli_mod_table(p).unwrap();
            for n in (0..=(p as usize - 3)).step_by(2) {
                let exact = rational_mod(&bernoulli_exact(n), p).unwrap();
                assert_eq!(table.get(n), Some(exact), "B_{n} mod {p}");
            }
            let deep = bernoulli_mod_table_deep(p).unwrap();
            for n in (0..=(p as usize - 3)).step_by(2) {
                let exact = rational_mod(&bernoulli_exact(n), deep.modulus()).unwrap();
                assert_eq!(deep.get(n), Some(exact), "B_{n} mod {p}^e");
            }
        }
    }

    #[test]
    fn power_sum_examples() {
        let s = character_power_sums(disc(5), 4, None);
        let s = s.exact().unwrap();
        assert!(s[0].is_zero());
        assert_eq!(s[2], BigInt::from(4));
        assert!(character_power_sums(disc(8), 3, None).exact().unwrap()[0].is_zero());
        let r = character_power_sums(disc(5), 4, Some(7));
        assert_eq!(r.reduced().unwrap()[2], 4);
    }

    #[test]
    fn generalized_examples() {
        assert_eq!(generalized_bernoulli_exact(disc(5), 2), q(4, 5));
        assert_eq!(generalized_bernoulli_exact(disc(5), 4), q(-8, 1));
        assert_eq!(generalized_bernoulli_exact(disc(8), 2), q(2, 1));
        assert_eq!(generalized_bernoulli_mod(disc(5), 2, 7).unwrap(), 5);
        assert_eq!(generalized_bernoulli_mod(disc(5), 4, 7).unwrap(), 6);
        assert_eq!(generalized_bernoulli_mod(disc(8), 2, 3).unwrap(), 2);
    }

    #[test]
    fn generalized_mod_errors() {
        assert_eq!(
            generalized_bernoulli_mod(disc(5), 2, 5).unwrap_err(),
            Error::PrimeDividesDiscriminant { p: 5, disc: 5 }
        );
        assert_eq!(
            generalized_bernoulli_mod(disc(5), 8, 7).unwrap_err(),
            Error::IndexOutOfRange { n: 8, p: 7 }
        );
    }

    // Independent route: D^{n-1} Σ χ(a) B_n(a/D) with B_n(x) = Σ C(n,j) B_j x^{n-j}.
    fn generalized_by_polynomial(d: FundamentalDiscriminant, n: usize) -> BigRational {
        let bern = bernoulli_exact_upto(n);
        let row = binomial_row(n);
        let dd = BigInt::from(d.get());
        let mut total = BigRational::zero();
        for a in 1..=d.get() {
            let c = d.character().eval(a);
            if c == 0 {
                continue;
            }
            let x = BigRational::new(BigInt::from(a), dd.clone());
            let mut poly = BigRational::zero();
            for j in 0..=n {
                poly += &bern[j] * BigRational::from_integer(row[j].clone()) * num_traits::pow(x.clone(), n - j);
            }
            total += poly * BigRational::from_integer(BigInt::from(c));
        }
        total * BigRational::from_integer(num_traits::pow(dd, n - 1))
    }

    #[test]
    fn generalized_matches_polynomial_route() {
        for d in enumerate_fundamental_discriminants(2, 60) {
            for n in 1..=8 {
                assert_eq!(generalized_bernoulli_exact(d, n), generalized_by_polynomial(d, n), "D={d} n={n}");
            }
        }
    }

    #[test]
    fn even_batch_matches_single() {
        for d in enumerate_fundamental_discriminants(2, 80) {
            let batch = generalized_bernoulli_exact_even(d, 20);
            for (i, value) in batch.iter().enumerate() {
                assert_eq!(value, &generalized_bernoulli_exact(d, 2 * i + 2), "D={d}");
            }
        }
    }

    #[test]
    fn generalized_modular_matches_exact() {
        let discs = enumerate_fundamental_discriminants(2, 100);
        for &d in &discs {
            let exact = generalized_bernoulli_exact_even(d, 98);
            for p in odd_primes_up_to(100) {
                if d.get() % p == 0 {
                    continue;
                }
                let table = generalized_bernoulli_mod_table(d, p, ModRing::new(p)).unwrap();
                for n in (2..=(p as usize - 1)).step_by(2) {
                    let want = rational_mod(&exact[n / 2 - 1], p).unwrap();
                    assert_eq!(table.get(n), Some(want), "D={d} n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn generalized_p_integrality() {
        for d in enumerate_fundamental_discriminants(2, 500) {
            let exact = generalized_bernoulli_exact_even(d, 6);
            for p in [3u64, 5, 7] {
                if d.get() == p {
                    continue;
                }
                for n in (2..=(p as usize - 1)).step_by(2) {
                    assert!(p_adic_valuation(&exact[n / 2 - 1], p).at_least(0), "D={d} n={n} p={p}");
                }
            }
        }
        assert_eq!(p_adic_valuation(&generalized_bernoulli_exact(disc(5), 2), 5), PValuation::Finite(-1));
    }
}
