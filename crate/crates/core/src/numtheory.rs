//! Integer and character primitives: the Kronecker symbol, fundamental
//! discriminants, prime and divisor-sum sieves, p-adic valuations and a
//! small modular ring used by the fast residue paths.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronecker symbol `(a/n)` for a non-negative lower argument.
///
/// `(a/0)` is 1 for `a = ±1` and 0 otherwise; `(a/2)` is 0 for even `a`,
/// +1 for `a ≡ ±1 (mod 8)` and -1 for `a ≡ ±3 (mod 8)`.
pub fn kronecker_symbol(a: i64, n: u64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut sign = 1i8;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a.rem_euclid(2) == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= twos;
    }
    if n == 1 {
        return sign;
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    // Jacobi symbol (a/n) for odd n by binary reciprocity.
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Trial-division squarefree test; fine for the single-value checks the
/// enumeration sieve does not cover.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return false;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    true
}

/// True iff `d` is the discriminant of a real quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    let d = d as u64;
    match d % 4 {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m % 4, 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Discriminant `D > 1` of a real quadratic field `Q(√D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FundamentalDiscriminant(u64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental_discriminant(d) {
            Ok(Self(d as u64))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn character(self) -> QuadraticCharacter {
        QuadraticCharacter { disc: self }
    }
}

impl TryFrom<u64> for FundamentalDiscriminant {
    type Error = Error;

    fn try_from(d: u64) -> Result<Self> {
        i64::try_from(d)
            .map_err(|_| Error::NotFundamental(i64::MAX))
            .and_then(Self::new)
    }
}

impl From<FundamentalDiscriminant> for u64 {
    fn from(d: FundamentalDiscriminant) -> u64 {
        d.0
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The quadratic character `a ↦ (D/a)` attached to a real quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticCharacter {
    disc: FundamentalDiscriminant,
}

impl QuadraticCharacter {
    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.disc
    }

    pub fn eval(&self, a: u64) -> i8 {
        kronecker_symbol(self.disc.0 as i64, a)
    }

    /// Values `χ(1), …, χ(D)` (index `a - 1`).
    pub fn period(&self) -> Vec<i8> {
        (1..=self.disc.0).map(|a| self.eval(a)).collect()
    }
}

/// Fundamental discriminants in `[lo, hi)`, ascending.
pub fn enumerate_fundamental_discriminants(lo: u64, hi: u64) -> Vec<FundamentalDiscriminant> {
    if hi <= lo.max(2) {
        return Vec::new();
    }
    let squarefree = squarefree_sieve(hi);
    (lo.max(2)..hi)
        .filter(|&d| match d % 4 {
            1 => squarefree[d as usize],
            0 => {
                let m = d / 4;
                matches!(m % 4, 2 | 3) && squarefree[m as usize]
            }
            _ => false,
        })
        .map(FundamentalDiscriminant)
        .collect()
}

/// `flags[n]` is true iff `n` is squarefree, for `n < limit`.
fn squarefree_sieve(limit: u64) -> Vec<bool> {
    let limit = limit as usize;
    let mut flags = vec![true; limit];
    if limit > 0 {
        flags[0] = false;
    }
    let mut q = 2usize;
    while q * q < limit {
        if flags[q] {
            let sq = q * q;
            let mut m = sq;
            while m < limit {
                flags[m] = false;
                m += sq;
            }
        }
        q += 1;
    }
    flags
}

/// Odd primes `p < x`, ascending.
pub fn odd_primes_up_to(x: u64) -> Vec<u64> {
    if x <= 3 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n];
    let mut i = 3usize;
    while i * i < n {
        if !composite[i] {
            let mut m = i * i;
            while m < n {
                composite[m] = true;
                m += 2 * i;
            }
        }
        i += 2;
    }
    (3..n)
        .step_by(2)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 2;
    }
    true
}

/// Table of `σ_k(n) = Σ_{d|n} d^k` for `1 ≤ n ≤ limit`.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    exponent: u32,
    entries: Vec<u128>,
}

impl SigmaTable {
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn limit(&self) -> u64 {
        (self.entries.len() - 1) as u64
    }

    /// `σ_k(n)`; panics when `n` is zero or beyond the limit.
    pub fn get(&self, n: u64) -> u128 {
        assert!(n >= 1, "sigma is indexed from 1");
        self.entries[n as usize]
    }
}

/// Sieves `σ_k(n)` for `k ∈ {1, 3}` in `O(limit log limit)` additions.
pub fn divisor_sigma_sieve(k: u32, limit: u64) -> Result<SigmaTable> {
    if k != 1 && k != 3 {
        return Err(Error::SigmaExponent(k));
    }
    if limit == 0 {
        return Err(Error::InvalidArgument("sigma table limit must be at least 1".into()));
    }
    // σ_k(n) < n^k · n, so limit^(k+1) bounds every entry.
    let fits = (0..=k).try_fold(1u128, |acc, _| acc.checked_mul(limit as u128));
    if fits.is_none() || usize::try_from(limit).is_err() {
        return Err(Error::SigmaOverflow { limit, k });
    }
    let n = limit as usize;
    let mut entries = vec![0u128; n + 1];
    for d in 1..=n {
        let dk = (d as u128).pow(k);
        let mut m = d;
        while m <= n {
            entries[m] += dk;
            m += d;
        }
    }
    Ok(SigmaTable { exponent: k, entries })
}

/// p-adic valuation; the zero rational has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PValuation {
    Finite(i64),
    Infinite,
}

impl PValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            PValuation::Finite(v) => Some(v),
            PValuation::Infinite => None,
        }
    }

    /// Shifts by `k` (multiplication by `p^k`).
    pub fn shift(self, k: i64) -> Self {
        match self {
            PValuation::Finite(v) => PValuation::Finite(v + k),
            PValuation::Infinite => PValuation::Infinite,
        }
    }

    pub fn at_least(self, k: i64) -> bool {
        match self {
            PValuation::Finite(v) => v >= k,
            PValuation::Infinite => true,
        }
    }
}

impl std::ops::Add for PValuation {
    type Output = PValuation;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PValuation::Finite(a), PValuation::Finite(b)) => PValuation::Finite(a + b),
            _ => PValuation::Infinite,
        }
    }
}

impl fmt::Display for PValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValuation::Finite(v) => v.fmt(f),
            PValuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn integer_valuation(n: &BigInt, p: u64) -> PValuation {
    if n.is_zero() {
        return PValuation::Infinite;
    }
    let mut n = n.abs();
    let p = BigInt::from(p);
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return PValuation::Finite(v);
        }
        n = q;
        v += 1;
    }
}

pub fn u128_valuation(mut n: u128, p: u64) -> PValuation {
    if n == 0 {
        return PValuation::Infinite;
    }
    let p = p as u128;
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    PValuation::Finite(v)
}

/// Exponent of `p` in a rational (negative when `p` divides the reduced
/// denominator).
pub fn p_adic_valuation(q: &BigRational, p: u64) -> PValuation {
    if q.is_zero() {
        return PValuation::Infinite;
    }
    let num = integer_valuation(q.numer(), p);
    let den = integer_valuation(q.denom(), p).finite().unwrap_or(0);
    num.shift(-den)
}

/// Reduces a rational with denominator prime to `modulus` into `Z/modulus`.
pub fn rational_mod(q: &BigRational, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let num = (q.numer() % &m + &m) % &m;
    let den = (q.denom() % &m + &m) % &m;
    let ring = WideModRing::new(modulus);
    let inv = ring.inv(den.to_u64()?)?;
    Some(ring.mul(num.to_u64()?, inv))
}

/// Operations shared by the narrow and wide residue rings.
pub trait ResidueRing: Copy + Send + Sync {
    fn modulus(&self) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus();
        let s = a + b;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus() - b
        }
    }

    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus() - a
        }
    }

    fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus() as i64) as u64
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus();
        base %= self.modulus();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit, `None` when `gcd(a, m) > 1`.
    fn inv(&self, a: u64) -> Option<u64> {
        let (mut r0, mut r1) = (self.modulus() as i128, (a % self.modulus()) as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        (r0 == 1).then(|| t0.rem_euclid(self.modulus() as i128) as u64)
    }

    /// Valuation of a residue modulo `p^e`; `None` when the residue is zero
    /// (the true valuation is at least `e`).
    fn residue_valuation(&self, r: u64, p: u64) -> Option<i64> {
        if r == 0 {
            return None;
        }
        let mut r = r;
        let mut v = 0;
        while r.is_multiple_of(p) {
            r /= p;
            v += 1;
        }
        Some(v)
    }
}

/// `Z/m` for `m < 2^32`, so products fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModRing {
    modulus: u64,
}

impl ModRing {
    pub fn new(modulus: u64) -> Self {
        assert!((2..(1 << 32)).contains(&modulus), "modulus out of range");
        Self { modulus }
    }

    /// The largest power `p^e < 2^32` (at least `p` itself).
    pub fn largest_prime_power(p: u64) -> (Self, u32) {
        let (m, e) = largest_power_below(p, 1 << 32);
        (Self::new(m), e)
    }
}

impl ResidueRing for ModRing {
    #[inline]
    fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }
}

/// `Z/m` for `m < 2^63` with 128-bit products; used to deepen valuations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideModRing {
    modulus: u64,
}

impl WideModRing {
    pub fn new(modulus: u64) -> Self {
        assert!((2..(1 << 63)).contains(&modulus), "modulus out of range");
        Self { modulus }
    }

    /// The largest power `p^e < 2^63`.
    pub fn largest_prime_power(p: u64) -> (Self, u32) {
        let (m, e) = largest_power_below(p, 1 << 63);
        (Self::new(m), e)
    }
}

impl ResidueRing for WideModRing {
    #[inline]
    fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }
}

fn largest_power_below(p: u64, bound: u64) -> (u64, u32) {
    let mut m = p;
    let mut e = 1;
    while m.checked_mul(p).is_some_and(|x| x < bound) {
        m *= p;
        e += 1;
    }
    (m, e)
}
