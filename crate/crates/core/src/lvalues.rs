//! Special values `ζ(1-2m)`, `L(1-2m, χ_D)` and `ζ_D(1-2m) = ζ(1-2m) L(1-2m, χ_D)`.
//!
//! Three routes are provided: exact rationals from generalized Bernoulli
//! numbers, residues modulo `p` from the modular Bernoulli sweep, and, for
//! `m ∈ {1, 2}`, closed divisor-sum formulas
//!
//! ```text
//! ζ_D(-1) = (1/60)  Σ_b σ₁((D - b²)/4)
//! ζ_D(-3) = (1/120) Σ_b σ₃((D - b²)/4)
//! ```
//!
//! over all integers `b` with `b² < D` and `b ≡ D (mod 2)`. The divisor-sum
//! route is only trusted after [`validate_siegel_against_bernoulli`] passes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bernoulli::{bernoulli_exact, generalized_bernoulli_exact, generalized_bernoulli_mod};
use crate::error::{Error, Result};
use crate::numtheory::{
    enumerate_fundamental_discriminants, u128_valuation, FundamentalDiscriminant, ModRing, PValuation, ResidueRing,
    SigmaTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Riemann,
    LChi,
    ZetaD,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueRepr {
    Exact(BigRational),
    Residue { value: u64, modulus: u64 },
}

/// A computed special value at `s = 1 - 2m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialValue {
    pub kind: ValueKind,
    pub disc: Option<FundamentalDiscriminant>,
    pub m: u64,
    pub value: ValueRepr,
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn check_m(m: u64) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    usize::try_from(2 * m).map_err(|_| Error::InvalidArgument(format!("m = {m} is too large")))
}

/// `ζ(1-2m) = -B_{2m}/(2m)`.
pub fn riemann_zeta_neg(m: u64) -> Result<BigRational> {
    let n = check_m(m)?;
    Ok(-bernoulli_exact(n) / rational(n as i64, 1))
}

/// `L(1-2m, χ_D) = -B_{2m,χ}/(2m)`.
pub fn l_chi_exact(disc: FundamentalDiscriminant, m: u64) -> Result<BigRational> {
    let n = check_m(m)?;
    Ok(-generalized_bernoulli_exact(disc, n) / rational(n as i64, 1))
}

/// `L(1-2m, χ_D) mod p` for `p ∤ D` and `2m ≤ p - 1`.
pub fn l_chi_mod(disc: FundamentalDiscriminant, m: u64, p: u64) -> Result<u64> {
    let n = check_m(m)?;
    if disc.get().is_multiple_of(p) {
        return Err(Error::PrimeDividesDiscriminant { p, disc: disc.get() });
    }
    if n as u64 > p.saturating_sub(1) {
        return Err(Error::IndexOutOfRange { n: n as u64, p });
    }
    let b = generalized_bernoulli_mod(disc, n, p)?;
    let ring = ModRing::new(p);
    let inv = ring.inv(n as u64).expect("2m < p");
    Ok(ring.neg(ring.mul(b, inv)))
}

/// `ζ_D(1-2m) = ζ(1-2m) · L(1-2m, χ_D)`.
pub fn zeta_d_exact(disc: FundamentalDiscriminant, m: u64) -> Result<BigRational> {
    Ok(riemann_zeta_neg(m)? * l_chi_exact(disc, m)?)
}

/// Raw divisor sum `Σ_b σ_k((D - b²)/4)` over `b² < D`, `b ≡ D (mod 2)`.
pub fn siegel_sum(disc: FundamentalDiscriminant, sigma: &SigmaTable) -> Result<u128> {
    let d = disc.get();
    let need = (d - 1) / 4;
    if need > sigma.limit() {
        return Err(Error::SigmaTooShort { have: sigma.limit(), need });
    }
    let mut total = 0u128;
    let mut b = d % 2;
    while b * b < d {
        let term = sigma.get((d - b * b) / 4);
        total += if b == 0 { term } else { 2 * term };
        b += 2;
    }
    Ok(total)
}

/// The same sum reduced modulo `modulus`, for valuation-only scans.
pub fn siegel_sum_mod(disc: FundamentalDiscriminant, sigma: &SigmaTable, modulus: u64) -> Result<u64> {
    let d = disc.get();
    let need = (d - 1) / 4;
    if need > sigma.limit() {
        return Err(Error::SigmaTooShort { have: sigma.limit(), need });
    }
    let m = modulus as u128;
    let mut total = 0u128;
    let mut b = d % 2;
    while b * b < d {
        let term = sigma.get((d - b * b) / 4) % m;
        total = (total + if b == 0 { term } else { 2 * term }) % m;
        b += 2;
    }
    Ok(total as u64)
}

fn siegel_denominator(m: u64) -> Result<u128> {
    match m {
        1 => Ok(60),
        2 => Ok(120),
        other => Err(Error::SiegelOrder(other)),
    }
}

fn check_sigma(m: u64, sigma: &SigmaTable) -> Result<()> {
    let k = if m == 1 { 1 } else { 3 };
    if sigma.exponent() != k {
        return Err(Error::InvalidArgument(format!(
            "m = {m} needs a sigma_{k} table, got sigma_{}",
            sigma.exponent()
        )));
    }
    Ok(())
}

/// `ζ_D(1-2m)` for every fundamental `D` in `[lo, hi)` by the divisor-sum
/// formulas, ascending in `D`.
pub fn siegel_batch(
    m: u64,
    lo: u64,
    hi: u64,
    sigma: &SigmaTable,
) -> Result<Vec<(FundamentalDiscriminant, BigRational)>> {
    let denom = siegel_denominator(m)?;
    check_sigma(m, sigma)?;
    let need = hi.saturating_sub(1) / 4;
    if need > sigma.limit() {
        return Err(Error::SigmaTooShort { have: sigma.limit(), need });
    }
    enumerate_fundamental_discriminants(lo, hi)
        .into_iter()
        .map(|d| {
            let sum = siegel_sum(d, sigma)?;
            Ok((d, BigRational::new(BigInt::from(sum), BigInt::from(denom))))
        })
        .collect()
}

/// Recovers `L(1-2m, χ)` from `ζ_D(1-2m)`: `L(-1) = -12 ζ_D(-1)`, `L(-3) = 120 ζ_D(-3)`.
pub fn l_from_siegel(m: u64, zeta_d: &BigRational) -> Result<BigRational> {
    match m {
        1 => Ok(zeta_d * rational(-12, 1)),
        2 => Ok(zeta_d * rational(120, 1)),
        other => Err(Error::SiegelOrder(other)),
    }
}

/// `L(-1, χ_D) = -S₁/5` and `L(-3, χ_D) = S₃` as `(numerator, denominator)`
/// with the raw divisor sums, without going through big rationals.
pub fn siegel_l_values(
    disc: FundamentalDiscriminant,
    sigma1: &SigmaTable,
    sigma3: &SigmaTable,
) -> Result<SiegelLValues> {
    Ok(SiegelLValues { s1: siegel_sum(disc, sigma1)?, s3: siegel_sum(disc, sigma3)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiegelLValues {
    /// `Σ_b σ₁((D-b²)/4) = 60 ζ_D(-1)`.
    pub s1: u128,
    /// `Σ_b σ₃((D-b²)/4) = 120 ζ_D(-3)`.
    pub s3: u128,
}

impl SiegelLValues {
    pub fn l_minus_one(&self) -> BigRational {
        BigRational::new(-BigInt::from(self.s1), BigInt::from(5))
    }

    pub fn l_minus_three(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.s3))
    }

    /// `v_p(L(1-2m, χ))` for `m ∈ {1, 2}`.
    pub fn valuation(&self, m: u64, p: u64) -> PValuation {
        match m {
            1 => u128_valuation(self.s1, p).shift(if p == 5 { -1 } else { 0 }),
            2 => u128_valuation(self.s3, p),
            _ => panic!("divisor-sum values exist only for m = 1, 2"),
        }
    }
}

/// Depth of the valuation-only mode: sums are reduced modulo `p^9`.
pub const VALUATION_ONLY_DEPTH: u32 = 9;

/// `v_p(L(1-2m, χ))` from the divisor sums reduced modulo `p^9`, `p ∈ {3, 5}`.
/// Returns `None` when the residue vanishes, i.e. the valuation is at least
/// the depth and needs the wide computation.
pub fn siegel_valuation_only(
    disc: FundamentalDiscriminant,
    m: u64,
    p: u64,
    sigma: &SigmaTable,
) -> Result<Option<PValuation>> {
    siegel_denominator(m)?;
    check_sigma(m, sigma)?;
    if p != 3 && p != 5 {
        return Err(Error::Table3Primes(p));
    }
    let ring = ModRing::new(p.pow(VALUATION_ONLY_DEPTH));
    let residue = siegel_sum_mod(disc, sigma, ring.modulus())?;
    let shift = if m == 1 && p == 5 { -1 } else { 0 };
    Ok(ring.residue_valuation(residue, p).map(|v| PValuation::Finite(v + shift)))
}

/// Exact-equality gate between the divisor-sum route and the generalized
/// Bernoulli route, for every fundamental `D < bound` and `m ∈ {1, 2}`.
/// Returns the first disagreement as an error.
pub fn validate_siegel_against_bernoulli(bound: u64) -> Result<usize> {
    let limit = (bound.saturating_sub(1) / 4).max(1);
    let sigma1 = crate::numtheory::divisor_sigma_sieve(1, limit)?;
    let sigma3 = crate::numtheory::divisor_sigma_sieve(3, limit)?;
    let mut checked = 0;
    for (m, sigma) in [(1u64, &sigma1), (2, &sigma3)] {
        for (d, value) in siegel_batch(m, 2, bound, sigma)? {
            let oracle = zeta_d_exact(d, m)?;
            if value != oracle {
                return Err(Error::InvalidArgument(format!(
                    "divisor-sum value {value} disagrees with {oracle} at D = {d}, m = {m}"
                )));
            }
            if l_from_siegel(m, &value)? != l_chi_exact(d, m)? {
                return Err(Error::InvalidArgument(format!("L-value mismatch at D = {d}, m = {m}")));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Formats a rational as `num/den`, or `num` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Best-effort `f64` view for display.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => f64::NAN,
    }
}
