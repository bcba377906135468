use thiserror::Error;

/// Errors raised by the computational routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant of a real quadratic field")]
    NotFundamental(i64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("prime {p} divides the discriminant {disc}; the modular path requires p to be coprime to D")]
    PrimeDividesDiscriminant { p: u64, disc: u64 },

    #[error("index {n} is out of range for p = {p} (need an even index with n <= p - 1)")]
    IndexOutOfRange { n: u64, p: u64 },

    #[error("divisor sums of exponent {0} are not supported (use 1 or 3)")]
    SigmaExponent(u32),

    #[error("a sigma table of limit {limit} would overflow 128-bit entries for exponent {k}")]
    SigmaOverflow { limit: u64, k: u32 },

    #[error("the sigma table covers n <= {have}, but the discriminant range needs n <= {need}")]
    SigmaTooShort { have: u64, need: u64 },

    #[error("closed divisor-sum formulas exist only for m = 1 and m = 2 (got m = {0})")]
    SiegelOrder(u64),

    #[error("the table3 scan mode accepts only the primes 3 and 5 (got {0})")]
    Table3Primes(u64),

    #[error("expected count of category {0} is zero")]
    ZeroExpected(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
