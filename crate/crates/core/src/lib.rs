//! Special values of real quadratic zeta and L-functions at negative odd
//! integers, indices of irregularity built on them, and the goodness-of-fit
//! statistics used to compare observed index counts with predictions.

pub mod bernoulli;
pub mod error;
pub mod irregularity;
pub mod lvalues;
pub mod numtheory;
pub mod statistics;

pub use error::{Error, Result};
pub use numtheory::{FundamentalDiscriminant, PValuation};
