//! Browser demo bindings. Every operation returns a JSON string; errors are
//! plain messages.

use rqzeta_core::irregularity::{chi_irregularity_index, scan_fixed_disc};
use rqzeta_core::lvalues::{format_rational, l_chi_exact, l_chi_mod, rational_to_f64};
use rqzeta_core::statistics::{build_distribution, Grouping, Prediction};
use rqzeta_core::FundamentalDiscriminant;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest prime bound accepted by `index_distribution`, to keep the page responsive.
pub const MAX_PRIME_BOUND: u64 = 5_000;

fn disc(d: u64) -> Result<FundamentalDiscriminant, String> {
    FundamentalDiscriminant::try_from(d).map_err(|e| e.to_string())
}

/// L(1-2m, chi_D) exactly, plus its index data at `p` when `p` is nonzero.
#[wasm_bindgen]
pub fn l_value(d: u64, m: u64, p: u64) -> Result<String, String> {
    let d = disc(d)?;
    let value = l_chi_exact(d, m).map_err(|e| e.to_string())?;
    let mut out = json!({
        "disc": d.get(),
        "m": m,
        "value": format_rational(&value),
        "approx": rational_to_f64(&value),
    });
    if p != 0 {
        let record = chi_irregularity_index(d, p).map_err(|e| e.to_string())?;
        // No residue when p divides D or the denominator.
        out["residue"] = json!(l_chi_mod(d, m, p).ok());
        out["index"] = json!(record.index());
        out["hits"] = json!(record.hits.iter().map(|h| h.two_m).collect::<Vec<_>>());
    }
    Ok(out.to_string())
}

/// Distribution of chi_D-irregularity indices over odd primes up to `p_max`,
/// against the limiting prediction.
#[wasm_bindgen]
pub fn index_distribution(d: u64, p_max: u64) -> Result<String, String> {
    if p_max > MAX_PRIME_BOUND {
        return Err(format!("prime bound {p_max} exceeds {MAX_PRIME_BOUND}"));
    }
    let records = scan_fixed_disc(disc(d)?, p_max, 1).map_err(|e| e.to_string())?;
    let table = build_distribution(&records, Prediction::Limit, &Grouping::wagstaff()).map_err(|e| e.to_string())?;
    serde_json::to_string(&table).map_err(|e| e.to_string())
}

/// Upper tail of the chi-squared distribution.
#[wasm_bindgen]
pub fn significance(statistic: f64, df: usize) -> Result<f64, String> {
    if df == 0 || !statistic.is_finite() || statistic < 0.0 {
        return Err("need a finite statistic >= 0 and df >= 1".into());
    }
    Ok(rqzeta_core::statistics::significance(statistic, df))
}
