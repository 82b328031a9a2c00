//! Limiting bridge counts for two cliques `K_m`, `K_n` joined by `w` edges.
//!
//! Under `M` the cliques stay separate iff `w < w_M`; under `D` iff `w < w_D`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::round12;

fn check(m: usize, n: usize) -> Result<(f64, f64)> {
    if m < 3 || n < 3 {
        return Err(Error::InvalidParameter(format!(
            "clique sizes must be at least 3, got m={m}, n={n}"
        )));
    }
    Ok((m as f64, n as f64))
}

/// `w_M = (n(m−1) + m(n−1)) / (2(1 + (m+n)/√(mn)))`.
pub fn w_threshold_m(m: usize, n: usize) -> Result<f64> {
    let (m, n) = check(m, n)?;
    Ok((n * (m - 1.0) + m * (n - 1.0)) / (2.0 * (1.0 + (m + n) / (m * n).sqrt())))
}

/// `w_D = (n(m−1) + m(n−1)) / (2(1 + (m+n)²/(2mn)))`.
pub fn w_threshold_d(m: usize, n: usize) -> Result<f64> {
    let (m, n) = check(m, n)?;
    Ok((n * (m - 1.0) + m * (n - 1.0)) / (2.0 * (1.0 + (m + n).powi(2) / (2.0 * m * n))))
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub m: usize,
    pub n: usize,
    #[serde(serialize_with = "round12")]
    pub w_m: f64,
    #[serde(serialize_with = "round12")]
    pub w_d: f64,
    /// `w_M / w_D − 1`.
    #[serde(serialize_with = "round12")]
    pub ratio_minus_one: f64,
}

pub fn threshold(m: usize, n: usize) -> Result<ThresholdResult> {
    let w_m = w_threshold_m(m, n)?;
    let w_d = w_threshold_d(m, n)?;
    Ok(ThresholdResult {
        m,
        n,
        w_m,
        w_d,
        ratio_minus_one: w_m / w_d - 1.0,
    })
}

/// Every `(m, n)` in `lo..=hi` squared, row-major.
pub fn ratio_grid(lo: usize, hi: usize) -> Result<Vec<ThresholdResult>> {
    let mut out = Vec::new();
    for m in lo..=hi {
        for n in lo..=hi {
            out.push(threshold(m, n)?);
        }
    }
    Ok(out)
}

/// CSV with header `m,n,w_M,w_D,ratio_minus_one`.
pub fn ratio_grid_csv(rows: &[ThresholdResult]) -> String {
    let mut out = String::from("m,n,w_M,w_D,ratio_minus_one\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m, r.n, r.w_m, r.w_d, r.ratio_minus_one
        ));
    }
    out
}
