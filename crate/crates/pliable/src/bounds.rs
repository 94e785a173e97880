//! Closed-form bound evaluators for random instances B(m, n, p), and the
//! explicit constant-weight code whose disjoint-support rows satisfy all
//! clients with high probability at constant p.
//!
//! All logarithms are base 2.

use crate::error::{Error, Result};
use crate::gf::Matrix;
use serde::Serialize;

/// The branch point of the lower-bound formula, (√5 - 1)/2.
pub fn golden_ratio_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BelowGoldenRatio,
    AboveGoldenRatio,
}

/// With probability 1 - O(1/n²), any linear code for B(m, n, p) has at least
/// this many rows: log(n)/(4·log(1/p)) below the golden-ratio threshold and
/// log(n)/(2·log(1/(1-p))) above it.
pub fn lower_bound(n: usize, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {} is degenerate; need 0 < p < 1",
            p
        )));
    }
    let log2n = (n as f64).log2();
    if p <= golden_ratio_threshold() {
        Ok(log2n / (4.0 * (1.0 / p).log2()))
    } else {
        Ok(log2n / (2.0 * (1.0 / (1.0 - p)).log2()))
    }
}

/// Row count of the constructive code: ⌈3/log(e/(e-1)) · log(n)⌉.
pub fn constructive_rows(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let c = 3.0 / (std::f64::consts::E / (std::f64::consts::E - 1.0)).log2();
    Ok((c * (n as f64).log2()).ceil() as usize)
}

/// Ones per row: 1/p rounded to the nearest integer, at least 1.
pub fn row_weight(p: f64) -> Result<usize> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {} outside (0, 1]",
            p
        )));
    }
    Ok(((1.0 / p).round() as usize).max(1))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub p: f64,
    pub lower_bound: f64,
    pub regime: Regime,
    /// Rows of the constructive constant-weight code.
    pub constructive_rows: usize,
    /// Ones per row.
    pub row_weight: usize,
    /// Smallest m that fits the disjoint supports.
    pub min_messages: usize,
}

pub fn bound_report(n: usize, p: f64) -> Result<BoundReport> {
    let lb = lower_bound(n, p)?;
    let rows = constructive_rows(n)?;
    let w = row_weight(p)?;
    Ok(BoundReport {
        n,
        p,
        lower_bound: lb,
        regime: if p <= golden_ratio_threshold() {
            Regime::BelowGoldenRatio
        } else {
            Regime::AboveGoldenRatio
        },
        constructive_rows: rows,
        row_weight: w,
        min_messages: rows * w,
    })
}

/// The constructive code itself: R rows of weight w with pairwise disjoint
/// supports, laid out contiguously left to right. Needs m >= R·w columns.
pub fn constant_weight_code(m: usize, n: usize, p: f64) -> Result<Matrix> {
    let rows = constructive_rows(n)?;
    let w = row_weight(p)?;
    if m < rows * w {
        return Err(Error::InvalidParameter(format!(
            "m = {} cannot host {} disjoint rows of weight {} (need m >= {})",
            m,
            rows,
            w,
            rows * w
        )));
    }
    let data = (0..rows)
        .map(|r| {
            (0..m)
                .map(|j| u32::from(j >= r * w && j < (r + 1) * w))
                .collect()
        })
        .collect();
    Matrix::from_rows(2, m, data)
}
