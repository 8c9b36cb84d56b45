use serde::Serialize;

use crate::holder::VertexFunction;
use crate::levelset::{LevelSetTree, LevelValue};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelCount {
    pub n: u32,
    pub count: f64,
    pub log2_count: f64,
}

/// Least-squares slope of `log2 N_n` against `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub counts: Vec<LevelCount>,
    pub slope: f64,
    /// Root mean square of the fit residuals.
    pub residual: f64,
    /// First level used by the fit.
    pub window_start: u32,
    pub empty: bool,
}

/// Fits the levels `n >= window_start`; with `window_start = None` the last
/// half of the levels is used.
pub fn fit_counts(counts: Vec<LevelCount>, window_start: Option<u32>) -> DimensionEstimate {
    let n_max = counts.iter().map(|c| c.n).max().unwrap_or(0);
    let start = window_start.unwrap_or(n_max / 2);
    if counts.iter().any(|c| c.count == 0.0) || counts.is_empty() {
        return DimensionEstimate { counts, slope: 0.0, residual: 0.0, window_start: start, empty: true };
    }
    let pts: Vec<(f64, f64)> = counts.iter().filter(|c| c.n >= start).map(|c| (c.n as f64, c.log2_count)).collect();
    if pts.len() < 2 {
        return DimensionEstimate { counts, slope: 0.0, residual: 0.0, window_start: start, empty: false };
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / k).sqrt();
    DimensionEstimate { counts, slope, residual, window_start: start, empty: false }
}

/// Box counts of the witness level set along the horizontal line whose
/// digits are given, from the digit recursion `N_n = 2^{#zeros among the first n}`.
pub fn witness_box_count(digits: &[u8], window_start: Option<u32>) -> Result<DimensionEstimate> {
    if let Some(d) = digits.iter().find(|&&d| d > 1) {
        return Err(Error::InvalidDigit(char::from(b'0' + d)));
    }
    let mut zeros = 0u32;
    let counts = std::iter::once(0)
        .chain(digits.iter().map(|&d| {
            zeros += u32::from(d == 0);
            zeros
        }))
        .enumerate()
        .map(|(n, z)| LevelCount { n: n as u32, count: (z as f64).exp2(), log2_count: z as f64 })
        .collect();
    Ok(fit_counts(counts, window_start))
}

/// Counts of level-`n` triangles whose vertex values straddle `r`, for
/// `n <= n_max`.
pub fn box_count_dimension(
    f: &(impl VertexFunction + ?Sized),
    r: &LevelValue,
    n_max: u32,
    window_start: Option<u32>,
) -> Result<DimensionEstimate> {
    let tree = LevelSetTree::build(f, r, 1, n_max)?;
    let counts = tree
        .summary()
        .into_iter()
        .map(|s| LevelCount { n: s.level, count: s.count as f64, log2_count: (s.count as f64).log2() })
        .collect();
    Ok(fit_counts(counts, window_start))
}
