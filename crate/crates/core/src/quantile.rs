//! Order-statistic quantiles over replicates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Empirical `(1 - delta)`-quantile of a replicate statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub m: usize,
    pub delta: f64,
    pub replicates: usize,
    pub value: f64,
    /// One-based index of the order statistic, `ceil((1 - delta) R)`.
    pub order_index: usize,
}

/// `ceil((1 - delta) n)` clamped to `[1, n]`, robust to rounding in the product.
pub fn order_index(delta: f64, n: usize) -> usize {
    let x = (1.0 - delta) * n as f64;
    ((x - 1e-9).ceil() as usize).clamp(1, n.max(1))
}

/// Least replicate count for which the order statistic is interior.
pub fn min_replicates(delta: f64) -> usize {
    (10.0 / delta - 1e-9).ceil() as usize
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(())
}

pub(crate) fn check_replicates(delta: f64, r: usize) -> Result<()> {
    check_delta(delta)?;
    let need = min_replicates(delta);
    if r < need {
        return Err(Error::InvalidArgument(format!(
            "{r} replicates is below ceil(10/delta) = {need}"
        )));
    }
    Ok(())
}

/// Order-statistic quantile of `values`.
pub fn empirical_quantile(values: &[f64], delta: f64, m: usize) -> Result<QuantileEstimate> {
    check_delta(delta)?;
    if values.is_empty() {
        return Err(Error::InvalidArgument("no replicate values".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("replicate values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = order_index(delta, sorted.len());
    Ok(QuantileEstimate {
        m,
        delta,
        replicates: sorted.len(),
        value: sorted[idx - 1],
        order_index: idx,
    })
}

/// Standard error of the quantile's coverage level, `sqrt(p (1 - p) / R)`.
pub fn coverage_std_error(delta: f64, r: usize) -> f64 {
    (delta * (1.0 - delta) / r as f64).sqrt()
}

/// Runs `f` on replicate indices `0..r` in parallel, returning results in index order.
pub fn run_replicates<T, F>(r: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..r as u64).into_par_iter().map(&f).collect()
}
