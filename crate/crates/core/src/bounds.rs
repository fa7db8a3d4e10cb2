//! Closed-form bound evaluators and an inequality recorder.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n ln(c / n)` with the convention `0 ln(c / 0) = 0`.
pub fn n_log_ratio(n: f64, c: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        n * (c / n).ln()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(())
}

/// A bound value together with a flag marking it vacuous (above 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub vacuous: bool,
}

impl BoundValue {
    fn new(value: f64) -> Self {
        BoundValue {
            value,
            vacuous: value > 1.0,
        }
    }
}

/// `(n ln(em/n) + ln(1/δ)) / (m - n)`.
pub fn lw_compression_bound(n: usize, m: usize, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    if n >= m {
        return Err(Error::InvalidArgument(format!("need n < m, got n={n}, m={m}")));
    }
    let e_m = std::f64::consts::E * m as f64;
    Ok(BoundValue::new(
        (n_log_ratio(n as f64, e_m) + (1.0 / delta).ln()) / (m - n) as f64,
    ))
}

/// `(10 n̂ ln(em/n̂) + 4 ln(2/δ)) / m`.
pub fn coverage_bound(nhat: usize, m: usize, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    if m == 0 || nhat > m {
        return Err(Error::InvalidArgument(format!("need 0 <= nhat <= m, m > 0, got nhat={nhat}, m={m}")));
    }
    let e_m = std::f64::consts::E * m as f64;
    Ok(BoundValue::new(
        (10.0 * n_log_ratio(nhat as f64, e_m) + 4.0 * (2.0 / delta).ln()) / m as f64,
    ))
}

/// One term of the query-count upper expression:
/// `(55 n̂ ln(e t/n̂) + 24 ln(4 log2(2m)/δ)) log2(2m)`.
pub fn query_upper_term(nhat: usize, t: usize, m: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let l = (2.0 * m as f64).log2();
    let e_t = std::f64::consts::E * t as f64;
    Ok((55.0 * n_log_ratio(nhat as f64, e_t) + 24.0 * (4.0 * l / delta).ln()) * l)
}

/// `max{16 max B, 512}` over `(r, B)` pairs.
pub fn theta_upper_from_nhat(bvals: &[(f64, f64)]) -> Result<f64> {
    if bvals.is_empty() {
        return Err(Error::InvalidArgument("empty B list".into()));
    }
    check_finite(bvals)?;
    let b = bvals.iter().map(|&(_, b)| b).fold(f64::NEG_INFINITY, f64::max);
    Ok((16.0 * b).max(512.0))
}

/// `max{max 7 B / r, 2}` over `(r, B)` pairs.
pub fn theta_from_deltavs(bdvs: &[(f64, f64)]) -> Result<f64> {
    if bdvs.is_empty() {
        return Err(Error::InvalidArgument("empty B list".into()));
    }
    check_finite(bdvs)?;
    if bdvs.iter().any(|&(r, _)| r <= 0.0) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    Ok(bdvs
        .iter()
        .map(|&(r, b)| 7.0 * b / r)
        .fold(2.0, f64::max))
}

fn check_finite(v: &[(f64, f64)]) -> Result<()> {
    if v.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::NonFinite("bound inputs"));
    }
    Ok(())
}

/// `(8k/λ) ln(8k/δ)`.
pub fn rect_bound(k: usize, lambda: f64, delta: f64) -> Result<f64> {
    if k == 0 || !(lambda > 0.0 && lambda <= 1.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need k >= 1, lambda in (0,1], delta > 0; got k={k}, lambda={lambda}, delta={delta}"
        )));
    }
    let k = k as f64;
    Ok(8.0 * k / lambda * (8.0 * k / delta).ln())
}

/// `(24/t)(d ln(880 θ) + ln(12/δ))`.
pub fn gine_passive_bound(t: usize, d: usize, theta: f64, delta: f64) -> Result<BoundValue> {
    check_delta(delta)?;
    if t == 0 || !(theta >= 1.0) {
        return Err(Error::InvalidArgument(format!("need t >= 1 and theta >= 1, got t={t}, theta={theta}")));
    }
    Ok(BoundValue::new(
        24.0 / t as f64 * (d as f64 * (880.0 * theta).ln() + (12.0 / delta).ln()),
    ))
}

/// Factor-2 bracket `(min{1/r0, 4k}/2, 2 min{1/r0, 4k})`.
pub fn kintervals_theta_reference(r0: f64, k: usize) -> Result<(f64, f64)> {
    if !(r0 > 0.0 && r0 <= 1.0) || k == 0 {
        return Err(Error::InvalidArgument(format!("need r0 in (0,1] and k >= 1, got r0={r0}, k={k}")));
    }
    let c = (1.0 / r0).min(4.0 * k as f64);
    Ok((c / 2.0, 2.0 * c))
}

/// A recorded comparison `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    #[serde(default)]
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn with_input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.to_string(), value);
        self
    }
}

pub fn check_inequality(name: &str, lhs: f64, rhs: f64) -> Result<BoundReport> {
    if lhs.is_nan() || rhs.is_nan() {
        return Err(Error::NonFinite("inequality operand"));
    }
    Ok(BoundReport {
        name: name.to_string(),
        lhs,
        rhs,
        holds: lhs <= rhs,
        inputs: BTreeMap::new(),
    })
}
