use serde::Serialize;

use crate::{Error, Result};

/// Terms below this are dropped from the direct sum.
const TERM_CUTOFF: f64 = 1e-18;
/// Number of terms summed when the series does not converge.
const DIVERGENT_TERMS: u32 = 200;

/// Cover of `I_k \ C` by the gaps of `C` inside one interval `I_k` of `C_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityGap {
    pub k: u32,
    pub alpha: f64,
    /// `Σ_{m=k+1}^{m_max} 2^{m-k-1} r_m^α`.
    pub direct_sum: f64,
    pub last_m: u32,
    /// Bound on the dropped tail; infinite when the series diverges.
    pub truncation_error: f64,
    /// `2^{-2α(k+1)}/(1 - 2^{1-2α})`, present for `α > 1/2`.
    pub closed_form_bound: Option<f64>,
    /// `direct_sum / |I_k|`.
    pub ratio_to_interval: f64,
    /// `2^{(k+1)(1-2α)}/(1 - 2^{1-2α})`, present for `α > 1/2`.
    pub closed_form_ratio: Option<f64>,
    pub diverges: bool,
}

impl CapacityGap {
    pub fn within_bound(&self) -> bool {
        self.closed_form_bound.is_some_and(|b| self.direct_sum + self.truncation_error <= b)
    }
}

/// `log2 r_m` without forming `2^m`.
fn log2_removal(m: u32) -> f64 {
    let log2_pow2m1 = |e: u32| e as f64 + (-(-(e as f64)).exp2()).ln_1p() / std::f64::consts::LN_2;
    -(log2_pow2m1(m) + log2_pow2m1(m + 1))
}

pub fn capacity_gap(k: u32, alpha: f64) -> Result<CapacityGap> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
    }
    if k == 0 || k > 1000 {
        return Err(Error::param("k", "must be in 1..=1000"));
    }
    let diverges = alpha <= 0.5;
    let mut sum = 0.0;
    let mut m = k + 1;
    loop {
        let term = ((m - k - 1) as f64 + alpha * log2_removal(m)).exp2();
        sum += term;
        if (!diverges && term < TERM_CUTOFF) || (diverges && m - k >= DIVERGENT_TERMS) {
            break;
        }
        m += 1;
    }
    let q = (1.0 - 2.0 * alpha).exp2();
    // r_j < 2^{-2j} for j > 2 bounds every later term by a geometric tail
    let truncation_error = if diverges {
        f64::INFINITY
    } else {
        ((m - k) as f64 - 2.0 * alpha * (m + 1) as f64).exp2() / (1.0 - q)
    };
    let interval = ((k + 1) as f64).exp2() - 1.0;
    let closed_form_bound = (!diverges).then(|| (-2.0 * alpha * (k + 1) as f64).exp2() / (1.0 - q));
    let closed_form_ratio = (!diverges).then(|| ((k + 1) as f64 * (1.0 - 2.0 * alpha)).exp2() / (1.0 - q));
    Ok(CapacityGap {
        k,
        alpha,
        direct_sum: sum,
        last_m: m,
        truncation_error,
        closed_form_bound,
        ratio_to_interval: sum * interval,
        closed_form_ratio,
        diverges,
    })
}
