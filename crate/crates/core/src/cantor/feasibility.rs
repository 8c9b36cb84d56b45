use serde::Serialize;

use super::SeparatedStructure;
use crate::{Error, Result};

/// Ties `lhs = rhs` are decided within this many bits of rounding.
const LOG_TIE: f64 = 1e-12;

/// Position of `α` relative to `log ν / log ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// `ρ^α > ν`: piecewise constant approximations exist for large `k`.
    Below,
    /// `ρ^α = ν`: the ratio of the two sides does not depend on `k`.
    Boundary,
    /// `ρ^α < ν`: the ratio grows with `k`.
    Above,
}

/// `2 K M ν^k <= (1-c)/K^α · ρ^{kα}` at one level `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibilityRow {
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// `log2(lhs/rhs)`, computed without forming either side.
    pub log2_ratio: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub alpha: f64,
    pub threshold: f64,
    pub phase: Phase,
    /// `ν / ρ^α`, the factor by which `lhs/rhs` changes per level.
    pub step_factor: f64,
    pub first_feasible_k: Option<u32>,
    /// Every `k <= k_max` was infeasible with `lhs/rhs` strictly increasing.
    pub infeasible_up_to: Option<u32>,
    pub rows: Vec<FeasibilityRow>,
}

fn check(alpha: f64, c: f64, m: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::param("c", "must lie in [0, 1)"));
    }
    if !(m > 0.0) {
        return Err(Error::param("M", "must be positive"));
    }
    Ok(())
}

pub fn piecewise_constant_feasibility(
    alpha: f64,
    c: f64,
    m: f64,
    s: &SeparatedStructure,
    k: u32,
) -> Result<FeasibilityRow> {
    check(alpha, c, m)?;
    let kk = s.k_const;
    let log2_lhs = (2.0 * kk * m).log2() + k as f64 * s.nu.log2();
    let log2_rhs = ((1.0 - c) / kk.powf(alpha)).log2() + k as f64 * alpha * s.rho.log2();
    let log2_ratio = log2_lhs - log2_rhs;
    Ok(FeasibilityRow { k, lhs: log2_lhs.exp2(), rhs: log2_rhs.exp2(), log2_ratio, feasible: log2_ratio <= LOG_TIE })
}

/// Evaluates `k = 0..=k_max`.
pub fn feasibility_search(alpha: f64, c: f64, m: f64, s: &SeparatedStructure, k_max: u32) -> Result<FeasibilityReport> {
    check(alpha, c, m)?;
    let threshold = s.nu.ln() / s.rho.ln();
    let phase = if (alpha - threshold).abs() <= 1e-12 * threshold {
        Phase::Boundary
    } else if alpha < threshold {
        Phase::Below
    } else {
        Phase::Above
    };
    let rows = (0..=k_max).map(|k| piecewise_constant_feasibility(alpha, c, m, s, k)).collect::<Result<Vec<_>>>()?;
    let first_feasible_k = rows.iter().find(|r| r.feasible).map(|r| r.k);
    let increasing = rows.windows(2).all(|w| w[1].log2_ratio > w[0].log2_ratio);
    let infeasible_up_to = (phase == Phase::Above && increasing && rows.iter().all(|r| !r.feasible)).then_some(k_max);
    Ok(FeasibilityReport {
        alpha,
        threshold,
        phase,
        step_factor: s.nu / s.rho.powf(alpha),
        first_feasible_k,
        infeasible_up_to,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::product_separated_structure;

    #[test]
    fn phase_boundary_of_the_square() {
        let s = product_separated_structure(4).unwrap();
        let low = feasibility_search(0.4, 0.5, 1.0, &s, 60).unwrap();
        assert_eq!(low.phase, Phase::Below);
        let k0 = low.first_feasible_k.unwrap();
        // log2(lhs/rhs) = 3.4 - 0.2k vanishes at k = 17
        assert_eq!(k0, 17);
        assert!(low.rows[k0 as usize..].iter().all(|r| r.feasible));
        let high = feasibility_search(0.6, 0.5, 1.0, &s, 60).unwrap();
        assert_eq!(high.phase, Phase::Above);
        assert_eq!(high.first_feasible_k, None);
        assert_eq!(high.infeasible_up_to, Some(60));
        assert!(high.step_factor > 1.0);
        let mid = feasibility_search(0.5, 0.5, 1.0, &s, 20).unwrap();
        assert_eq!(mid.phase, Phase::Boundary);
        let first = mid.rows[0].log2_ratio;
        assert!(mid.rows.iter().all(|r| (r.log2_ratio - first).abs() < 1e-9));
    }

    #[test]
    fn sides_by_direct_evaluation() {
        let s = product_separated_structure(3).unwrap();
        let r = piecewise_constant_feasibility(0.4, 0.5, 1.0, &s, 5).unwrap();
        let lhs = 2.0 * 2.0 * 1.0 * 0.5f64.powi(5);
        let rhs = 0.5 / 2f64.powf(0.4) * 0.25f64.powf(5.0 * 0.4);
        assert!((r.lhs - lhs).abs() < 1e-14 && (r.rhs - rhs).abs() < 1e-14);
    }
}
