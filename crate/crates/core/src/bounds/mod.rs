//! Closed-form dimension bounds, the `(d1, l)` parameter search, box-count
//! estimates and the mass-distribution check.

mod bigprec;
mod boxcount;
mod mdp;

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::levelset::D1;
use crate::levelset::{census_constant, census_constant_relaxed};
use crate::{Error, Result};

pub use bigprec::{lower_bound_big, trivial_upper_bound_big, upper_bound_big, BigValue};
pub use boxcount::{box_count_dimension, fit_counts, witness_box_count, DimensionEstimate, LevelCount};
pub use mdp::{mass_distribution_lower, MdpLevel, MdpReport};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
    }
    Ok(())
}

/// `(α/2) / (1 + (1 + ln(3/α))/ln 2 + 2/α)`.
pub fn lower_bound(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((alpha / 2.0) / (1.0 + (1.0 + (3.0 / alpha).ln()) / LN_2 + 2.0 / alpha))
}

/// `1 - 2^-α`.
pub fn upper_bound(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 - (-alpha).exp2())
}

/// `log2 3 - 1`, the box dimension of the triangle minus one.
pub fn trivial_upper_bound_sierpinski() -> f64 {
    3f64.log2() - 1.0
}

/// The `α` above which the trivial bound beats `1 - 2^-α`; it lies beyond 1.
pub fn upper_trivial_crossover() -> f64 {
    -(2.0 - 3f64.log2()).log2()
}

/// The dimension of level sets of the Bernoulli witness along typical lines.
pub fn witness_dimension(alpha: f64) -> Result<f64> {
    upper_bound(alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub trivial: f64,
}

impl BoundsRow {
    pub fn ordered(&self) -> bool {
        0.0 < self.lower && self.lower < self.upper && self.upper < self.trivial
    }
}

pub fn bounds_sweep(grid: &[f64]) -> Result<Vec<BoundsRow>> {
    let trivial = trivial_upper_bound_sierpinski();
    grid.par_iter()
        .map(|&alpha| Ok(BoundsRow { alpha, lower: lower_bound(alpha)?, upper: upper_bound(alpha)?, trivial }))
        .collect()
}

/// `k/(N+1)` for `k = 1..=N`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

/// Left side of the condition `lhs < l` that makes the census constant
/// (with `2^l` in place of `2^l - 1`) smaller than one.
pub fn lcondition_lhs(alpha: f64, d1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(d1 > 0.0 && d1 < alpha) {
        return Err(Error::param("d1", format!("{d1} is not in (0, alpha = {alpha})")));
    }
    Ok((d1 * (1.0 + (3.0 / (2.0 * d1)).ln()) + LN_2) / ((alpha - d1) * LN_2))
}

/// Smallest integer `l` strictly above [`lcondition_lhs`].
pub fn feasible_l(alpha: f64, d1: D1) -> Result<u32> {
    let lhs = lcondition_lhs(alpha, d1.to_f64())?;
    let l = lhs.floor() + 1.0;
    if l > u32::MAX as f64 {
        return Err(Error::param("d1", "too close to alpha: l overflows"));
    }
    Ok(l as u32)
}

/// The window `(lhs, 1 + lhs]` for `l` when `d1 = α/2`.
pub fn lchoice_window(alpha: f64) -> Result<(f64, f64)> {
    let lhs = lcondition_lhs(alpha, alpha / 2.0)?;
    Ok((lhs, lhs + 1.0))
}

/// Best rational approximation of `α/2` with denominator at most 64.
pub fn default_d1(alpha: f64) -> Result<D1> {
    check_alpha(alpha)?;
    D1::approximate(alpha / 2.0, 64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundSearchParams {
    pub alpha: f64,
    pub d1: D1,
    pub q: u32,
    pub l: u32,
    /// Whether `l` satisfies the condition of [`feasible_l`].
    pub feasible: bool,
}

impl BoundSearchParams {
    pub fn new(alpha: f64, d1: D1, l: u32) -> Result<Self> {
        let lhs = lcondition_lhs(alpha, d1.to_f64())?;
        if l == 0 {
            return Err(Error::param("l", "must be positive"));
        }
        Ok(BoundSearchParams { alpha, d1, q: d1.q(), l, feasible: (l as f64) > lhs })
    }

    /// Default `d1` and the smallest feasible `l`.
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        let d1 = default_d1(alpha)?;
        Self::new(alpha, d1, feasible_l(alpha, d1)?)
    }

    /// `d1 / l`.
    pub fn s(&self) -> f64 {
        self.d1.to_f64() / self.l as f64
    }

    pub fn census_constant(&self) -> f64 {
        census_constant(self.alpha, self.l, self.d1)
    }

    pub fn census_constant_relaxed(&self) -> f64 {
        census_constant_relaxed(self.alpha, self.l, self.d1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((lower_bound(1.0).unwrap() - 0.08295).abs() < 5e-5);
        assert!((lower_bound(0.5).unwrap() - 0.02769).abs() < 5e-5);
        assert_eq!(upper_bound(1.0).unwrap(), 0.5);
        assert!((upper_bound(0.5).unwrap() - 0.29289).abs() < 1e-5);
        assert!((trivial_upper_bound_sierpinski() - 0.584962500721).abs() < 1e-11);
        assert!(lower_bound(0.0).is_err());
        assert!(upper_trivial_crossover() > 1.0);
    }

    #[test]
    fn lower_bound_vanishes_at_zero() {
        let vals: Vec<f64> = (1..12).map(|k| lower_bound(10f64.powi(-k)).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(*vals.last().unwrap() < 1e-11);
    }

    #[test]
    fn monotone_and_ordered() {
        let rows = bounds_sweep(&uniform_grid(999)).unwrap();
        assert!(rows.iter().all(BoundsRow::ordered));
        assert!(rows.windows(2).all(|w| w[0].lower < w[1].lower && w[0].upper < w[1].upper));
    }

    #[test]
    fn feasible_l_at_one() {
        let half = D1::new(1, 2).unwrap();
        assert!((lcondition_lhs(1.0, 0.5).unwrap() - 5.0275).abs() < 1e-3);
        assert_eq!(feasible_l(1.0, half).unwrap(), 6);
        let p = BoundSearchParams::new(1.0, half, 6).unwrap();
        assert!(p.feasible && p.census_constant() < 1.0);
        assert!((p.s() - 1.0 / 12.0).abs() < 1e-15);
        assert!(D1::new(1, 2).map(|d| feasible_l(0.5, d)).unwrap().is_err());
    }

    #[test]
    fn l_diverges_as_d1_approaches_alpha() {
        let ls: Vec<u32> = [(9, 10), (99, 100), (999, 1000)]
            .iter()
            .map(|&(a, b)| feasible_l(1.0, D1::new(a, b).unwrap()).unwrap())
            .collect();
        assert!(ls[0] < ls[1] && ls[1] < ls[2] && ls[2] > 1000);
    }

    #[test]
    fn relaxed_constant_matches_condition() {
        for i in 1..=10 {
            let alpha = i as f64 / 10.0;
            for j in 1..=5 {
                let d1 = D1::approximate(alpha * j as f64 / 6.0, 64).unwrap();
                if d1.to_f64() >= alpha {
                    continue;
                }
                let l = feasible_l(alpha, d1).unwrap();
                assert!(census_constant_relaxed(alpha, l, d1) < 1.0);
                assert!(census_constant_relaxed(alpha, l - 1, d1) >= 1.0 || l == 1);
                assert!(census_constant(alpha, l, d1) < 1.0);
            }
        }
    }

    #[test]
    fn default_parameters_track_the_lower_bound() {
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let p = BoundSearchParams::for_alpha(alpha).unwrap();
            let (_, hi) = lchoice_window(alpha).unwrap();
            assert!(p.l as f64 <= hi + 1.0);
            let lb = lower_bound(alpha).unwrap();
            assert!((p.s() - lb).abs() / lb < 0.05, "alpha {alpha}: s {} vs {lb}", p.s());
        }
    }
}
