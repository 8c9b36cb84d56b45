use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::capacity::{capacity_gap, CapacityGap};
use super::fat::FatCantorSet;
use crate::rational::{format_ratio, ratio_to_f64, serde_ratio};
use crate::{Error, Result};

/// Relative slack of the floating-point Hölder ratios.
const SLACK: f64 = 1e-12;

/// The perturbation of a `c`-Hölder-`α` function on `C × C` around one
/// `k`-level cylinder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTransitionConfig {
    pub alpha: f64,
    #[serde(with = "serde_ratio")]
    pub c: BigRational,
    pub k: u32,
    /// Index of `[x1, x2]` among the intervals of `C_k`.
    pub jx: u64,
    /// Index of the row interval of `C_k`; `y1` is its upper endpoint.
    pub jy: u64,
    pub delta: f64,
    pub delta_prime: f64,
    /// The certificates sample `f` at the endpoints of `C_m × C_m`.
    pub sample_depth: u32,
}

impl PhaseTransitionConfig {
    pub fn new(alpha: f64, c: BigRational, k: u32) -> Self {
        PhaseTransitionConfig { alpha, c, k, jx: 0, jy: 0, delta: 0.25, delta_prime: 1e-3, sample_depth: 4 }
    }
}

/// `max |g(p) - g(q)| / |p - q|^α` over all pairs of sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCertificate {
    pub points: usize,
    pub pairs: u64,
    pub max_ratio: f64,
    pub bound: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseReport {
    pub config: PhaseTransitionConfig,
    pub x1: String,
    pub x2: String,
    pub y1: String,
    pub f_v1: String,
    pub f_v2: String,
    pub f_tilde_v1: String,
    pub f_tilde_v2: String,
    /// `|f̃(v1) - f̃(v2)|` and `(1-c)|x1 - x2|`.
    pub change: String,
    pub required_change: String,
    /// `f(v1) > f(v2)`, handled by the reflected perturbation.
    pub mirrored: bool,
    pub large_change: bool,
    pub h_lipschitz_ok: bool,
    pub h_plateaus_ok: bool,
    pub base: GridCertificate,
    pub perturbed: GridCertificate,
    pub capacity: CapacityGap,
    /// `Λ^α(I \ C)/|I| < δ`, estimated by the gap cover.
    pub capacity_ok: bool,
    /// `(1 - c - δ)(x2 - x1) - 6δ'`.
    pub image_length: f64,
    /// `λ(C ∩ I_y) = 2^{-(k+1)}` for the whole row interval.
    pub eta_row: f64,
    pub passes: bool,
}

/// `h(x)`: zero left of `x1`, slope `1-c` on `[x1, x2]`, constant beyond;
/// reflected when `mirrored`.
fn h(x: &BigRational, x1: &BigRational, x2: &BigRational, one_minus_c: &BigRational, mirrored: bool) -> BigRational {
    let clamp = if x < x1 {
        x1.clone()
    } else if x > x2 {
        x2.clone()
    } else {
        x.clone()
    };
    if mirrored {
        one_minus_c * (x2 - clamp)
    } else {
        one_minus_c * (clamp - x1)
    }
}

fn certificate(coords: &[(f64, f64)], values: &[f64], alpha: f64, bound: f64) -> GridCertificate {
    let n = coords.len();
    let max_ratio = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            for j in i + 1..n {
                let d = ((coords[i].0 - coords[j].0).powi(2) + (coords[i].1 - coords[j].1).powi(2)).sqrt();
                best = best.max((values[i] - values[j]).abs() / d.powf(alpha));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    GridCertificate {
        points: n,
        pairs: (n * n.saturating_sub(1) / 2) as u64,
        max_ratio,
        bound,
        passes: max_ratio <= bound * (1.0 + SLACK),
    }
}

/// Builds `f̃ = f + h` and checks the constructive inequalities behind the
/// jump of the level-set dimension on `C × C` above `α = 1/2`.
pub fn phase_perturbation<F>(f: F, config: &PhaseTransitionConfig) -> Result<PhaseReport>
where
    F: Fn(&BigRational, &BigRational) -> BigRational + Sync,
{
    let PhaseTransitionConfig { alpha, ref c, k, jx, jy, delta, delta_prime, sample_depth } = *config;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    if c.is_negative() || c >= &BigRational::one() {
        return Err(Error::param("c", "must lie in [0, 1)"));
    }
    if k == 0 || k > 20 {
        return Err(Error::param("k", "must be in 1..=20"));
    }
    if !(delta > 0.0 && delta_prime > 0.0) {
        return Err(Error::param("delta", "δ and δ' must be positive"));
    }
    if sample_depth > 5 {
        return Err(Error::param("sample_depth", "at most 5"));
    }
    let (x1, x2) = FatCantorSet::interval(k, jx)?;
    let (_, y1) = FatCantorSet::interval(k, jy)?;
    let one_minus_c = BigRational::one() - c;
    let f_v1 = f(&x1, &y1);
    let f_v2 = f(&x2, &y1);
    let mirrored = f_v1 > f_v2;
    let ft = |x: &BigRational, y: &BigRational| f(x, y) + h(x, &x1, &x2, &one_minus_c, mirrored);
    let ft_v1 = ft(&x1, &y1);
    let ft_v2 = ft(&x2, &y1);
    let change = (&ft_v1 - &ft_v2).abs();
    let required = &one_minus_c * (&x2 - &x1);
    let large_change = change >= required;

    let axis: Vec<BigRational> =
        FatCantorSet::level(sample_depth)?.intervals.into_iter().flat_map(|(a, b)| [a, b]).collect();
    let points: Vec<(BigRational, BigRational)> =
        axis.iter().flat_map(|x| axis.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let coords: Vec<(f64, f64)> = points.iter().map(|(x, y)| (ratio_to_f64(x), ratio_to_f64(y))).collect();
    let base_vals: Vec<BigRational> = points.par_iter().map(|(x, y)| f(x, y)).collect();
    let h_vals: Vec<BigRational> = points.iter().map(|(x, _)| h(x, &x1, &x2, &one_minus_c, mirrored)).collect();
    let base_f: Vec<f64> = base_vals.iter().map(ratio_to_f64).collect();
    let pert_f: Vec<f64> = base_vals.iter().zip(&h_vals).map(|(a, b)| ratio_to_f64(&(a + b))).collect();
    let c_f = ratio_to_f64(c);
    let base = certificate(&coords, &base_f, alpha, c_f);
    if !base.passes {
        return Err(Error::CertificateFailed(format!(
            "base function is not {c_f}-Hölder-{alpha} on the sample: ratio {}",
            base.max_ratio
        )));
    }
    let perturbed = certificate(&coords, &pert_f, alpha, 1.0);

    let h_lipschitz_ok = axis.iter().all(|a| {
        axis.iter().all(|b| {
            let dh = (h(a, &x1, &x2, &one_minus_c, mirrored) - h(b, &x1, &x2, &one_minus_c, mirrored)).abs();
            dh <= &one_minus_c * (a - b).abs()
        })
    });
    let (left, right) = if mirrored { (required.clone(), BigRational::zero()) } else { (BigRational::zero(), required.clone()) };
    let h_plateaus_ok = axis.iter().all(|x| {
        let v = h(x, &x1, &x2, &one_minus_c, mirrored);
        (x >= &x1 || v == left) && (x <= &x2 || v == right)
    });

    let capacity = capacity_gap(k, alpha)?;
    let capacity_ok = !capacity.diverges && capacity.ratio_to_interval < delta;
    let width = ratio_to_f64(&(&x2 - &x1));
    let image_length = (1.0 - c_f - delta) * width - 6.0 * delta_prime;
    let passes = large_change && h_lipschitz_ok && h_plateaus_ok && perturbed.passes;
    Ok(PhaseReport {
        config: config.clone(),
        x1: format_ratio(&x1),
        x2: format_ratio(&x2),
        y1: format_ratio(&y1),
        f_v1: format_ratio(&f_v1),
        f_v2: format_ratio(&f_v2),
        f_tilde_v1: format_ratio(&ft_v1),
        f_tilde_v2: format_ratio(&ft_v2),
        change: format_ratio(&change),
        required_change: format_ratio(&required),
        mirrored,
        large_change,
        h_lipschitz_ok,
        h_plateaus_ok,
        base,
        perturbed,
        capacity,
        capacity_ok,
        image_length,
        eta_row: (-((k + 1) as f64)).exp2(),
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constant_base() {
        let cfg = PhaseTransitionConfig { jx: 1, jy: 2, ..PhaseTransitionConfig::new(0.75, q(1, 2), 3) };
        let r = phase_perturbation(|_, _| q(1, 5), &cfg).unwrap();
        assert!(!r.mirrored && r.large_change && r.passes);
        assert_eq!(r.change, r.required_change);
        // l_3 = 1/15, so the change is (1/2)(1/15)
        assert_eq!(r.change, "1/30");
        assert!(r.image_length > 0.0);
    }

    #[test]
    fn mirrored_base() {
        let cfg = PhaseTransitionConfig::new(0.75, q(1, 2), 3);
        let r = phase_perturbation(|x, _| -x / BigRational::from_integer(4.into()), &cfg).unwrap();
        assert!(r.mirrored && r.large_change && r.passes && r.h_plateaus_ok);
    }

    #[test]
    fn plateaus() {
        let (x1, x2) = (q(1, 3), q(1, 2));
        let s = q(1, 2);
        assert_eq!(h(&q(0, 1), &x1, &x2, &s, false), q(0, 1));
        assert_eq!(h(&q(1, 1), &x1, &x2, &s, false), q(1, 12));
        assert_eq!(h(&q(5, 12), &x1, &x2, &s, false), q(1, 24));
        assert_eq!(h(&q(0, 1), &x1, &x2, &s, true), q(1, 12));
        assert_eq!(h(&q(1, 1), &x1, &x2, &s, true), q(0, 1));
    }

    #[test]
    fn rejects_non_holder_base() {
        let cfg = PhaseTransitionConfig::new(0.75, q(1, 10), 2);
        assert!(matches!(phase_perturbation(|x, _| x.clone(), &cfg), Err(Error::CertificateFailed(_))));
    }

    #[test]
    fn capacity_side_condition() {
        let cfg = PhaseTransitionConfig { delta: 0.05, ..PhaseTransitionConfig::new(0.9, q(1, 2), 12) };
        let r = phase_perturbation(|_, _| q(0, 1), &PhaseTransitionConfig { sample_depth: 2, ..cfg }).unwrap();
        assert!(r.capacity_ok, "{:?}", r.capacity);
    }
}
