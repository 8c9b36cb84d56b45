use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::fat::{interval_length, FatCantorSet};
use crate::rational::{format_ratio, ratio_to_f64};
use crate::{Error, Result};

/// Relative slack for the floating-point diameter comparisons of the IFS
/// splitting.
const REL_EPS: f64 = 1e-12;

/// One level `S_k` of a separated structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureLevel {
    pub k: u32,
    pub pieces: u64,
    pub max_diam: f64,
    /// Lower bound on the distance between distinct pieces.
    pub min_dist: f64,
    /// Exact value of `max_diam²` or `min_dist` where available.
    pub max_diam_sq_exact: Option<String>,
    pub min_dist_exact: Option<String>,
    pub diam_ok: bool,
    pub dist_ok: bool,
}

/// A cylinder `f_{w_1} ∘ … ∘ f_{w_j}(F)` with bounds on its diameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cylinder {
    pub word: Vec<u8>,
    pub diam_lo: f64,
    pub diam_hi: f64,
}

/// A certified `(ν, ρ)` separated structure: every piece of `S_k` has
/// diameter below `K ν^k` and distinct pieces are more than `ρ^k / K` apart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatedStructure {
    pub nu: f64,
    pub rho: f64,
    /// The constant `K` used in the certificate.
    pub k_const: f64,
    /// Smallest `K` the computed levels require.
    pub k_min: f64,
    /// `log ν / log ρ`.
    pub threshold: f64,
    /// `L* = log ν / log ρ*` and `ν^{L*}`, for structures built from an IFS.
    pub l_star: Option<f64>,
    pub rho_general: Option<f64>,
    pub levels: Vec<StructureLevel>,
    /// Cylinder families, for structures built from an IFS.
    pub families: Vec<Vec<Cylinder>>,
    pub certified: bool,
}

fn pow_ratio(base: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * base)
}

/// `S_k = {F ∩ (I × I')}` for `F = C × C` and `I, I'` intervals of `C_k`,
/// checked exactly for `2 <= k <= k_max` against `(ν, ρ, K) = (1/2, 1/4, 2)`.
///
/// Distinct product pieces differ in one factor, so their distance is at
/// least the smallest gap between intervals of `C_k`; pieces sharing a row
/// attain it.
pub fn product_separated_structure(k_max: u32) -> Result<SeparatedStructure> {
    if k_max < 2 {
        return Err(Error::param("k", "the distance bound needs k >= 2"));
    }
    if k_max > super::fat::MAX_MATERIALIZED {
        return Err(Error::param("k", "levels are materialized up to 20"));
    }
    let two = BigRational::from_integer(2.into());
    let quarter = BigRational::new(1.into(), 4.into());
    let half = BigRational::new(1.into(), 2.into());
    let mut levels = Vec::new();
    let mut k_min: f64 = 0.0;
    for k in 2..=k_max {
        let c = FatCantorSet::level(k)?;
        let lk = interval_length(k);
        if c.intervals.iter().any(|(a, b)| b - a != lk) {
            return Err(Error::InvariantViolation(format!("C_{k} has an interval of the wrong length")));
        }
        let diam_sq = &two * &lk * &lk;
        let min_gap = c.gaps().into_iter().min().expect("k >= 1 has gaps");
        let nu_k = pow_ratio(&half, k);
        let rho_k = pow_ratio(&quarter, k);
        // the stated bounds √2·2^{-k} and 4^{-k}/4, and Definition with K = 2
        let stated = diam_sq <= &two * &nu_k * &nu_k && min_gap >= &rho_k * &quarter;
        let diam_ok = stated && diam_sq < BigRational::from_integer(4.into()) * &nu_k * &nu_k;
        let dist_ok = min_gap > &rho_k / &two;
        let max_diam = ratio_to_f64(&diam_sq).sqrt();
        let min_dist = ratio_to_f64(&min_gap);
        k_min = k_min.max(max_diam / ratio_to_f64(&nu_k)).max(ratio_to_f64(&rho_k) / min_dist);
        levels.push(StructureLevel {
            k,
            pieces: 1u64 << (2 * k),
            max_diam,
            min_dist,
            max_diam_sq_exact: Some(format_ratio(&diam_sq)),
            min_dist_exact: Some(format_ratio(&min_gap)),
            diam_ok,
            dist_ok,
        });
    }
    let certified = levels.iter().all(|l| l.diam_ok && l.dist_ok) && closed_form_k2_holds(k_max);
    Ok(SeparatedStructure {
        nu: 0.5,
        rho: 0.25,
        k_const: 2.0,
        k_min,
        threshold: 0.5,
        l_star: None,
        rho_general: None,
        levels,
        families: Vec::new(),
        certified,
    })
}

/// `√2·2^k/(2^{k+1}-1) < 2` and `(2^k-1)(2^{k+1}-1)/4^k < 2` hold for every
/// `k`; checked here in integers on the computed range.
fn closed_form_k2_holds(k_max: u32) -> bool {
    (2..=k_max).all(|k| {
        let p: BigInt = BigInt::one() << k;
        let diam = BigInt::from(2) * &p * &p < BigInt::from(4) * num_traits::Pow::pow(BigInt::from(2) * &p - 1, 2u32);
        let dist = (&p - 1) * (BigInt::from(2) * &p - 1) < BigInt::from(2) * &p * &p;
        diam && dist
    })
}

/// Contraction bounds `lower·|x-y| <= |f(x)-f(y)| <= upper·|x-y|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsMap {
    pub lower: f64,
    pub upper: f64,
}

impl IfsMap {
    pub fn similarity(ratio: f64) -> Self {
        IfsMap { lower: ratio, upper: ratio }
    }

    pub fn bi_lipschitz(lower: f64, upper: f64) -> Self {
        IfsMap { lower, upper }
    }

    fn is_similarity(&self) -> bool {
        self.lower == self.upper
    }
}

/// Largest family computed by the splitting procedure.
const MAX_FAMILY: usize = 1 << 20;

/// Splits cylinders until every one has diameter at most `ν^k |F|`, for
/// `k <= k_max`, and certifies the separated structure this yields.
///
/// `diameter` is `|F|` and `separation` the least distance between the
/// first-level cylinders. For similarities `ρ = ν`; otherwise
/// `ρ = ν^{L*}` with `L* = log ν / log ρ*`, `ρ* = max upper`.
pub fn ifs_separated_structure(maps: &[IfsMap], diameter: f64, separation: f64, k_max: u32) -> Result<SeparatedStructure> {
    if maps.len() < 2 {
        return Err(Error::param("maps", "need at least two maps"));
    }
    if maps.len() > 255 {
        return Err(Error::param("maps", "at most 255 maps"));
    }
    for (i, m) in maps.iter().enumerate() {
        if !(m.lower > 0.0 && m.lower <= m.upper && m.upper < 1.0) {
            return Err(Error::param("maps", format!("map {i} is not a bi-Lipschitz contraction: {m:?}")));
        }
    }
    if !(separation > 0.0) {
        return Err(Error::param("separation", "the first-level cylinders must be at positive distance"));
    }
    if !(diameter > 0.0) {
        return Err(Error::param("diameter", "must be positive"));
    }
    let nu = maps.iter().map(|m| m.lower).fold(f64::INFINITY, f64::min);
    let rho_star = maps.iter().map(|m| m.upper).fold(0.0, f64::max);
    let l_star = nu.ln() / rho_star.ln();
    let similarity = maps.iter().all(IfsMap::is_similarity);
    let rho_general = nu.powf(l_star);
    let rho = if similarity { nu } else { rho_general };

    let mut family = vec![Cylinder { word: Vec::new(), diam_lo: diameter, diam_hi: diameter }];
    let mut families = Vec::new();
    let mut raw = Vec::new();
    for k in 0..=k_max {
        let target = nu.powi(k as i32) * diameter;
        let mut out = Vec::new();
        // words of the split cylinders, with their lower contraction factor
        let mut split: Vec<(Vec<u8>, f64)> = Vec::new();
        let mut stack = family;
        while let Some(cyl) = stack.pop() {
            if cyl.diam_hi > target * (1.0 + REL_EPS) {
                split.push((cyl.word.clone(), cyl.diam_lo / diameter));
                for (i, m) in maps.iter().enumerate() {
                    let mut word = cyl.word.clone();
                    word.push(i as u8);
                    stack.push(Cylinder { word, diam_lo: cyl.diam_lo * m.lower, diam_hi: cyl.diam_hi * m.upper });
                }
            } else {
                out.push(cyl);
            }
            if out.len() + stack.len() > MAX_FAMILY {
                return Err(Error::param("k_max", "cylinder family grows beyond 2^20 members"));
            }
        }
        out.sort_by(|a, b| a.word.cmp(&b.word));
        // ancestors of the family, which were split at this or earlier levels
        let mut prefixes: Vec<(Vec<u8>, f64)> = Vec::new();
        for c in &out {
            let mut lo = 1.0;
            for j in 0..c.word.len() {
                prefixes.push((c.word[..j].to_vec(), lo));
                lo *= maps[c.word[j] as usize].lower;
            }
        }
        prefixes.sort_by(|a, b| a.0.cmp(&b.0));
        prefixes.dedup_by(|a, b| a.0 == b.0);
        let min_dist = if out.len() > 1 {
            prefixes.iter().map(|(_, lo)| separation * lo).fold(f64::INFINITY, f64::min)
        } else {
            f64::INFINITY
        };
        let max_diam = out.iter().map(|c| c.diam_hi).fold(0.0, f64::max);
        let longest = prefixes.iter().map(|p| p.0.len()).max().unwrap_or(0);
        if longest as f64 > k as f64 * l_star + 1e-9 && !split.is_empty() {
            return Err(Error::InvariantViolation(format!(
                "split cylinder of length {longest} exceeds k·L* = {}",
                k as f64 * l_star
            )));
        }
        raw.push((k, out.len() as u64, max_diam, min_dist));
        families.push(out.clone());
        family = out;
    }
    let k_min = raw
        .iter()
        .map(|&(k, _, d, s)| {
            let by_diam = d / nu.powi(k as i32);
            let by_dist = if s.is_finite() { rho.powi(k as i32) / s } else { 0.0 };
            by_diam.max(by_dist)
        })
        .fold(0.0, f64::max);
    let k_const = k_min * (1.0 + 1e-9);
    let levels: Vec<StructureLevel> = raw
        .into_iter()
        .map(|(k, pieces, max_diam, min_dist)| StructureLevel {
            k,
            pieces,
            max_diam,
            min_dist,
            max_diam_sq_exact: None,
            min_dist_exact: None,
            diam_ok: max_diam < k_const * nu.powi(k as i32),
            dist_ok: min_dist > rho.powi(k as i32) / k_const,
        })
        .collect();
    let certified = levels.iter().all(|l| l.diam_ok && l.dist_ok);
    Ok(SeparatedStructure {
        nu,
        rho,
        k_const,
        k_min,
        threshold: nu.ln() / rho.ln(),
        l_star: Some(l_star),
        rho_general: Some(rho_general),
        levels,
        families,
        certified,
    })
}
