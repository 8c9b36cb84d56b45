use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::labeling::extreme_labeling;
use crate::geometry::{boundary_family, BoundaryFamilyL, TriangleAddress};
use crate::holder::VertexFunction;
use crate::{Error, Result};

/// A rational exponent `d1 = num/den` in lowest terms, `0 < d1 < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct D1 {
    num: u32,
    den: u32,
}

impl D1 {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::param("d1", format!("{num}/{den} is not in (0, 1)")));
        }
        let g = num.gcd(&den);
        Ok(D1 { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// Smallest `m` with `m·d1` an integer.
    pub fn q(&self) -> u32 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `n·d1`, or an error when it is not an integer.
    pub fn times(&self, n: u32) -> Result<u32> {
        if n % self.den != 0 {
            return Err(Error::param("n", format!("n·d1 = {n}·{self} is not an integer")));
        }
        Ok(n / self.den * self.num)
    }

    /// Best rational approximation of `x ∈ (0,1)` with denominator at most `max_den`.
    pub fn approximate(x: f64, max_den: u32) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::param("d1", format!("{x} is not in (0, 1)")));
        }
        let mut best = (1u32, max_den.max(2));
        let mut err = f64::INFINITY;
        for den in 2..=max_den.max(2) {
            let num = ((x * den as f64).round() as u32).clamp(1, den - 1);
            let e = (num as f64 / den as f64 - x).abs();
            if e < err - 1e-15 {
                err = e;
                best = (num, den);
            }
        }
        D1::new(best.0, best.1)
    }
}

impl fmt::Display for D1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for D1 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("d1 `{s}` is not a fraction p/q"));
        match s.trim().split_once('/') {
            Some((a, b)) => D1::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let x: f64 = s.trim().parse().map_err(|_| bad())?;
                D1::approximate(x, 1 << 20)
            }
        }
    }
}

impl TryFrom<String> for D1 {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<D1> for String {
    fn from(d: D1) -> String {
        d.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub n: u32,
    pub l: u32,
    pub d1: D1,
    pub alpha: f64,
    /// `#{T ∈ τ_n^l : κ(T) >= 2^{-n d1}}`.
    pub count: u64,
    pub binomial_bound: f64,
    /// `c^n`, the bound on the Lebesgue measure of `f` over well-conducting triangles.
    pub image_measure: f64,
    pub census_constant: f64,
}

impl CensusReport {
    pub fn passes(&self) -> bool {
        self.count as f64 <= self.binomial_bound
    }
}

/// `(e n/(n d1))^{n d1} (3(2^l-1))^{n d1} 2^{n - n d1}`, with `1` for `n = 0`.
pub fn binomial_bound(n: u32, l: u32, d1: D1) -> Result<f64> {
    let k = d1.times(n)?;
    if n == 0 {
        return Ok(1.0);
    }
    let (n, k) = (n as f64, k as f64);
    let branch = 3.0 * ((2f64).powi(l as i32) - 1.0);
    Ok((std::f64::consts::E * n / k).powf(k) * branch.powf(k) * (n - k).exp2())
}

fn constant(alpha: f64, l: u32, d1: D1, branch: f64) -> f64 {
    let d = d1.to_f64();
    (std::f64::consts::E / d).powf(d) * branch.powf(d) * (1.0 - d - l as f64 * alpha).exp2()
}

/// `c = (e/d1)^{d1} (3(2^l-1))^{d1} 2^{1-d1-lα}`.
pub fn census_constant(alpha: f64, l: u32, d1: D1) -> f64 {
    constant(alpha, l, d1, 3.0 * ((2f64).powi(l as i32) - 1.0))
}

/// The same constant with `2^l` in place of `2^l - 1`.
pub fn census_constant_relaxed(alpha: f64, l: u32, d1: D1) -> f64 {
    constant(alpha, l, d1, 3.0 * (2f64).powi(l as i32))
}

fn count_dfs(
    f: &(impl VertexFunction + ?Sized),
    family: &BoundaryFamilyL,
    t: &TriangleAddress,
    depth: u32,
    exp: u32,
    budget: u32,
) -> Result<u64> {
    if depth == 0 {
        return Ok(1);
    }
    let lab = extreme_labeling(&f.triangle_values(t)?);
    let extreme: Vec<usize> =
        [lab.low, lab.high].into_iter().flatten().map(|c| family.corner_index(c as u8)).collect();
    let mut total = 0;
    for (wi, w) in family.addresses.iter().enumerate() {
        let e = exp + u32::from(!extreme.contains(&wi));
        if e <= budget {
            total += count_dfs(f, family, &t.concat(w.digits()), depth - 1, e, budget)?;
        }
    }
    Ok(total)
}

/// Counts the well-conducting triangles of `τ_n^l`.
///
/// The extreme labeling, and therefore `κ`, depends only on `f`, so the
/// census does not take a level `r`.
pub fn well_conducting_census(
    f: &(impl VertexFunction + ?Sized),
    n: u32,
    l: u32,
    d1: D1,
    alpha: f64,
) -> Result<CensusReport> {
    let budget = d1.times(n)?;
    let family = boundary_family(l)?;
    let count = count_dfs(f, &family, &TriangleAddress::root(), n, 0, budget)?;
    let binomial_bound = binomial_bound(n, l, d1)?;
    if count as f64 > binomial_bound {
        return Err(Error::InvariantViolation(format!(
            "census {count} exceeds the binomial bound {binomial_bound}"
        )));
    }
    let c = census_constant(alpha, l, d1);
    Ok(CensusReport {
        n,
        l,
        d1,
        alpha,
        count,
        binomial_bound,
        image_measure: c.powi(n as i32),
        census_constant: c,
    })
}
