use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::StarPoint;
use crate::{Error, Result};

/// Dyadic number `num / 2^depth` in `[0, 1]`, with `depth` minimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub depth: u32,
}

impl Dyadic {
    pub fn new(mut num: u64, mut depth: u32) -> Result<Self> {
        if depth > 62 || num > (1u64 << depth) {
            return Err(Error::param("x", format!("{num}/2^{depth} is not a dyadic point of [0, 1]")));
        }
        while depth > 0 && num & 1 == 0 {
            num >>= 1;
            depth -= 1;
        }
        Ok(Dyadic { num, depth })
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        if digits.iter().any(|&d| d > 1) {
            return Err(Error::param("digits", "binary digits must be 0 or 1"));
        }
        let num = digits.iter().fold(0u64, |acc, &d| (acc << 1) | d as u64);
        Dyadic::new(num, digits.len() as u32)
    }

    pub fn one() -> Self {
        Dyadic { num: 1, depth: 0 }
    }

    pub fn is_one(&self) -> bool {
        self.num == 1u64 << self.depth
    }

    /// Binary digits `e_1 … e_depth` (meaningless for `x = 1`).
    pub fn digits(&self) -> Vec<u8> {
        (1..=self.depth).map(|k| ((self.num >> (self.depth - k)) & 1) as u8).collect()
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.depth as i32)
    }

    fn at_depth(&self, d: u32) -> u64 {
        self.num << (d - self.depth)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let d = self.depth.max(other.depth);
        self.at_depth(d).cmp(&other.at_depth(d))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn counts(digits: &[u8]) -> (i32, i32) {
    let ones = digits.iter().filter(|&&d| d == 1).count() as i32;
    (ones, digits.len() as i32 - ones)
}

/// `λ_p` of the dyadic interval with the given leading digits:
/// `p^{#1} (1-p)^{#0}`.
pub fn lambda_p_interval(digits: &[u8], p: f64) -> f64 {
    let (ones, zeros) = counts(digits);
    p.powi(ones) * (1.0 - p).powi(zeros)
}

pub fn lambda_p_interval_exact(digits: &[u8], p: &BigRational) -> BigRational {
    let (ones, zeros) = counts(digits);
    num_traits::pow(p.clone(), ones as usize) * num_traits::pow(BigRational::one() - p, zeros as usize)
}

/// CDF of `λ_p`: the sum over the ones of `x` of the measure of the
/// interval obtained by turning that one into a zero.
fn cdf_generic<T>(digits: &[u8], p: T, one: T, zero: T) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    let q = one.clone() - p.clone();
    let mut w = one;
    let mut acc = zero;
    for &d in digits {
        if d == 1 {
            acc = acc + w.clone() * q.clone();
            w = w * p.clone();
        } else {
            w = w * q.clone();
        }
    }
    acc
}

/// `λ_p([x, 1))` for `x` given by finitely many digits, as a sum of
/// positive terms.
fn upper_tail<T>(digits: &[u8], p: T, one: T, zero: T) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    let q = one.clone() - p.clone();
    let mut w = one;
    let mut acc = zero;
    for &d in digits {
        if d == 0 {
            acc = acc + w.clone() * p.clone();
            w = w * q.clone();
        } else {
            w = w * p.clone();
        }
    }
    acc + w
}

/// `λ_p([x, y))` for dyadic `x <= y`, without subtracting two CDF values.
fn interval_generic<T>(x: &Dyadic, y: &Dyadic, p: T, one: T, zero: T) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    if x >= y {
        return zero;
    }
    if y.is_one() {
        return upper_tail(&x.digits(), p, one, zero);
    }
    let d = x.depth.max(y.depth);
    let (xa, ya) = (x.at_depth(d), y.at_depth(d));
    let xd: Vec<u8> = (1..=d).map(|k| ((xa >> (d - k)) & 1) as u8).collect();
    let yd: Vec<u8> = (1..=d).map(|k| ((ya >> (d - k)) & 1) as u8).collect();
    let c = xd.iter().zip(&yd).take_while(|(a, b)| a == b).count();
    let q = one.clone() - p.clone();
    let mut w = one.clone();
    for &e in &xd[..c] {
        w = if e == 1 { w * p.clone() } else { w * q.clone() };
    }
    let tail_x = upper_tail(&xd[c + 1..], p.clone(), one.clone(), zero.clone());
    let head_y = cdf_generic(&yd[c + 1..], p.clone(), one, zero);
    w * (q * tail_x + p * head_y)
}

/// `f(x) = λ_p([0, x))`.
pub fn bernoulli_cdf(x: &Dyadic, p: f64) -> f64 {
    if x.is_one() {
        return 1.0;
    }
    cdf_generic(&x.digits(), p, 1.0, 0.0)
}

pub fn bernoulli_cdf_exact(x: &Dyadic, p: &BigRational) -> BigRational {
    if x.is_one() {
        return BigRational::one();
    }
    cdf_generic(&x.digits(), p.clone(), BigRational::one(), BigRational::zero())
}

/// `λ_p([x, y))`, computed from the common prefix of `x` and `y`.
pub fn bernoulli_interval(x: &Dyadic, y: &Dyadic, p: f64) -> f64 {
    interval_generic(x, y, p, 1.0, 0.0)
}

pub fn bernoulli_interval_exact(x: &Dyadic, y: &Dyadic, p: &BigRational) -> BigRational {
    interval_generic(x, y, p.clone(), BigRational::one(), BigRational::zero())
}

/// The witness `φ(u, y) = λ_p([0, y))` on `Δ*`, with `p = 2^-α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliWitnessFn {
    pub p: f64,
    pub alpha: f64,
    pub max_depth: u32,
}

impl BernoulliWitnessFn {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", "the witness needs 0 < α < 1 so that 1/2 < p < 1"));
        }
        Ok(BernoulliWitnessFn { p: 2f64.powf(-alpha), alpha, max_depth: 64 })
    }

    pub fn from_p(p: f64) -> Result<Self> {
        if !(p > 0.5 && p < 1.0) {
            return Err(Error::param("p", "must satisfy 1/2 < p < 1"));
        }
        Ok(BernoulliWitnessFn { p, alpha: -p.log2(), max_depth: 64 })
    }

    pub fn with_max_depth(mut self, max_depth: u32) -> Self {
        self.max_depth = max_depth;
        self
    }

    /// Bound `p^max_depth` on the error of cutting the expansion of `y`.
    pub fn truncation_error(&self) -> f64 {
        self.p.powi(self.max_depth as i32)
    }

    /// `f(y)` for a rational `y ∈ [0, 1]`, using up to `max_depth` exact
    /// binary digits.
    pub fn cdf_rational(&self, y: &BigRational) -> f64 {
        if *y <= BigRational::zero() {
            return 0.0;
        }
        if *y >= BigRational::one() {
            return 1.0;
        }
        let mut digits = Vec::with_capacity(self.max_depth as usize);
        let mut frac = y.clone();
        let two = BigRational::from_integer(BigInt::from(2));
        for _ in 0..self.max_depth {
            if frac.is_zero() {
                break;
            }
            frac *= &two;
            if frac >= BigRational::one() {
                digits.push(1);
                frac -= BigRational::one();
            } else {
                digits.push(0);
            }
        }
        cdf_generic(&digits, self.p, 1.0, 0.0)
    }

    pub fn cdf(&self, y: &Dyadic) -> f64 {
        bernoulli_cdf(y, self.p)
    }

    /// `φ` at a point of `Δ*`.
    pub fn phi(&self, x: &StarPoint) -> f64 {
        self.cdf_rational(&x.y)
    }

    /// Draws `n` i.i.d. digits equal to `1` with probability `p`.
    pub fn sample_digits<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.gen_bool(self.p) as u8).collect()
    }

    /// The Hölder bound `3|x - y|^α` of the witness at distance `d`.
    pub fn holder_bound(&self, d: f64) -> f64 {
        3.0 * d.powf(self.alpha)
    }

    pub fn phi_f64(&self, y: f64) -> f64 {
        self.cdf_rational(&BigRational::from_float(y).unwrap_or_else(BigRational::zero))
    }
}
