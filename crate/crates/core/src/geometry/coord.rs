use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact real number `(a + b·√3) / 2^k` in canonical form.
///
/// Canonical means `k` is minimal: when `k > 0`, `a` and `b` are not both
/// even. Zero is stored as `(0, 0, 0)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i128; 3]", into = "[i128; 3]")]
pub struct CoordQ3 {
    a: i128,
    b: i128,
    k: u32,
}

impl CoordQ3 {
    pub const ZERO: CoordQ3 = CoordQ3 { a: 0, b: 0, k: 0 };
    pub const ONE: CoordQ3 = CoordQ3 { a: 1, b: 0, k: 0 };
    pub const SQRT3: CoordQ3 = CoordQ3 { a: 0, b: 1, k: 0 };

    pub fn new(a: i128, b: i128, k: u32) -> Self {
        let mut c = CoordQ3 { a, b, k };
        c.normalize();
        c
    }

    pub fn dyadic(num: i128, k: u32) -> Self {
        Self::new(num, 0, k)
    }

    pub fn a(&self) -> i128 {
        self.a
    }

    pub fn b(&self) -> i128 {
        self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn normalize(&mut self) {
        if self.a == 0 && self.b == 0 {
            self.k = 0;
            return;
        }
        let tz = self.a.trailing_zeros().min(self.b.trailing_zeros()).min(self.k);
        self.a >>= tz;
        self.b >>= tz;
        self.k -= tz;
    }

    /// Brings both operands to the common exponent `max(k1, k2)`.
    fn aligned(self, other: Self) -> (i128, i128, i128, i128, u32) {
        let k = self.k.max(other.k);
        let s1 = k - self.k;
        let s2 = k - other.k;
        (self.a << s1, self.b << s1, other.a << s2, other.b << s2, k)
    }

    /// Multiplication by the dyadic rational `num / 2^k`.
    pub fn scale_dyadic(self, num: i128, k: u32) -> Self {
        Self::new(self.a * num, self.b * num, self.k + k)
    }

    pub fn half(self) -> Self {
        self.scale_dyadic(1, 1)
    }

    pub fn signum(&self) -> i32 {
        let (a, b) = (self.a, self.b);
        let sa = a.signum() as i32;
        let sb = b.signum() as i32;
        if sa >= 0 && sb >= 0 {
            return (sa | sb).min(1);
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        // Opposite signs: compare a² with 3b².
        let a2 = a.checked_mul(a).expect("CoordQ3 overflow");
        let b2 = b.checked_mul(b).and_then(|v| v.checked_mul(3)).expect("CoordQ3 overflow");
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * 3f64.sqrt()) / 2f64.powi(self.k as i32)
    }

    /// The rational value, when the `√3` part vanishes.
    pub fn to_rational(&self) -> Option<BigRational> {
        (self.b == 0).then(|| BigRational::new(BigInt::from(self.a), BigInt::from(1) << self.k as usize))
    }

    /// `self / √3` as a rational, when `self` is a pure multiple of `√3`.
    pub fn div_sqrt3(&self) -> Option<BigRational> {
        (self.a == 0).then(|| BigRational::new(BigInt::from(self.b), BigInt::from(1) << self.k as usize))
    }
}

impl From<CoordQ3> for [i128; 3] {
    fn from(c: CoordQ3) -> Self {
        [c.a, c.b, c.k as i128]
    }
}

impl TryFrom<[i128; 3]> for CoordQ3 {
    type Error = Error;

    fn try_from(t: [i128; 3]) -> Result<Self> {
        let k = u32::try_from(t[2]).map_err(|_| Error::param("k", "exponent must be a non-negative u32"))?;
        Ok(CoordQ3::new(t[0], t[1], k))
    }
}

impl fmt::Debug for CoordQ3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.k)
    }
}

impl fmt::Display for CoordQ3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}√3)/2^{}", self.a, self.b, self.k)
    }
}

impl Add for CoordQ3 {
    type Output = CoordQ3;

    fn add(self, rhs: Self) -> Self {
        let (a1, b1, a2, b2, k) = self.aligned(rhs);
        CoordQ3::new(a1 + a2, b1 + b2, k)
    }
}

impl Sub for CoordQ3 {
    type Output = CoordQ3;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for CoordQ3 {
    type Output = CoordQ3;

    fn neg(self) -> Self {
        CoordQ3 { a: -self.a, b: -self.b, k: self.k }
    }
}

impl Mul for CoordQ3 {
    type Output = CoordQ3;

    fn mul(self, rhs: Self) -> Self {
        // (a + b√3)(c + d√3) = (ac + 3bd) + (ad + bc)√3
        let a = self.a * rhs.a + 3 * self.b * rhs.b;
        let b = self.a * rhs.b + self.b * rhs.a;
        CoordQ3::new(a, b, self.k + rhs.k)
    }
}

impl Ord for CoordQ3 {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl PartialOrd for CoordQ3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact planar point with [`CoordQ3`] coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point2 {
    pub x: CoordQ3,
    pub y: CoordQ3,
}

impl Point2 {
    pub fn new(x: CoordQ3, y: CoordQ3) -> Self {
        Point2 { x, y }
    }

    pub fn midpoint(&self, other: &Point2) -> Point2 {
        Point2::new((self.x + other.x).half(), (self.y + other.y).half())
    }

    pub fn dist_sq(&self, other: &Point2) -> CoordQ3 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// Lattice coordinates `(s, t)` with `self = s·e1 + t·e2`.
    ///
    /// Only points with a rational `x` and `y ∈ √3·ℚ` have rational lattice
    /// coordinates; anything else is rejected.
    pub fn to_skew(&self) -> Result<SkewPoint> {
        let x = self.x.to_rational().ok_or(Error::UnsupportedPoint)?;
        let y = self.y.div_sqrt3().ok_or(Error::UnsupportedPoint)?;
        // y = t·√3/2  ⇒  t = 2y/√3 ;  x = s + t/2
        let two = BigRational::from_integer(2.into());
        let t = &y * &two;
        let s = x - &t / &two;
        Ok(SkewPoint { s, t })
    }
}

/// Point in lattice coordinates: position `s·(1,0) + t·(1/2, √3/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewPoint {
    pub s: BigRational,
    pub t: BigRational,
}

impl SkewPoint {
    pub fn new(s: BigRational, t: BigRational) -> Self {
        SkewPoint { s, t }
    }

    pub fn from_ints(s: i64, t: i64, level: u32) -> Self {
        let d = BigInt::from(1) << level as usize;
        SkewPoint { s: BigRational::new(s.into(), d.clone()), t: BigRational::new(t.into(), d) }
    }

    /// Squared Euclidean distance, exact: `ds² + ds·dt + dt²`.
    pub fn dist_sq(&self, other: &SkewPoint) -> BigRational {
        let ds = &self.s - &other.s;
        let dt = &self.t - &other.t;
        &ds * &ds + &ds * &dt + &dt * &dt
    }

    pub fn to_point(&self) -> Option<Point2> {
        // x = s + t/2, y = t·√3/2; both need dyadic denominators.
        let x = &self.s + &self.t / BigRational::from_integer(2.into());
        let y = &self.t / BigRational::from_integer(2.into());
        Some(Point2::new(dyadic_coord(&x, false)?, dyadic_coord(&y, true)?))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let s = crate::rational::ratio_to_f64(&self.s);
        let t = crate::rational::ratio_to_f64(&self.t);
        (s + t / 2.0, t * 3f64.sqrt() / 2.0)
    }

    pub fn is_nonneg(&self) -> bool {
        !self.s.is_negative() && !self.t.is_negative()
    }
}

fn dyadic_coord(r: &BigRational, sqrt3: bool) -> Option<CoordQ3> {
    if !crate::rational::is_dyadic(r) {
        return None;
    }
    let k = r.denom().trailing_zeros().unwrap_or(0) as u32;
    let n: i128 = r.numer().try_into().ok()?;
    if r.is_zero() {
        return Some(CoordQ3::ZERO);
    }
    Some(if sqrt3 { CoordQ3::new(0, n, k) } else { CoordQ3::new(n, 0, k) })
}
