//! The rescaled triangle `Δ*` with vertices `(0,0)`, `(2/√3,0)`, `(1/√3,1)`
//! and its triangular lattice `T*_n`.
//!
//! Points of `Δ*` are stored as `(u, y)` with Cartesian position
//! `(u/√3, y)`; in these coordinates all lattice vertices are dyadic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::address::TriangleAddress;
use super::coord::SkewPoint;
use crate::rational::{pow2_neg, ratio_to_f64};
use crate::{Error, Result};

/// Point of the plane in `Δ*` coordinates: Cartesian `(u/√3, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StarPoint {
    pub u: BigRational,
    pub y: BigRational,
}

impl StarPoint {
    pub fn new(u: BigRational, y: BigRational) -> Self {
        StarPoint { u, y }
    }

    /// `v*_1`, `v*_2`, `v*_3`.
    pub fn star_vertices() -> [StarPoint; 3] {
        let r = |n: i64| BigRational::from_integer(n.into());
        [StarPoint::new(r(0), r(0)), StarPoint::new(r(2), r(0)), StarPoint::new(r(1), r(1))]
    }

    pub fn dist_sq(&self, other: &StarPoint) -> BigRational {
        let du = &self.u - &other.u;
        let dy = &self.y - &other.y;
        &du * &du / BigRational::from_integer(3.into()) + &dy * &dy
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (ratio_to_f64(&self.u) / 3f64.sqrt(), ratio_to_f64(&self.y))
    }
}

/// The similarity `Ψ_T` from a construction triangle onto `Δ*`.
#[derive(Clone, Debug)]
pub struct Similarity {
    pub triangle: TriangleAddress,
    /// `labels[k]` is the index of the triangle vertex sent to `v*_{k+1}`.
    pub labels: [usize; 3],
}

/// Builds `Ψ_T` for the given labeling of the vertices of `T`.
pub fn psi(triangle: &TriangleAddress, labels: [usize; 3]) -> Result<Similarity> {
    let mut seen = [false; 3];
    for &l in &labels {
        if l > 2 || seen[l] {
            return Err(Error::DegenerateLabels(labels));
        }
        seen[l] = true;
    }
    Ok(Similarity { triangle: triangle.clone(), labels })
}

impl Similarity {
    /// Barycentric coordinates of `p` with respect to `(v1, v2, v3)` of `T`.
    pub fn barycentric(&self, p: &SkewPoint) -> [BigRational; 3] {
        let n = self.triangle.level();
        let (ci, cj) = self.triangle.corner();
        let scale = BigRational::from_integer(BigInt::one() << n as usize);
        let a = &p.s * &scale - BigRational::from_integer(ci.into());
        let b = &p.t * &scale - BigRational::from_integer(cj.into());
        let c = BigRational::one() - &a - &b;
        [c, a, b]
    }

    pub fn apply(&self, p: &SkewPoint) -> StarPoint {
        let bary = self.barycentric(p);
        let l2 = &bary[self.labels[1]];
        let l3 = &bary[self.labels[2]];
        let two = BigRational::from_integer(2.into());
        StarPoint::new(l2 * &two + l3, l3.clone())
    }

    /// Square of the scale factor `2^n · 2/√3`.
    pub fn scale_sq(&self) -> BigRational {
        let n = self.triangle.level() as usize;
        BigRational::new(BigInt::from(4) << (2 * n), 3.into())
    }

    pub fn scale(&self) -> f64 {
        2f64.powi(self.triangle.level() as i32) * 2.0 / 3f64.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    Up,
    Down,
}

/// A tile of `T*_n`, in units of `2^-n` of the `(u, y)` coordinates.
///
/// `Up(col, row)` has vertices `(col,row)`, `(col+2,row)`, `(col+1,row+1)`;
/// `Down(col, row)` has vertices `(col-1,row+1)`, `(col+1,row+1)`, `(col,row)`.
/// In both cases `col ≡ row (mod 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeTriangle {
    pub n: u32,
    pub row: i64,
    pub col: i64,
    pub orientation: Orientation,
}

impl LatticeTriangle {
    /// The tile covered by the image of a construction triangle under `Ψ_{Δ₀}`.
    pub fn from_address(t: &TriangleAddress) -> Self {
        let (i, j) = t.corner();
        LatticeTriangle { n: t.level(), row: j as i64, col: (2 * i + j) as i64, orientation: Orientation::Up }
    }

    pub fn vertices(&self) -> [(i64, i64); 3] {
        let (c, r) = (self.col, self.row);
        match self.orientation {
            Orientation::Up => [(c, r), (c + 2, r), (c + 1, r + 1)],
            Orientation::Down => [(c - 1, r + 1), (c + 1, r + 1), (c, r)],
        }
    }

    /// Down tiles sharing the left and right edges of an up tile.
    pub fn side_neighbours(&self) -> [LatticeTriangle; 2] {
        assert_eq!(self.orientation, Orientation::Up);
        let d = |col| LatticeTriangle { n: self.n, row: self.row, col, orientation: Orientation::Down };
        [d(self.col), d(self.col + 2)]
    }

    /// Whether the open tile meets the horizontal line at height `y`.
    pub fn meets_horizontal(&self, y: &BigRational) -> bool {
        let scaled = y * BigRational::from_integer(BigInt::one() << self.n as usize);
        let lo = BigRational::from_integer(self.row.into());
        let hi = BigRational::from_integer((self.row + 1).into());
        lo < scaled && scaled < hi
    }
}

/// Height `y ∈ (0,1)` of a horizontal line in `Δ*`, together with the level
/// `n` at which it is examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalLevel {
    pub y: BigRational,
    pub n: u32,
}

impl HorizontalLevel {
    /// The line through the middle third of the dyadic interval with the
    /// given leading binary digits: `y = 0.e1…en + 2^-n/3`.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        if digits.iter().any(|&d| d > 1) {
            return Err(Error::param("digits", "binary digits must be 0 or 1"));
        }
        let n = digits.len() as u32;
        let mut y = BigRational::zero();
        for (k, &d) in digits.iter().enumerate() {
            if d == 1 {
                y += pow2_neg(k as u32 + 1);
            }
        }
        y += pow2_neg(n) / BigRational::from_integer(3.into());
        Ok(HorizontalLevel { y, n })
    }

    /// A line at an arbitrary rational height. Heights on a level-`n` row of
    /// the lattice (`2^n y` an integer) are rejected.
    pub fn from_rational(y: BigRational, n: u32) -> Result<Self> {
        if y <= BigRational::zero() || y >= BigRational::one() {
            return Err(Error::param("y", "must lie in (0, 1)"));
        }
        let scaled = &y * BigRational::from_integer(BigInt::one() << n as usize);
        if scaled.is_integer() {
            return Err(Error::param("y", format!("y = {y} is dyadic at level {n}; the line runs along lattice edges")));
        }
        Ok(HorizontalLevel { y, n })
    }

    /// The first `n` binary digits of `y`.
    pub fn digits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut frac = self.y.clone();
        let two = BigRational::from_integer(2.into());
        for _ in 0..self.n {
            frac *= &two;
            if frac >= BigRational::one() {
                out.push(1);
                frac -= BigRational::one();
            } else {
                out.push(0);
            }
        }
        out
    }
}

/// Number of level-`n` construction triangles of `Δ*` crossed by the line,
/// by the digit recursion: a `1` keeps the single upper child, a `0` keeps
/// both lower children.
pub fn lattice_count(line: &HorizontalLevel) -> u128 {
    line.digits().iter().fold(1u128, |acc, &d| if d == 1 { acc } else { acc * 2 })
}

/// `log2` of [`lattice_count`] without forming the power.
pub fn lattice_count_log2(digits: &[u8]) -> u64 {
    digits.iter().filter(|&&d| d == 0).count() as u64
}

/// Result of the brute-force intersection of a line with `T*_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeHits {
    pub up: usize,
    pub down: usize,
    pub up_tiles: Vec<LatticeTriangle>,
}

impl LatticeHits {
    pub fn total(&self) -> usize {
        self.up + self.down
    }
}

/// Exact geometric count: every level-`n` construction triangle is tested
/// against the line, and the down tiles adjacent to hit triangles are
/// collected alongside.
pub fn lattice_hits(line: &HorizontalLevel) -> Result<LatticeHits> {
    if line.n > 16 {
        return Err(Error::param("n", "brute-force intersection is limited to n <= 16"));
    }
    let mut level = vec![TriangleAddress::root()];
    for _ in 0..line.n {
        level = level.iter().flat_map(|t| t.children()).collect();
    }
    let up_tiles: Vec<LatticeTriangle> = level
        .iter()
        .map(LatticeTriangle::from_address)
        .filter(|tile| tile.meets_horizontal(&line.y))
        .collect();
    let down: BTreeSet<LatticeTriangle> = up_tiles.iter().flat_map(|t| t.side_neighbours()).collect();
    Ok(LatticeHits { up: up_tiles.len(), down: down.len(), up_tiles })
}
