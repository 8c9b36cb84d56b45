use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::coord::{CoordQ3, Point2, SkewPoint};
use crate::{Error, Result};

/// Largest level for which lattice coordinates fit comfortably in `u64`.
pub const MAX_LEVEL: u32 = 60;

/// A construction triangle of `Δ`, named by its word over `{0,1,2}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TriangleAddress {
    digits: Vec<u8>,
}

impl TriangleAddress {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d > 2) {
            return Err(Error::InvalidDigit(char::from_digit(d as u32, 10).unwrap_or('?')));
        }
        Ok(TriangleAddress { digits })
    }

    /// The level-`n` triangle whose lower-left lattice corner is `(i, j) / 2^n`.
    pub fn from_corner(i: u64, j: u64, n: u32) -> Result<Self> {
        if n > MAX_LEVEL {
            return Err(Error::param("n", format!("level {n} exceeds {MAX_LEVEL}")));
        }
        if i & j != 0 || (i | j) >> n != 0 {
            return Err(Error::OutsideConstruction { level: n });
        }
        let digits = (0..n)
            .map(|k| {
                let bit = n - 1 - k;
                (((i >> bit) & 1) + 2 * ((j >> bit) & 1)) as u8
            })
            .collect();
        Ok(TriangleAddress { digits })
    }

    pub fn level(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn child(&self, d: u8) -> Self {
        debug_assert!(d < 3);
        let mut digits = Vec::with_capacity(self.digits.len() + 1);
        digits.extend_from_slice(&self.digits);
        digits.push(d);
        TriangleAddress { digits }
    }

    pub fn children(&self) -> [TriangleAddress; 3] {
        [self.child(0), self.child(1), self.child(2)]
    }

    pub fn concat(&self, suffix: &[u8]) -> Self {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(suffix);
        TriangleAddress { digits }
    }

    pub fn parent(&self) -> Option<Self> {
        (!self.is_root()).then(|| TriangleAddress { digits: self.digits[..self.digits.len() - 1].to_vec() })
    }

    pub fn prefix(&self, len: usize) -> Self {
        TriangleAddress { digits: self.digits[..len.min(self.digits.len())].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &TriangleAddress) -> bool {
        other.digits.starts_with(&self.digits)
    }

    /// Lower-left lattice corner `(i, j)` in units of `2^-n`.
    pub fn corner(&self) -> (u64, u64) {
        assert!(self.level() <= MAX_LEVEL, "address too deep for lattice coordinates");
        self.digits.iter().fold((0u64, 0u64), |(i, j), &d| {
            ((i << 1) | (d == 1) as u64, (j << 1) | (d == 2) as u64)
        })
    }

    /// The three vertices `(v1, v2, v3)` in lattice form.
    pub fn vertex_ids(&self) -> [Vertex; 3] {
        let (i, j) = self.corner();
        let n = self.level();
        [Vertex::new(i, j, n), Vertex::new(i + 1, j, n), Vertex::new(i, j + 1, n)]
    }

    /// The three vertices `(v1, v2, v3)` as exact planar points.
    pub fn vertices(&self) -> [Point2; 3] {
        self.vertex_ids().map(|v| v.point())
    }

    pub fn side(&self) -> CoordQ3 {
        CoordQ3::dyadic(1, self.level())
    }
}

impl fmt::Display for TriangleAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TriangleAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            f.write_str("Δ₀")
        } else {
            write!(f, "T[{self}]")
        }
    }
}

impl FromStr for TriangleAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c {
                '0'..='2' => Ok(c as u8 - b'0'),
                _ => Err(Error::InvalidDigit(c)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TriangleAddress { digits })
    }
}

impl Serialize for TriangleAddress {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TriangleAddress {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A vertex of the construction, i.e. a point of `V = ⋃ V_n`.
///
/// Stored as the lattice point `(i, j) / 2^level` at the smallest level where
/// it appears, so equal points compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex {
    level: u32,
    i: u64,
    j: u64,
}

impl Vertex {
    /// Lattice point `(i, j) / 2^n`. Does not check membership in `V_n`.
    pub fn new(mut i: u64, mut j: u64, mut n: u32) -> Self {
        while n > 0 && i & 1 == 0 && j & 1 == 0 {
            i >>= 1;
            j >>= 1;
            n -= 1;
        }
        Vertex { level: n, i, j }
    }

    /// Level at which this vertex first appears.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Lattice coordinates in units of `2^-n`; requires `n >= self.level()`.
    pub fn at_level(&self, n: u32) -> (u64, u64) {
        assert!(n >= self.level, "vertex not yet present at level {n}");
        let s = n - self.level;
        (self.i << s, self.j << s)
    }

    pub fn skew(&self) -> SkewPoint {
        SkewPoint::from_ints(self.i as i64, self.j as i64, self.level)
    }

    pub fn point(&self) -> Point2 {
        let (i, j, k) = (self.i as i128, self.j as i128, self.level + 1);
        Point2::new(CoordQ3::new(2 * i + j, 0, k), CoordQ3::new(0, j, k))
    }

    /// Triangles at the vertex's own level having it as a corner, as
    /// `(address, corner index)`, in address order.
    pub fn incident(&self) -> Vec<(TriangleAddress, u8)> {
        let (i, j, n) = (self.i, self.j, self.level);
        let mut out = Vec::with_capacity(2);
        let cands = [(Some(i), Some(j), 0u8), (i.checked_sub(1), Some(j), 1), (Some(i), j.checked_sub(1), 2)];
        for (ci, cj, c) in cands {
            if let (Some(ci), Some(cj)) = (ci, cj) {
                if let Ok(t) = TriangleAddress::from_corner(ci, cj, n) {
                    out.push((t, c));
                }
            }
        }
        out.sort();
        out
    }

    /// True when the point is a vertex of some construction triangle.
    pub fn is_construction_vertex(&self) -> bool {
        !self.incident().is_empty()
    }

    /// Text name `"<triangle address>:<corner>"`, using the first incident
    /// triangle at the vertex's own level.
    pub fn address(&self) -> Option<String> {
        self.incident().first().map(|(t, c)| format!("{t}:{c}"))
    }

    pub fn parse_address(s: &str) -> Result<Self> {
        let (t, c) = s.rsplit_once(':').ok_or_else(|| Error::Parse(format!("vertex address {s:?} lacks ':'")))?;
        let t: TriangleAddress = t.parse()?;
        let c: usize = c.parse().map_err(|_| Error::Parse(format!("bad corner in {s:?}")))?;
        if c > 2 {
            return Err(Error::Parse(format!("corner index {c} out of range")));
        }
        Ok(t.vertex_ids()[c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn addr(s: &str) -> TriangleAddress {
        s.parse().unwrap()
    }

    #[test]
    fn root_vertices() {
        let [a, b, c] = TriangleAddress::root().vertices();
        assert_eq!(a, Point2::new(CoordQ3::ZERO, CoordQ3::ZERO));
        assert_eq!(b, Point2::new(CoordQ3::ONE, CoordQ3::ZERO));
        assert_eq!(c, Point2::new(CoordQ3::dyadic(1, 1), CoordQ3::new(0, 1, 1)));
    }

    #[test]
    fn child_zero_is_scaled_copy_at_origin() {
        let [a, b, c] = addr("0").vertices();
        assert_eq!(a, Point2::new(CoordQ3::ZERO, CoordQ3::ZERO));
        assert_eq!(b, Point2::new(CoordQ3::dyadic(1, 1), CoordQ3::ZERO));
        assert_eq!(c, Point2::new(CoordQ3::dyadic(1, 2), CoordQ3::new(0, 1, 2)));
    }

    #[test]
    fn apex_subtriangle() {
        // By hand: the apex map is x ↦ x/2 + (1/4, √3/4); applied twice to
        // Δ₀ its top vertex stays at the apex and the side shrinks to 1/4.
        let t = addr("22");
        let [a, b, c] = t.vertices();
        let apex = Point2::new(CoordQ3::dyadic(1, 1), CoordQ3::new(0, 1, 1));
        assert_eq!(c, apex);
        assert_eq!(a, Point2::new(CoordQ3::dyadic(3, 3), CoordQ3::new(0, 3, 3)));
        assert_eq!(b, Point2::new(CoordQ3::dyadic(5, 3), CoordQ3::new(0, 3, 3)));
        assert_eq!(a.dist_sq(&b), CoordQ3::dyadic(1, 4));
    }

    #[test]
    fn corner_roundtrip_and_text() {
        let t = addr("0120");
        let (i, j) = t.corner();
        assert_eq!(TriangleAddress::from_corner(i, j, 4).unwrap(), t);
        assert_eq!(t.to_string(), "0120");
        assert!("013".parse::<TriangleAddress>().is_err());
        assert!(TriangleAddress::from_corner(1, 1, 2).is_err());
        let js = serde_json::to_string(&t).unwrap();
        assert_eq!(js, "\"0120\"");
    }

    #[test]
    fn vertex_names() {
        let apex = TriangleAddress::root().vertex_ids()[2];
        assert_eq!(apex.address().unwrap(), ":2");
        // midpoint of the bottom edge is shared by children 0 and 1
        let mid = addr("0").vertex_ids()[1];
        assert_eq!(mid, addr("1").vertex_ids()[0]);
        assert_eq!(mid.level(), 1);
        assert_eq!(mid.address().unwrap(), "0:1");
        assert_eq!(Vertex::parse_address("1:0").unwrap(), mid);
        // (3,3)/8 lies inside the removed central triangle
        assert!(!Vertex::new(3, 3, 3).is_construction_vertex());
    }

    proptest! {
        #[test]
        fn children_nest_and_halve(d in proptest::collection::vec(0u8..3, 0..12)) {
            let t = TriangleAddress::from_digits(d).unwrap();
            let pv = t.vertex_ids();
            let side = t.side();
            for (c, child) in t.children().iter().enumerate() {
                let cv = child.vertices();
                let half = side.half() * side.half();
                prop_assert_eq!(cv[0].dist_sq(&cv[1]), half);
                prop_assert_eq!(cv[1].dist_sq(&cv[2]), half);
                prop_assert_eq!(cv[0].dist_sq(&cv[2]), half);
                // child c sits at parent vertex c
                prop_assert_eq!(child.vertex_ids()[c], pv[c]);
            }
        }
    }
}
