use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geometry::{triangle_corners, Point2, SkewPoint, TriangleAddress, Vertex, MAX_LEVEL};
use crate::rational::{format_ratio, parse_ratio, ratio_to_f64};
use crate::{Error, Result};

/// A function known exactly on the vertices of the construction and affine
/// on every triangle of one fixed level.
pub trait VertexFunction: Sync {
    /// Level at which the function is affine on each triangle.
    fn level(&self) -> u32;

    /// Value at a vertex of `V_level` (vertices of lower levels included).
    fn vertex_value(&self, v: &Vertex) -> Result<BigRational>;

    /// Values at `(v1, v2, v3)` of any construction triangle. Triangles
    /// deeper than [`level`](Self::level) are interpolated inside their
    /// level-`level` ancestor.
    fn triangle_values(&self, t: &TriangleAddress) -> Result<[BigRational; 3]> {
        let n = self.level();
        if t.level() <= n {
            let [a, b, c] = t.vertex_ids();
            return Ok([self.vertex_value(&a)?, self.vertex_value(&b)?, self.vertex_value(&c)?]);
        }
        let anc = t.prefix(n as usize);
        let fv = self.triangle_values(&anc)?;
        let m = t.level();
        Ok(t.vertex_ids().map(|v| interpolate(&anc, &fv, &v, m)))
    }
}

/// Barycentric interpolation of the values `fv` of `anc` at a vertex of a
/// deeper level `m` lying in `anc`.
pub(crate) fn interpolate(anc: &TriangleAddress, fv: &[BigRational; 3], v: &Vertex, m: u32) -> BigRational {
    let shift = m - anc.level();
    let (ci, cj) = anc.corner();
    let (vi, vj) = v.at_level(m);
    let a = BigInt::from(vi - (ci << shift));
    let b = BigInt::from(vj - (cj << shift));
    let d = BigInt::one() << shift as usize;
    let w1 = &d - &a - &b;
    (&fv[0] * BigRational::from_integer(w1) + &fv[1] * BigRational::from_integer(a) + &fv[2] * BigRational::from_integer(b))
        / BigRational::from_integer(d)
}

#[derive(Clone, Debug)]
enum Repr {
    Table(HashMap<Vertex, BigRational>),
    /// The standardization of `coarse` viewed at level `level - 1`.
    StandardRefinement(Box<PiecewiseAffineFn>),
}

/// Piecewise affine function at level `n`: values on `V_n`, affine on each
/// `T ∈ τ_n`.
#[derive(Clone, Debug)]
pub struct PiecewiseAffineFn {
    level: u32,
    repr: Repr,
    standard: bool,
}

/// JSON form: `{level, entries: [[vertex address, "num/den"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PafJson {
    pub level: u32,
    pub entries: Vec<(String, String)>,
}

impl PiecewiseAffineFn {
    /// The affine function on `Δ₀` with the given values at `v1, v2, v3`.
    pub fn affine(values: [BigRational; 3]) -> Self {
        let vs = TriangleAddress::root().vertex_ids();
        let table = vs.into_iter().zip(values).collect();
        Self::from_table_unchecked(0, table)
    }

    pub fn constant(value: BigRational) -> Self {
        Self::affine([value.clone(), value.clone(), value])
    }

    /// Tabulates `f` on `V_level`.
    pub fn from_vertex_fn(level: u32, f: impl Fn(&Vertex) -> BigRational) -> Result<Self> {
        check_level(level)?;
        let table = all_vertices(level).into_iter().map(|v| {
            let val = f(&v);
            (v, val)
        });
        Ok(Self::from_table_unchecked(level, table.collect()))
    }

    /// Builds a function from a table that must cover `V_level` exactly.
    pub fn from_table(level: u32, table: HashMap<Vertex, BigRational>) -> Result<Self> {
        check_level(level)?;
        let needed = all_vertices(level);
        if let Some(v) = needed.iter().find(|v| !table.contains_key(v)) {
            return Err(Error::MissingVertex(*v));
        }
        if table.len() != needed.len() {
            return Err(Error::param("table", "contains points that are not vertices of V_level"));
        }
        Ok(Self::from_table_unchecked(level, table))
    }

    fn from_table_unchecked(level: u32, table: HashMap<Vertex, BigRational>) -> Self {
        let mut f = PiecewiseAffineFn { level, repr: Repr::Table(table), standard: false };
        f.standard = f.check_standard().is_ok();
        f
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// Returns the first triangle of `τ_level` without a repeated value.
    pub fn check_standard(&self) -> Result<()> {
        if matches!(self.repr, Repr::StandardRefinement(_)) {
            return Ok(());
        }
        for (i, j) in triangle_corners(self.level) {
            let t = TriangleAddress::from_corner(i, j, self.level)?;
            let [a, b, c] = self.triangle_values(&t)?;
            if a != b && a != c && b != c {
                return Err(Error::NotStandard { address: t });
            }
        }
        Ok(())
    }

    /// True when no triangle of `τ_level` has three equal values.
    pub fn is_locally_nonconstant(&self) -> Result<bool> {
        for (i, j) in triangle_corners(self.level) {
            let t = TriangleAddress::from_corner(i, j, self.level)?;
            let [a, b, c] = self.triangle_values(&t)?;
            if a == b && b == c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same function tabulated at a finer level.
    pub fn refine(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::param("level", "refinement cannot lower the level"));
        }
        check_level(level)?;
        let mut table = HashMap::new();
        for (i, j) in triangle_corners(level) {
            let t = TriangleAddress::from_corner(i, j, level)?;
            let vals = self.triangle_values(&t)?;
            for (v, val) in t.vertex_ids().into_iter().zip(vals) {
                table.entry(v).or_insert(val);
            }
        }
        Ok(Self::from_table_unchecked(level, table))
    }

    /// One-step standardization: level `n → n + 1`, keeping `V_n` values and
    /// copying `f(v1), f(v2), f(v3)` onto the midpoints of `v1v2`, `v2v3`,
    /// `v1v3` respectively.
    pub fn standardize(&self) -> Result<Self> {
        let lazy = self.standardize_at(self.level + 1)?;
        let table = all_vertices(lazy.level).into_iter().map(|v| lazy.vertex_value(&v).map(|x| (v, x)));
        let table = table.collect::<Result<HashMap<_, _>>>()?;
        let out = Self::from_table_unchecked(lazy.level, table);
        debug_assert!(out.standard);
        Ok(out)
    }

    /// Standardization of `self` refined to level `n' - 1`, as a function at
    /// level `n'`. Values are computed on demand, so large `n'` is cheap.
    pub fn standardize_at(&self, level: u32) -> Result<Self> {
        if level <= self.level {
            return Err(Error::param("level", "standardized level must exceed the base level"));
        }
        check_level(level)?;
        Ok(PiecewiseAffineFn { level, repr: Repr::StandardRefinement(Box::new(self.clone())), standard: true })
    }

    /// The coarse function under a lazy standardization, if any.
    pub fn coarse(&self) -> Option<&PiecewiseAffineFn> {
        match &self.repr {
            Repr::StandardRefinement(c) => Some(c),
            Repr::Table(_) => None,
        }
    }

    /// Vertex table sorted by vertex (materialized for lazy functions).
    pub fn entries(&self) -> Result<Vec<(Vertex, BigRational)>> {
        let mut out = match &self.repr {
            Repr::Table(t) => t.iter().map(|(v, x)| (*v, x.clone())).collect::<Vec<_>>(),
            Repr::StandardRefinement(_) => all_vertices(self.level)
                .into_iter()
                .map(|v| self.vertex_value(&v).map(|x| (v, x)))
                .collect::<Result<Vec<_>>>()?,
        };
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Exact value at a point of the construction, given in lattice
    /// coordinates.
    pub fn eval_skew(&self, p: &SkewPoint) -> Result<BigRational> {
        let (t, a, b) = locate(p, self.level)?;
        let fv = self.triangle_values(&t)?;
        let w1 = BigRational::one() - &a - &b;
        Ok(&fv[0] * w1 + &fv[1] * a + &fv[2] * b)
    }

    /// Exact value at a planar point.
    pub fn eval(&self, x: &Point2) -> Result<BigRational> {
        self.eval_skew(&x.to_skew()?)
    }

    /// Largest difference of vertex values within one triangle of `τ_level`.
    pub fn max_oscillation(&self) -> Result<BigRational> {
        match &self.repr {
            Repr::StandardRefinement(c) => {
                let shift = self.level - 1 - c.level;
                Ok(c.max_oscillation()? / BigRational::from_integer(BigInt::one() << shift as usize))
            }
            Repr::Table(_) => {
                let mut best = BigRational::zero();
                for (i, j) in triangle_corners(self.level) {
                    let t = TriangleAddress::from_corner(i, j, self.level)?;
                    let osc = oscillation(&self.triangle_values(&t)?);
                    if osc > best {
                        best = osc;
                    }
                }
                Ok(best)
            }
        }
    }

    /// Lipschitz constant: the largest gradient norm over the affine pieces.
    pub fn lipschitz(&self) -> Result<f64> {
        match &self.repr {
            // Children of a level-(n'-1) triangle with side h carry gradient
            // (2/√3)·|f(vi) - f(vj)|/(h/2) for the copied pair.
            Repr::StandardRefinement(c) => {
                let osc = ratio_to_f64(&c.max_oscillation()?);
                Ok(4.0 / 3f64.sqrt() * osc * 2f64.powi(c.level as i32))
            }
            Repr::Table(_) => {
                let mut best = BigRational::zero();
                for (i, j) in triangle_corners(self.level) {
                    let t = TriangleAddress::from_corner(i, j, self.level)?;
                    let g = gradient_sq(&self.triangle_values(&t)?, self.level);
                    if g > best {
                        best = g;
                    }
                }
                Ok(ratio_to_f64(&best).sqrt())
            }
        }
    }

    pub fn to_json(&self) -> Result<PafJson> {
        let entries = self
            .entries()?
            .into_iter()
            .map(|(v, x)| (v.address().expect("table holds construction vertices"), format_ratio(&x)))
            .collect();
        Ok(PafJson { level: self.level, entries })
    }

    pub fn from_json(js: &PafJson) -> Result<Self> {
        let mut table = HashMap::new();
        for (addr, val) in &js.entries {
            table.insert(Vertex::parse_address(addr)?, parse_ratio(val)?);
        }
        Self::from_table(js.level, table)
    }
}

impl VertexFunction for PiecewiseAffineFn {
    fn level(&self) -> u32 {
        self.level
    }

    fn vertex_value(&self, v: &Vertex) -> Result<BigRational> {
        if v.level() > self.level {
            return Err(Error::MissingVertex(*v));
        }
        match &self.repr {
            Repr::Table(t) => t.get(v).cloned().ok_or(Error::MissingVertex(*v)),
            Repr::StandardRefinement(coarse) => {
                if v.level() < self.level {
                    return coarse_value(coarse, v);
                }
                // A new vertex is the midpoint of one edge of a unique
                // level-(n'-1) triangle.
                let (t, corner) = v.incident().into_iter().next().ok_or(Error::MissingVertex(*v))?;
                let parent = t.parent().expect("vertex of positive level");
                let digit = t.digits()[t.digits().len() - 1];
                // child d, corner c: midpoint of edge (d, c) of the parent
                let source = match (digit, corner) {
                    (0, 1) | (1, 0) => 0, // v4 = mid(v1 v2) ← f(v1)
                    (1, 2) | (2, 1) => 1, // v5 = mid(v2 v3) ← f(v2)
                    (0, 2) | (2, 0) => 2, // v6 = mid(v1 v3) ← f(v3)
                    _ => unreachable!("a level-n' vertex is never a corner of its own parent"),
                };
                let pv = parent.vertex_ids()[source];
                coarse_value(coarse, &pv)
            }
        }
    }
}

fn coarse_value(coarse: &PiecewiseAffineFn, v: &Vertex) -> Result<BigRational> {
    if v.level() <= coarse.level {
        return coarse.vertex_value(v);
    }
    let (t, _) = v.incident().into_iter().next().ok_or(Error::MissingVertex(*v))?;
    let anc = t.prefix(coarse.level as usize);
    let fv = coarse.triangle_values(&anc)?;
    Ok(interpolate(&anc, &fv, v, v.level()))
}

fn check_level(level: u32) -> Result<()> {
    if level > 14 {
        return Err(Error::param("level", format!("tabulating V_{level} is not supported (limit 14)")));
    }
    debug_assert!(level <= MAX_LEVEL);
    Ok(())
}

fn all_vertices(level: u32) -> Vec<Vertex> {
    crate::geometry::vertex_set(level)
}

pub(crate) fn oscillation(v: &[BigRational; 3]) -> BigRational {
    let hi = v.iter().max().expect("three values");
    let lo = v.iter().min().expect("three values");
    hi - lo
}

/// Squared gradient norm of the affine function with values `v` on a
/// level-`n` triangle: `(4/3)(a² - ab + b²)` with `a`, `b` the slopes along
/// `v1v2` and `v1v3`.
pub(crate) fn gradient_sq(v: &[BigRational; 3], n: u32) -> BigRational {
    let a = &v[1] - &v[0];
    let b = &v[2] - &v[0];
    let q = &a * &a - &a * &b + &b * &b;
    q * BigRational::new(BigInt::from(4) << (2 * n as usize), 3.into())
}

/// Finds a level-`n` construction triangle containing `p` and the local
/// barycentric weights `(a, b)` of `v2` and `v3`.
pub(crate) fn locate(p: &SkewPoint, n: u32) -> Result<(TriangleAddress, BigRational, BigRational)> {
    if p.s.is_negative() || p.t.is_negative() {
        return Err(Error::OutsideConstruction { level: n });
    }
    let scale = BigRational::from_integer(BigInt::one() << n as usize);
    let s = &p.s * &scale;
    let t = &p.t * &scale;
    let fs = s.numer().div_floor(s.denom());
    let ft = t.numer().div_floor(t.denom());
    for di in [0i64, 1] {
        for dj in [0i64, 1] {
            let ci = &fs - di;
            let cj = &ft - dj;
            if ci.is_negative() || cj.is_negative() {
                continue;
            }
            let a = &s - BigRational::from_integer(ci.clone());
            let b = &t - BigRational::from_integer(cj.clone());
            if a.is_negative() || b.is_negative() || &a + &b > BigRational::one() {
                continue;
            }
            let (Ok(ci), Ok(cj)) = (u64::try_from(&ci), u64::try_from(&cj)) else { continue };
            if let Ok(tri) = TriangleAddress::from_corner(ci, cj, n) {
                return Ok((tri, a, b));
            }
        }
    }
    Err(Error::OutsideConstruction { level: n })
}
