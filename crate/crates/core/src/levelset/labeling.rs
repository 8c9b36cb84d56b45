use num_rational::BigRational;
use serde::Serialize;

/// Ordering of the vertices of a triangle by function value.
///
/// `order = [v0, v1, v2]` holds vertex indices (`0, 1, 2` for `v1, v2, v3`
/// of the triangle) with `f(v0) <= f(v2) <= f(v1)`. Among equal minima the
/// smallest index is `v0` and only it is extreme; likewise for maxima.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremeLabeling {
    pub order: [usize; 3],
    /// Extreme vertex on the low side, absent when all values agree.
    pub low: Option<usize>,
    pub high: Option<usize>,
    pub low_tie: bool,
    pub high_tie: bool,
}

impl ExtremeLabeling {
    pub fn is_extreme(&self, vertex: usize) -> bool {
        self.low == Some(vertex) || self.high == Some(vertex)
    }

    /// True when no value differs, so the triangle never meets a level set.
    pub fn is_flat(&self) -> bool {
        self.low.is_none()
    }
}

pub fn extreme_labeling(v: &[BigRational; 3]) -> ExtremeLabeling {
    let lo = (0..3).min_by(|&a, &b| v[a].cmp(&v[b]).then(a.cmp(&b))).expect("three values");
    let hi = (0..3).max_by(|&a, &b| v[a].cmp(&v[b]).then(b.cmp(&a))).expect("three values");
    if v[lo] == v[hi] {
        return ExtremeLabeling { order: [0, 1, 2], low: None, high: None, low_tie: true, high_tie: true };
    }
    let mid = 3 - lo - hi;
    ExtremeLabeling {
        order: [lo, hi, mid],
        low: Some(lo),
        high: Some(hi),
        low_tie: v[mid] == v[lo],
        high_tie: v[mid] == v[hi],
    }
}
