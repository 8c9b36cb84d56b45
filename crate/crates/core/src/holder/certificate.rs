use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::paf::VertexFunction;
use crate::geometry::{triangle_corners, TriangleAddress, Vertex};
use crate::rational::ratio_to_f64;
use crate::{Error, Result};

/// Values of a function on `V_m`, with lattice coordinates at level `m`.
#[derive(Clone, Debug)]
pub struct VertexSample {
    pub level: u32,
    pub vertices: Vec<Vertex>,
    pub coords: Vec<(i64, i64)>,
    pub values: Vec<f64>,
}

/// Tabulates `f` on `V_m` (interpolating below the function's own level).
pub fn vertex_table(f: &(impl VertexFunction + ?Sized), m: u32) -> Result<VertexSample> {
    if m > 12 {
        return Err(Error::param("depth", "vertex tables are limited to depth 12"));
    }
    let mut seen: HashMap<Vertex, f64> = HashMap::new();
    for (i, j) in triangle_corners(m) {
        let t = TriangleAddress::from_corner(i, j, m)?;
        if t.vertex_ids().iter().all(|v| seen.contains_key(v)) {
            continue;
        }
        let vals = f.triangle_values(&t)?;
        for (v, x) in t.vertex_ids().into_iter().zip(vals) {
            seen.entry(v).or_insert_with(|| ratio_to_f64(&x));
        }
    }
    let mut rows: Vec<(Vertex, f64)> = seen.into_iter().collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let coords = rows
        .iter()
        .map(|(v, _)| {
            let (i, j) = v.at_level(m);
            (i as i64, j as i64)
        })
        .collect();
    let values = rows.iter().map(|r| r.1).collect();
    Ok(VertexSample { level: m, vertices: rows.into_iter().map(|r| r.0).collect(), coords, values })
}

/// Outcome of an exhaustive Hölder check over all pairs of `V_m`.
#[derive(Clone, Debug, Serialize)]
pub struct HolderCertificate {
    pub alpha: f64,
    pub c: f64,
    pub depth: u32,
    pub pairs: u64,
    pub max_ratio: f64,
    /// Vertex addresses realizing `max_ratio`, when some pair differs.
    pub witness_pair: Option<(String, String)>,
    /// Factor `(4/√3)^α` relating the vertex maximum to the supremum over
    /// `Δ` for piecewise affine functions at level `depth - 2`.
    pub safety_factor: f64,
    pub passes: bool,
}

/// Maximum of `|f(x) - f(y)| / |x - y|^α` over distinct `x, y ∈ V_m`.
pub fn holder_certificate(f: &(impl VertexFunction + ?Sized), alpha: f64, c: f64, m: u32) -> Result<HolderCertificate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    if m < f.level() {
        return Err(Error::param("depth", "must be at least the level of the function"));
    }
    let sample = vertex_table(f, m)?;
    Ok(certify_sample(&sample, alpha, c))
}

pub(crate) fn certify_sample(sample: &VertexSample, alpha: f64, c: f64) -> HolderCertificate {
    let m = sample.level;
    let n = sample.values.len();
    let unit = 4f64.powi(m as i32);
    // d^α depends only on the integer d²·4^m; tabulate it when small.
    let max_key = 1usize << (2 * m);
    let table: Option<Vec<f64>> = (m <= 10).then(|| (0..=max_key).map(|k| (k as f64 / unit).powf(alpha / 2.0)).collect());
    let dist_pow = |k: i64| match &table {
        Some(t) => t[k as usize],
        None => (k as f64 / unit).powf(alpha / 2.0),
    };
    let best = (0..n)
        .into_par_iter()
        .map(|a| {
            let (ia, ja) = sample.coords[a];
            let fa = sample.values[a];
            let mut local = (0.0f64, usize::MAX, usize::MAX);
            for b in a + 1..n {
                let df = (fa - sample.values[b]).abs();
                if df == 0.0 {
                    continue;
                }
                let (ib, jb) = sample.coords[b];
                let (di, dj) = (ia - ib, ja - jb);
                let ratio = df / dist_pow(di * di + di * dj + dj * dj);
                if ratio > local.0 {
                    local = (ratio, a, b);
                }
            }
            local
        })
        .reduce(
            || (0.0, usize::MAX, usize::MAX),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                    y
                } else {
                    x
                }
            },
        );
    let witness_pair = (best.1 != usize::MAX).then(|| {
        let name = |k: usize| sample.vertices[k].address().unwrap_or_default();
        (name(best.1), name(best.2))
    });
    HolderCertificate {
        alpha,
        c,
        depth: m,
        pairs: (n as u64) * (n as u64).saturating_sub(1) / 2,
        max_ratio: best.0,
        witness_pair,
        safety_factor: (4.0 / 3f64.sqrt()).powf(alpha),
        passes: best.0 <= c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holder::PiecewiseAffineFn;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn constant_has_zero_ratio() {
        let f = PiecewiseAffineFn::constant(q(2, 1));
        let cert = holder_certificate(&f, 0.5, 1.0, 3).unwrap();
        assert_eq!(cert.max_ratio, 0.0);
        assert!(cert.witness_pair.is_none());
        assert!(cert.passes);
    }

    #[test]
    fn apex_function_ratio_approaches_gradient() {
        // Brute-force oracle over V_6 pairs: the Lipschitz ratio of the
        // affine function with values (0,0,1) is bounded by its gradient
        // 2/√3 and attained along the altitude.
        let f = PiecewiseAffineFn::affine([q(0, 1), q(0, 1), q(1, 1)]);
        let s = vertex_table(&f, 6).unwrap();
        let mut oracle: f64 = 0.0;
        for a in 0..s.values.len() {
            for b in 0..a {
                let p = s.vertices[a].skew().to_f64();
                let r = s.vertices[b].skew().to_f64();
                let d = ((p.0 - r.0).powi(2) + (p.1 - r.1).powi(2)).sqrt();
                oracle = oracle.max((s.values[a] - s.values[b]).abs() / d);
            }
        }
        let cert = holder_certificate(&f, 1.0, 2.0, 6).unwrap();
        assert!((cert.max_ratio - oracle).abs() < 1e-12);
        let grad = 2.0 / 3f64.sqrt();
        assert!(cert.max_ratio <= grad + 1e-12);
        assert!(cert.max_ratio > 0.99 * grad);
        let coarse = holder_certificate(&f, 1.0, 2.0, 2).unwrap().max_ratio;
        assert!(coarse <= cert.max_ratio + 1e-15);
    }

    #[test]
    fn depth_below_level_rejected() {
        let f = PiecewiseAffineFn::constant(q(0, 1)).refine(3).unwrap();
        assert!(holder_certificate(&f, 0.5, 1.0, 2).is_err());
    }
}
