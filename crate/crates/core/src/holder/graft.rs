use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::bernoulli::BernoulliWitnessFn;
use super::paf::{locate, PiecewiseAffineFn, VertexFunction};
use crate::geometry::{psi, Similarity, SkewPoint, TriangleAddress, Vertex};
use crate::rational::ratio_to_f64;
use crate::{Error, Result};

/// Smallest `n'` with `M · 2^{-n'(1-α)} < 1/100`.
pub fn graft_threshold(lipschitz: f64, alpha: f64) -> Result<u32> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "grafting needs 0 < α < 1"));
    }
    if !(lipschitz >= 0.0) || !lipschitz.is_finite() {
        return Err(Error::param("M", "must be a finite non-negative number"));
    }
    (0..10_000u32)
        .find(|&n| lipschitz * 2f64.powf(-(n as f64) * (1.0 - alpha)) < 0.01)
        .ok_or_else(|| Error::param("M", "threshold exceeds 10000 levels"))
}

/// Labels `(v1, v2, v3)` of a triangle for grafting: `v1`, `v2` carry the
/// first repeated value (pairs tried in the order 12, 13, 23).
pub(crate) fn graft_labels(t: &TriangleAddress, v: &[BigRational; 3]) -> Result<[usize; 3]> {
    if v[0] == v[1] {
        Ok([0, 1, 2])
    } else if v[0] == v[2] {
        Ok([0, 2, 1])
    } else if v[1] == v[2] {
        Ok([1, 2, 0])
    } else {
        Err(Error::NotStandard { address: t.clone() })
    }
}

/// `f(x) = φ(Ψ_T(x)) (g(v3) - g(v1)) + g(v1)` on each `T ∈ τ_{n'}`.
#[derive(Clone, Debug)]
pub struct GraftedFn {
    base: PiecewiseAffineFn,
    witness: BernoulliWitnessFn,
    lipschitz: f64,
    threshold: u32,
}

/// Summary of the per-triangle Hölder bound of a graft.
#[derive(Clone, Debug, Serialize)]
pub struct GraftReport {
    pub level: u32,
    pub threshold: u32,
    pub lipschitz: f64,
    pub max_oscillation: f64,
    /// `3 (2/√3)^α 2^{n'α} max_T |g(v3) - g(v1)|`.
    pub per_triangle_constant: f64,
    /// `3 (2/√3)^α M 2^{-n'(1-α)}`.
    pub lipschitz_constant_bound: f64,
}

/// Grafts the witness onto a standard function at its own level `n'`.
///
/// `lipschitz` defaults to the Lipschitz constant of the coarse function
/// when `g` is a lazy standardization, and of `g` itself otherwise.
pub fn graft(g: &PiecewiseAffineFn, witness: BernoulliWitnessFn, lipschitz: Option<f64>) -> Result<GraftedFn> {
    g.check_standard()?;
    let m = match lipschitz {
        Some(m) => m,
        None => match g.coarse() {
            Some(c) => c.lipschitz()?,
            None => g.lipschitz()?,
        },
    };
    let threshold = graft_threshold(m, witness.alpha)?;
    if g.level() < threshold {
        return Err(Error::GraftLevelTooSmall { given: g.level(), threshold });
    }
    Ok(GraftedFn { base: g.clone(), witness, lipschitz: m, threshold })
}

impl GraftedFn {
    pub fn base(&self) -> &PiecewiseAffineFn {
        &self.base
    }

    pub fn witness(&self) -> &BernoulliWitnessFn {
        &self.witness
    }

    pub fn level(&self) -> u32 {
        self.base.level()
    }

    /// The labeled similarity `Ψ_T` of a level-`n'` triangle.
    pub fn psi_for(&self, t: &TriangleAddress) -> Result<Similarity> {
        let v = self.base.triangle_values(t)?;
        psi(t, graft_labels(t, &v)?)
    }

    pub fn eval_skew(&self, p: &SkewPoint) -> Result<f64> {
        let (t, _, _) = locate(p, self.level())?;
        let v = self.base.triangle_values(&t)?;
        let labels = graft_labels(&t, &v)?;
        let star = psi(&t, labels)?.apply(p);
        let g1 = &v[labels[0]];
        let g3 = &v[labels[2]];
        Ok(ratio_to_f64(g1) + self.witness.phi(&star) * ratio_to_f64(&(g3 - g1)))
    }

    /// Exact value where `Ψ_T(x)` has height `0` or `1`, which includes every
    /// point of `V_{n'}`.
    pub fn eval_exact(&self, p: &SkewPoint) -> Result<Option<BigRational>> {
        let (t, _, _) = locate(p, self.level())?;
        let v = self.base.triangle_values(&t)?;
        let labels = graft_labels(&t, &v)?;
        let star = psi(&t, labels)?.apply(p);
        let g1 = v[labels[0]].clone();
        let g3 = v[labels[2]].clone();
        Ok(if star.y.is_zero() {
            Some(g1)
        } else if star.y == BigRational::one() {
            Some(g3)
        } else {
            None
        })
    }

    pub fn vertex_value(&self, v: &Vertex) -> Result<BigRational> {
        self.eval_exact(&v.skew())?.ok_or_else(|| Error::InvariantViolation(format!("vertex {v:?} not at height 0 or 1")))
    }

    pub fn report(&self) -> Result<GraftReport> {
        let a = self.witness.alpha;
        let n = self.level() as f64;
        let osc = ratio_to_f64(&self.base.max_oscillation()?);
        let k = 3.0 * (2.0 / 3f64.sqrt()).powf(a);
        Ok(GraftReport {
            level: self.level(),
            threshold: self.threshold,
            lipschitz: self.lipschitz,
            max_oscillation: osc,
            per_triangle_constant: k * 2f64.powf(n * a) * osc,
            lipschitz_constant_bound: k * self.lipschitz * 2f64.powf(-n * (1.0 - a)),
        })
    }
}
