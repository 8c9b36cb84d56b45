//! Hölder functions on `Δ`: piecewise affine functions, their certificates,
//! the Bernoulli-measure witness on `Δ*` and the grafted functions built
//! from both.

mod bernoulli;
mod certificate;
mod graft;
mod paf;
mod random;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use bernoulli::{
    bernoulli_cdf, bernoulli_cdf_exact, bernoulli_interval, bernoulli_interval_exact, lambda_p_interval,
    lambda_p_interval_exact,
    BernoulliWitnessFn, Dyadic,
};
pub use certificate::{holder_certificate, vertex_table, HolderCertificate, VertexSample};
pub use graft::{graft, graft_threshold, GraftedFn};
pub use paf::{PafJson, PiecewiseAffineFn, VertexFunction};
pub use random::{random_standard_paf, RandomPafOptions};

/// Exponent, Hölder constant and optional Lipschitz constant of a function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    pub alpha: f64,
    pub c: f64,
    #[serde(rename = "M")]
    pub lipschitz: Option<f64>,
}

impl HolderParams {
    pub fn new(alpha: f64, c: f64, lipschitz: Option<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", format!("{alpha} is outside (0, 1]")));
        }
        if !(c > 0.0) {
            return Err(Error::param("c", "must be positive"));
        }
        if let Some(m) = lipschitz {
            if !(m > 0.0) {
                return Err(Error::param("M", "must be positive"));
            }
        }
        Ok(HolderParams { alpha, c, lipschitz })
    }

    /// The admissible increment `min(c·d^α, M·d)` at distance `d`.
    pub fn bound(&self, d: f64) -> f64 {
        let h = self.c * d.powf(self.alpha);
        self.lipschitz.map_or(h, |m| h.min(m * d))
    }
}
