use thiserror::Error;

use crate::geometry::{TriangleAddress, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid address digit {0}; addresses are words over {{0,1,2}}")]
    InvalidDigit(char),

    #[error("point is outside the level-{level} construction")]
    OutsideConstruction { level: u32 },

    #[error("point has no exact lattice coordinates")]
    UnsupportedPoint,

    #[error("vertex {0:?} has no value at this level")]
    MissingVertex(Vertex),

    #[error("level value coincides with f({vertex})")]
    LevelCollision { vertex: String },

    #[error("label assignment {0:?} is not a permutation of the triangle's vertices")]
    DegenerateLabels([usize; 3]),

    #[error("triangle {address:?} has no pair of equal vertex values")]
    NotStandard { address: TriangleAddress },

    #[error("refinement level {given} is below the grafting threshold {threshold}")]
    GraftLevelTooSmall { given: u32, threshold: u32 },

    #[error("{address:?} is not an l,r-descendant of the root")]
    NotADescendant { address: TriangleAddress },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("resampling cap of {attempts} exceeded: {reason}")]
    ResamplingCap { attempts: u32, reason: String },

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
