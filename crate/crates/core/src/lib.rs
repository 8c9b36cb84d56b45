//! Level sets of Hölder functions on fractals.
//!
//! The crate is organised around five subsystems:
//!
//! * [`geometry`]: exact Sierpiński-triangle geometry (addresses, lattice
//!   vertices, the boundary families used for sub-self-similar sets, the
//!   rescaled copy `Δ*` and its triangular lattice).
//! * [`holder`]: piecewise affine functions, Hölder certificates, the
//!   Bernoulli-measure witness and grafting.
//! * [`levelset`]: level-set approximations, extreme labelings, conductivity
//!   and the conductivity-proportional mass distribution.
//! * [`bounds`]: closed-form dimension bounds, parameter feasibility and
//!   box-count estimation.
//! * [`cantor`]: separated structures, the fat Cantor set and the
//!   phase-transition constructions on its square.

pub mod bounds;
pub mod cantor;
mod error;
pub mod geometry;
pub mod holder;
pub mod levelset;
pub mod rational;

pub use error::{Error, Result};
pub use geometry::{CoordQ3, Point2, SkewPoint, StarPoint, TriangleAddress, Vertex};
pub use holder::{BernoulliWitnessFn, GraftedFn, HolderCertificate, HolderParams, PiecewiseAffineFn, VertexFunction};
pub use levelset::{ApproxLevelSet, ExtremeLabeling, LevelSetTree, LevelValue};

pub use num_rational::BigRational;
