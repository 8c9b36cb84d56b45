//! Exact geometry of the Sierpiński triangle `Δ` with unit side.
//!
//! Every triangle of the construction is an upward triangle of the dyadic
//! triangular lattice spanned by `e1 = (1, 0)` and `e2 = (1/2, √3/2)`. A
//! level-`n` triangle is identified either by its [`TriangleAddress`] (a word
//! over `{0,1,2}`) or by its lower-left lattice corner `(i, j) / 2^n`; the two
//! are related bitwise: digit `1` sets a bit of `i`, digit `2` a bit of `j`.
//!
//! Child `d` of a triangle sits at the parent's vertex `v_{d+1}`, and children
//! keep the parent's vertex order `(v1, v2, v3) = (corner, corner + e1,
//! corner + e2)`. Every other module relies on this labeling.

mod address;
mod coord;
mod family;
mod star;

pub use address::{TriangleAddress, Vertex};
pub use coord::{CoordQ3, Point2, SkewPoint};
pub use address::MAX_LEVEL;
pub use family::{boundary_family, corner_word, tau_l, triangle_corners, vertex_set, BoundaryFamilyL};
pub use star::{
    lattice_count, lattice_count_log2, lattice_hits, psi, HorizontalLevel, LatticeHits, LatticeTriangle,
    Orientation, Similarity, StarPoint,
};
