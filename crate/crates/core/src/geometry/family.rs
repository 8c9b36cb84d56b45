use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::address::{TriangleAddress, Vertex, MAX_LEVEL};
use crate::{Error, Result};

/// Level-`l` triangles with an edge on the boundary of `Δ₀`; their similarity
/// maps generate the sub-self-similar set `Δ^l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryFamilyL {
    pub l: u32,
    pub addresses: Vec<TriangleAddress>,
}

impl BoundaryFamilyL {
    pub fn len(&self) -> usize {
        self.addresses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty()
    }

    /// Index of the corner word `c^l` (the family member at vertex `c` of `Δ₀`).
    pub fn corner_index(&self, c: u8) -> usize {
        let w = corner_word(c, self.l);
        self.addresses.binary_search(&w).expect("corner word belongs to every boundary family")
    }
}

/// Builds the boundary family for `l >= 1`, sorted by address.
pub fn boundary_family(l: u32) -> Result<BoundaryFamilyL> {
    if l == 0 {
        return Err(Error::param("l", "must be at least 1"));
    }
    if l > 20 {
        return Err(Error::param("l", "families beyond l = 20 are not materialized"));
    }
    let top = (1u64 << l) - 1;
    let mut addresses: Vec<TriangleAddress> = (0..=top)
        .flat_map(|i| (0..=top - i).map(move |j| (i, j)))
        .filter(|&(i, j)| i & j == 0 && (j == 0 || i == 0 || i + j == top))
        .map(|(i, j)| TriangleAddress::from_corner(i, j, l).expect("valid corner"))
        .collect();
    addresses.sort();
    Ok(BoundaryFamilyL { l, addresses })
}

/// The word `c c … c` of length `l`.
pub fn corner_word(c: u8, l: u32) -> TriangleAddress {
    TriangleAddress::from_digits(vec![c; l as usize]).expect("corner digit in range")
}

/// All `n`-fold concatenations of boundary-family words, sorted.
pub fn tau_l(n: u32, l: u32) -> Result<Vec<TriangleAddress>> {
    let fam = boundary_family(l)?;
    if (n * l) > MAX_LEVEL {
        return Err(Error::param("n", "n·l exceeds the supported depth"));
    }
    let total = (fam.len() as f64).powi(n as i32);
    if total > 5e7 {
        return Err(Error::param("n", format!("τ_n^l would hold {total:.0} triangles")));
    }
    let mut level = vec![TriangleAddress::root()];
    for _ in 0..n {
        level = level
            .par_iter()
            .flat_map_iter(|t| fam.addresses.iter().map(move |w| t.concat(w.digits())))
            .collect();
    }
    level.sort();
    Ok(level)
}

/// Lower-left corners `(i, j)` of all level-`n` construction triangles, in
/// address order.
pub fn triangle_corners(n: u32) -> Vec<(u64, u64)> {
    let mut level = vec![(0u64, 0u64)];
    for _ in 0..n {
        level = level.iter().flat_map(|&(i, j)| [(2 * i, 2 * j), (2 * i + 1, 2 * j), (2 * i, 2 * j + 1)]).collect();
    }
    level
}

/// The vertex set `V_n`, sorted.
pub fn vertex_set(n: u32) -> Vec<Vertex> {
    let set: BTreeSet<Vertex> = triangle_corners(n)
        .into_iter()
        .flat_map(|(i, j)| [Vertex::new(i, j, n), Vertex::new(i + 1, j, n), Vertex::new(i, j + 1, n)])
        .collect();
    set.into_iter().collect()
}
