use std::collections::HashMap;

use serde::Serialize;

use super::BoundSearchParams;
use crate::geometry::Vertex;
use crate::holder::VertexFunction;
use crate::levelset::{LevelSetTree, LevelValue};
use crate::rational::ratio_to_f64;
use crate::{Error, Result};

/// The mass check at one scale `n'`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MdpLevel {
    pub n_prime: u32,
    /// Level of the `τ^l` triangles carrying `μ`: `n' q`.
    pub depth: u32,
    /// `2^{-n' q d1}`.
    pub unit: f64,
    /// Largest `μ` of one lattice cell of side `2^{-(n'-1) q l}`.
    pub max_cell_mass: f64,
    /// Largest `μ` of the union of the cells around one lattice vertex; every
    /// set of diameter below the cell side lies in such a star.
    pub max_star_mass: f64,
    pub ratio: f64,
    pub star: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MdpReport {
    pub params: BoundSearchParams,
    /// `d1 / l`.
    pub s: f64,
    pub levels: Vec<MdpLevel>,
    /// `C` fitted on the first half of the scales.
    pub empirical_c: f64,
    /// Every later scale satisfies `μ(U) <= C 2^{-n' q d1}`.
    pub verified: bool,
    pub offending: Option<String>,
}

/// Builds `μ` to depth `n'_max q` and checks the mass-distribution estimate.
///
/// The constant `C` is not known in closed form, so it is calibrated on the
/// first `⌈n'_max/2⌉` scales and then checked on the remaining ones.
pub fn mass_distribution_lower(
    f: &(impl VertexFunction + ?Sized),
    r: &LevelValue,
    params: BoundSearchParams,
    n_prime_max: u32,
) -> Result<MdpReport> {
    if n_prime_max == 0 {
        return Err(Error::param("n_prime_max", "must be positive"));
    }
    let (q, l) = (params.q, params.l);
    let tree = LevelSetTree::build(f, r, l, n_prime_max * q)?;
    if tree.descendants(0).is_empty() {
        return Err(Error::param("r", "Δ₀ is not in G_0, so μ is undefined"));
    }
    let mut levels = Vec::new();
    for n_prime in 1..=n_prime_max {
        let depth = n_prime * q;
        let cell_level = ((n_prime - 1) * q * l) as usize;
        let mut cells: HashMap<_, f64> = HashMap::new();
        for m in tree.descendants(depth) {
            *cells.entry(m.address.prefix(cell_level)).or_default() += ratio_to_f64(&m.mu);
        }
        let mut stars: HashMap<Vertex, f64> = HashMap::new();
        for (cell, mass) in &cells {
            for v in cell.vertex_ids() {
                *stars.entry(v).or_default() += mass;
            }
        }
        let max_cell_mass = cells.values().cloned().fold(0.0, f64::max);
        let (star, max_star_mass) = stars
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(v, m)| (v.address().unwrap_or_default(), *m))
            .unwrap_or_default();
        let unit = (-(params.d1.times(depth)? as f64)).exp2();
        levels.push(MdpLevel {
            n_prime,
            depth,
            unit,
            max_cell_mass,
            max_star_mass,
            ratio: max_star_mass / unit,
            star,
        });
    }
    let calibrate = (n_prime_max as usize).div_ceil(2);
    let empirical_c = levels[..calibrate].iter().map(|x| x.ratio).fold(0.0, f64::max);
    let offending = levels[calibrate..]
        .iter()
        .find(|x| x.ratio > empirical_c * (1.0 + 1e-12))
        .map(|x| format!("n'={} star {}", x.n_prime, x.star));
    Ok(MdpReport { params, s: params.s(), levels, empirical_c, verified: offending.is_none(), offending })
}
