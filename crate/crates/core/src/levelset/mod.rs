//! Level-set approximations `G_n^l(r)` on `Δ^l`, extreme labelings,
//! conductivity, its weak conservation, the conductivity-proportional mass
//! distribution and the census of well-conducting triangles.

mod census;
mod labeling;
mod tree;

pub use census::{binomial_bound, census_constant, census_constant_relaxed, well_conducting_census, CensusReport, D1};
pub use labeling::{extreme_labeling, ExtremeLabeling};
pub use tree::{
    approx_level_set, conductivity, conductivity_measure, conservation_check, ApproxLevelSet, ConservationResult,
    ConservationSummary, LevelSetTree, LevelSummary, LevelValue, MeasureSummary, Member,
};
