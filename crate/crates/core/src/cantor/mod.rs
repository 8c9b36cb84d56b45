//! The fat Cantor set `C`, separated structures and the phase-transition
//! constructions on `C × C`.

mod capacity;
mod fat;
mod feasibility;
mod phase;
mod structure;

pub use capacity::{capacity_gap, CapacityGap};
pub use fat::{interval_length, removal_length, FatCantorSet};
pub use feasibility::{feasibility_search, piecewise_constant_feasibility, FeasibilityReport, FeasibilityRow, Phase};
pub use phase::{phase_perturbation, GridCertificate, PhaseReport, PhaseTransitionConfig};
pub use structure::{
    ifs_separated_structure, product_separated_structure, Cylinder, IfsMap, SeparatedStructure, StructureLevel,
};
