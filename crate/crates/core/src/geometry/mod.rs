//! Point sets in ℝᵈ (d ≤ 3), their generators, and the discreteness and
//! denseness predicates.

mod index;
mod meyer;
mod point;
mod pointset;
mod predicates;
mod vanhove;

pub(crate) use index::{merge_points, MergeIndex};
pub use meyer::{meyer_check, meyer_check_generator, MeyerOptions, MeyerReport, ScaleEvidence, Trend};
pub use point::{Cuboid, Interval, Point, MAX_DIM};
pub use pointset::{
    compose, generate_lattice, generate_model_set, golden_ratio, merge_tolerance, Compose, Generator, PointSet,
    MERGE_FACTOR,
};
pub(crate) use pointset::basis_matrix;
pub(crate) use predicates::max_box_mass;
pub use predicates::{
    covering_grid_spacing, covering_radius, difference_set, difference_set_with_budget, min_gap, weak_ud_count,
    DEFAULT_PAIR_BUDGET,
};
pub use vanhove::{boundary_ratio, van_hove_ratio, VanHoveFamily};
