mod iso;
mod systems;
mod transformation;

pub use iso::{iso_from_block_map, iso_from_permutation, MeasureAlgebraIso, MAX_ISO_DEPTH};
pub use systems::{
    check_conjugacy, check_iso_of_systems, check_measure_preserving, point_map_from_iso, MAX_DYNAMICS_DEPTH,
};
pub use transformation::{TransformKind, TransformSpec, Transformation};
