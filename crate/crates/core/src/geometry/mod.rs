//! Lattices, Følner sequences, ball covers and partitions of unity.

mod cover;
mod folner;
mod lattice;

pub use cover::{
    build_colored_cover, greedy_coloring, hop_lipschitz, is_proper_coloring, max_degree, partition_of_unity,
    ColoredCover, PartitionOfUnity,
};
pub use folner::{folner_boxes, folner_deficiency, FolnerSequence};
pub use lattice::{build_lattice, Corners, GeometrySpec, Lattice, LatticeKind};
