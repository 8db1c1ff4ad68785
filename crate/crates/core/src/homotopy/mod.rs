//! Cylinders, lifting problems and fiberwise homotopy.

pub mod cylinder;
pub mod family;
pub mod lifting;
pub mod operad;
pub mod relation;

pub use cylinder::{monotone_labels, rep_cylinder, tensor_interval, Cylinder, IntervalTensor};
pub use family::{has_rlp, Family, Horn, LiftFailure, RlpReport};
pub use lifting::{solve_lift, Budget, Extension, LiftingProblem};
pub use operad::{nerve_truncated, terminal_map, ThinOperad};
pub use relation::{
    candidates, colour_witness, compose_homotopies, extend_from, homotopy_rel, invert_homotopy, one_step, straighten,
    ColourWitness, CylinderMap, HomotopyClasses, HomotopyWitness, OracleOptions, Step, WitnessKind,
};

#[cfg(test)]
mod tests;
