//! L1 concept structures, instances, cross-concept reference transport, and libraries.

mod decomposition;
mod library;
mod matrix;
mod types;

pub use decomposition::{
    cross_mask, expand, Assembled, ConceptInstance, ElementSkeleton, ExpandedInstance, Provenance, SketchDecomposition,
    SlotValue, TypeRef, UnresolvedReference,
};
pub use library::{concept_gain, ConceptLibrary, LibraryEntry};
pub use matrix::AssignmentMatrix;
pub use types::{structure_mask, ConceptType, ConceptViolation, Slot, Target, K_ARG, K_L0, K_QRY};
