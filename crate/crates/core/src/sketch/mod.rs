//! L0 data model, quantization, tokenization, rasterization, and corpus ingestion.

pub mod corpus;
pub mod geometry;
mod graph;
mod kinds;
pub mod normalize;
mod quantize;
pub mod raster;
mod tokenize;

pub use graph::{ConstraintInstance, PrimitiveInstance, SketchGraph, Violation};
pub use kinds::{ConstraintKind, ElementKind, ParamKind, PrimitiveKind};
pub use quantize::QuantizationSpec;
pub use tokenize::{tokenize, Token};
