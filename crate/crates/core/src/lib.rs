//! Modular concept induction, parsing, and auto-completion for parametric CAD sketches.
//!
//! A sketch is a graph of primitives (lines, circles, points, arcs) and the
//! constraints between them. A *concept* is a reusable structure of up to
//! twelve such elements with a small argument interface; a library of concepts
//! is induced from a corpus by combinatorial search, and every sketch can then
//! be parsed losslessly into concept instances, evaluated, and auto-completed.

pub mod api;
pub mod completion;
pub mod concept;
pub mod error;
pub mod eval;
pub mod induction;
pub mod matching;
pub mod service;
pub mod sketch;
pub mod svg;
pub mod synth;
pub mod vq;

pub use error::{Error, Result};
