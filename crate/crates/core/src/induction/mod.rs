//! Library induction: candidate enumeration, canonical keys, matching and parsing.

pub mod canonical;
pub mod enumerate;
pub mod parse;
pub mod pattern;
pub mod select;
