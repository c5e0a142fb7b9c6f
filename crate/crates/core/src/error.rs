use std::fmt;

use crate::sketch::Violation;

/// Location of a malformed input record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub file: String,
    pub record: Option<usize>,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file)?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, ":{l}:{c}")?;
        }
        if let Some(r) = self.record {
            write!(f, " (record {r})")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate sketch: {0}")]
    DegenerateSketch(String),
    #[error("invalid sketch: {}", join(.0))]
    InvalidSketch(Vec<Violation>),
    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },
    #[error("unknown concept type {0}")]
    UnknownConceptType(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("argument budget exceeded: constraints {constraints:?} need {slots} slots and {inward} inward arguments")]
    ArgBudgetExceeded { constraints: Vec<usize>, slots: usize, inward: usize },
    #[error("infeasible match: {generated} generated slots for {targets} targets")]
    InfeasibleMatch { generated: usize, targets: usize },
    #[error("unmatched target element {0}")]
    UnmatchedTarget(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid library: {0}")]
    InvalidLibrary(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
