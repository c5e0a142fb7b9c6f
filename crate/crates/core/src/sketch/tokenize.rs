use std::fmt;

use serde::Serialize;

use super::graph::SketchGraph;
use super::kinds::{ConstraintKind, PrimitiveKind};
use crate::error::{Error, Result};

/// Symbolic token of the flattened sketch sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "token", rename_all = "snake_case")]
pub enum Token {
    Start,
    End,
    New,
    PrimType { kind: PrimitiveKind },
    Param { construction: bool, bins: Vec<u16> },
    ConstrType { kind: ConstraintKind },
    /// Sequence position of the referenced primitive's type token.
    Ref { position: usize },
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Start => f.write_str("START"),
            Self::End => f.write_str("END"),
            Self::New => f.write_str("NEW"),
            Self::PrimType { kind } => write!(f, "{kind}"),
            Self::Param { construction, bins } => {
                write!(f, "({}", u8::from(*construction))?;
                for b in bins {
                    write!(f, ",{b}")?;
                }
                f.write_str(")")
            }
            Self::ConstrType { kind } => write!(f, "{kind}"),
            Self::Ref { position } => write!(f, "@{position}"),
        }
    }
}

/// Position of primitive `i`'s type token.
pub fn primitive_token_position(i: usize) -> usize {
    1 + 3 * i
}

/// Flattens a sketch: primitives then constraints, consecutive elements separated by `NEW`.
pub fn tokenize(sketch: &SketchGraph) -> Result<Vec<Token>> {
    let violations = sketch.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSketch(violations));
    }
    let mut out = vec![Token::Start];
    let mut first = true;
    let mut sep = |out: &mut Vec<Token>| {
        if !std::mem::take(&mut first) {
            out.push(Token::New);
        }
    };
    for p in &sketch.primitives {
        sep(&mut out);
        out.push(Token::PrimType { kind: p.kind });
        out.push(Token::Param { construction: p.construction, bins: p.params.clone() });
    }
    for c in &sketch.constraints {
        sep(&mut out);
        out.push(Token::ConstrType { kind: c.kind });
        out.extend(c.refs.iter().map(|&r| Token::Ref { position: primitive_token_position(r) }));
    }
    out.push(Token::End);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{ConstraintInstance, PrimitiveInstance};

    #[test]
    fn empty_sketch() {
        assert_eq!(tokenize(&SketchGraph::default()).unwrap(), vec![Token::Start, Token::End]);
    }

    #[test]
    fn line_with_horizontal() {
        let s = SketchGraph::new(
            vec![PrimitiveInstance::new(PrimitiveKind::Line, vec![0, 40, 79, 40])],
            vec![ConstraintInstance::new(ConstraintKind::Horizontal, vec![0])],
        );
        let t = tokenize(&s).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t[1], Token::PrimType { kind: PrimitiveKind::Line });
        assert_eq!(t[3], Token::New);
        assert_eq!(t[4], Token::ConstrType { kind: ConstraintKind::Horizontal });
        assert_eq!(t[5], Token::Ref { position: 1 });
    }

    #[test]
    fn invalid_sketch_is_rejected() {
        let s = SketchGraph::new(vec![], vec![ConstraintInstance::new(ConstraintKind::Horizontal, vec![0])]);
        assert!(matches!(tokenize(&s), Err(Error::InvalidSketch(_))));
    }
}
