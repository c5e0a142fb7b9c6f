use std::fmt;

use serde::{Deserialize, Serialize};

use super::kinds::{ConstraintKind, ElementKind, PrimitiveKind};
use super::quantize::QuantizationSpec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimitiveInstance {
    pub kind: PrimitiveKind,
    pub construction: bool,
    /// Quantized bins following `kind.schema()`.
    pub params: Vec<u16>,
}

impl PrimitiveInstance {
    pub fn new(kind: PrimitiveKind, params: Vec<u16>) -> Self {
        Self { kind, construction: false, params }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintInstance {
    pub kind: ConstraintKind,
    /// Indices into the owning sketch's primitive list.
    pub refs: Vec<usize>,
    /// Quantized scalar for dimensional constraints. Never used in costs or metrics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<u16>,
}

impl ConstraintInstance {
    pub fn new(kind: ConstraintKind, refs: Vec<usize>) -> Self {
        Self { kind, refs, param: None }
    }
}

/// A sketch: ordered primitives plus constraints that reference them by index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SketchGraph {
    pub primitives: Vec<PrimitiveInstance>,
    pub constraints: Vec<ConstraintInstance>,
}

/// A single problem found by [`SketchGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ArityMismatch { constraint: usize, expected: usize, found: usize },
    RefOutOfRange { constraint: usize, reference: usize, primitives: usize },
    MissingParameter { primitive: usize, expected: usize, found: usize },
    ExtraParameter { primitive: usize, expected: usize, found: usize },
    UnexpectedConstraintParameter { constraint: usize },
    BinOutOfRange { element: usize, slot: usize, bin: u16, bins: u16 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ArityMismatch { constraint, expected, found } => write!(
                f,
                "arity mismatch: constraint {constraint} expects {expected} refs, found {found}"
            ),
            Self::RefOutOfRange { constraint, reference, primitives } => write!(
                f,
                "ref out of range: constraint {constraint} references {reference} but sketch has {primitives} primitives"
            ),
            Self::MissingParameter { primitive, expected, found } => write!(
                f,
                "missing parameter: primitive {primitive} expects {expected} params, found {found}"
            ),
            Self::ExtraParameter { primitive, expected, found } => write!(
                f,
                "extra parameter: primitive {primitive} expects {expected} params, found {found}"
            ),
            Self::UnexpectedConstraintParameter { constraint } => {
                write!(f, "extra parameter: constraint {constraint} kind takes no scalar")
            }
            Self::BinOutOfRange { element, slot, bin, bins } => write!(
                f,
                "bin out of range: element {element} slot {slot} has bin {bin} of {bins}"
            ),
        }
    }
}

impl SketchGraph {
    pub fn new(primitives: Vec<PrimitiveInstance>, constraints: Vec<ConstraintInstance>) -> Self {
        Self { primitives, constraints }
    }

    pub fn element_count(&self) -> usize {
        self.primitives.len() + self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_count() == 0
    }

    /// Kind of element `i` in the primitives-then-constraints element order.
    pub fn element_kind(&self, i: usize) -> ElementKind {
        if i < self.primitives.len() {
            ElementKind::Primitive(self.primitives[i].kind)
        } else {
            ElementKind::Constraint(self.constraints[i - self.primitives.len()].kind)
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(&QuantizationSpec::default())
    }

    pub fn validate_with(&self, quant: &QuantizationSpec) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, p) in self.primitives.iter().enumerate() {
            let schema = p.kind.schema();
            if p.params.len() < schema.len() {
                out.push(Violation::MissingParameter {
                    primitive: i,
                    expected: schema.len(),
                    found: p.params.len(),
                });
            } else if p.params.len() > schema.len() {
                out.push(Violation::ExtraParameter {
                    primitive: i,
                    expected: schema.len(),
                    found: p.params.len(),
                });
            }
            for (slot, (&bin, &kind)) in p.params.iter().zip(schema).enumerate() {
                let bins = quant.bins(kind);
                if bin >= bins {
                    out.push(Violation::BinOutOfRange { element: i, slot, bin, bins });
                }
            }
        }
        let n = self.primitives.len();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.refs.len() != c.kind.arity() {
                out.push(Violation::ArityMismatch {
                    constraint: i,
                    expected: c.kind.arity(),
                    found: c.refs.len(),
                });
            }
            for &r in &c.refs {
                if r >= n {
                    out.push(Violation::RefOutOfRange { constraint: i, reference: r, primitives: n });
                }
            }
            match (c.kind.param_kind(), c.param) {
                (None, Some(_)) => out.push(Violation::UnexpectedConstraintParameter { constraint: i }),
                (Some(kind), Some(bin)) if bin >= quant.bins(kind) => {
                    out.push(Violation::BinOutOfRange {
                        element: n + i,
                        slot: 0,
                        bin,
                        bins: quant.bins(kind),
                    })
                }
                _ => {}
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// For every primitive, the `(constraint, ref position)` pairs pointing at it.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.primitives.len()];
        for (ci, c) in self.constraints.iter().enumerate() {
            for (r, &p) in c.refs.iter().enumerate() {
                if p < inc.len() {
                    inc[p].push((ci, r));
                }
            }
        }
        inc
    }
}

#[cfg(test)]
mod tests {
    use crate::synth;

    #[test]
    fn rectangle_validates() {
        assert!(synth::rectangle_sketch().validate().is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let mut s = synth::rectangle_sketch();
        s.constraints[0].refs.truncate(1);
        let v = s.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("arity mismatch"));
    }

    #[test]
    fn ref_equal_to_primitive_count_is_out_of_range() {
        let mut s = synth::rectangle_sketch();
        s.constraints[0].refs[1] = s.primitives.len();
        let v = s.validate();
        assert!(v.iter().any(|v| v.to_string().starts_with("ref out of range")));
    }

    #[test]
    fn parameter_count_and_bins_are_checked() {
        let mut s = synth::rectangle_sketch();
        s.primitives[0].params.pop();
        s.primitives[1].params.push(3);
        s.primitives[2].params[0] = 80;
        s.constraints[0].param = Some(1);
        let msgs: Vec<String> = s.validate().iter().map(|v| v.to_string()).collect();
        assert!(msgs.iter().any(|m| m.starts_with("missing parameter")));
        assert!(msgs.iter().any(|m| m.starts_with("extra parameter: primitive")));
        assert!(msgs.iter().any(|m| m.starts_with("bin out of range")));
        assert!(msgs.iter().any(|m| m.starts_with("extra parameter: constraint")));
    }
}
