use crate::concept::{ConceptLibrary, SketchDecomposition, Slot, SlotValue};
use crate::error::{Error, Result};
use crate::sketch::{ConstraintKind, ElementKind, PrimitiveInstance, PrimitiveKind, QuantizationSpec};

/// Number of type classes: every L0 kind plus the empty type.
pub const TYPE_CLASSES: usize = ElementKind::COUNT + 1;

/// A generated element: a distribution over types and, for every primitive kind,
/// distributions over the construction flag and each parameter's bins.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedElement {
    pub type_dist: Vec<f64>,
    /// `param_dists[kind][0]` is the construction flag, `[1..]` follow the kind's schema.
    pub param_dists: Vec<Vec<Vec<f64>>>,
}

/// Bin count of each parameter segment for a primitive kind.
pub fn segment_bins(kind: PrimitiveKind, quant: &QuantizationSpec) -> Vec<usize> {
    let mut v = vec![2];
    v.extend(kind.schema().iter().map(|&k| usize::from(quant.bins(k))));
    v
}

fn one_hot(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

impl GeneratedElement {
    fn with_type(type_dist: Vec<f64>, quant: &QuantizationSpec) -> Self {
        let param_dists = PrimitiveKind::ALL
            .iter()
            .map(|&k| segment_bins(k, quant).into_iter().map(uniform).collect())
            .collect();
        Self { type_dist, param_dists }
    }

    pub fn null(quant: &QuantizationSpec) -> Self {
        Self::with_type(one_hot(TYPE_CLASSES, ElementKind::NULL_INDEX), quant)
    }

    pub fn from_primitive(p: &PrimitiveInstance, quant: &QuantizationSpec) -> Self {
        let mut g = Self::with_type(one_hot(TYPE_CLASSES, ElementKind::Primitive(p.kind).index()), quant);
        let seg = &mut g.param_dists[p.kind.index()];
        seg[0] = one_hot(2, usize::from(p.construction));
        for (i, &b) in p.params.iter().enumerate() {
            seg[i + 1] = one_hot(seg[i + 1].len(), usize::from(b));
        }
        g
    }

    pub fn from_constraint(kind: ConstraintKind, quant: &QuantizationSpec) -> Self {
        Self::with_type(one_hot(TYPE_CLASSES, ElementKind::Constraint(kind).index()), quant)
    }

    /// Checks that every distribution has the expected length and sums to one.
    pub fn validate(&self, quant: &QuantizationSpec) -> Result<()> {
        let check = |d: &[f64], n: usize| -> Result<()> {
            if d.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: d.len() });
            }
            let s: f64 = d.iter().sum();
            if (s - 1.0).abs() > 1e-9 || d.iter().any(|&x| x < 0.0) {
                return Err(Error::ShapeMismatch(format!("distribution sums to {s}")));
            }
            Ok(())
        };
        check(&self.type_dist, TYPE_CLASSES)?;
        if self.param_dists.len() != PrimitiveKind::ALL.len() {
            return Err(Error::DimensionMismatch { expected: PrimitiveKind::ALL.len(), found: self.param_dists.len() });
        }
        for (k, seg) in PrimitiveKind::ALL.iter().zip(&self.param_dists) {
            let bins = segment_bins(*k, quant);
            if seg.len() != bins.len() {
                return Err(Error::DimensionMismatch { expected: bins.len(), found: seg.len() });
            }
            for (d, n) in seg.iter().zip(bins) {
                check(d, n)?;
            }
        }
        Ok(())
    }

    pub fn is_hard(&self) -> bool {
        let hard = |d: &[f64]| d.iter().all(|&x| x == 0.0 || x == 1.0);
        hard(&self.type_dist) && self.param_dists.iter().flatten().all(|d| hard(d))
    }
}

/// One-hot generation of every slot of a decomposition, instance-major.
pub fn generate(decomp: &SketchDecomposition, lib: &ConceptLibrary, quant: &QuantizationSpec) -> Result<Vec<GeneratedElement>> {
    let types = decomp.instance_types(lib)?;
    let mut out = Vec::with_capacity(types.len() * decomp.k_l0);
    for (inst, t) in decomp.instances.iter().zip(types) {
        for (s, slot) in t.slots.iter().enumerate() {
            out.push(match *slot {
                Slot::Null => GeneratedElement::null(quant),
                Slot::Primitive(kind) => {
                    let (construction, params) = match inst.values.get(s) {
                        Some(SlotValue::Primitive { construction, params }) => (*construction, params.clone()),
                        _ => (false, vec![0; kind.schema().len()]),
                    };
                    GeneratedElement::from_primitive(&PrimitiveInstance { kind, construction, params }, quant)
                }
                Slot::Constraint(kind) => GeneratedElement::from_constraint(kind, quant),
            });
        }
    }
    Ok(out)
}
