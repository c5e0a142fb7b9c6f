use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::library::ConceptLibrary;
use super::matrix::AssignmentMatrix;
use super::types::{ConceptType, Slot, Target};
use crate::error::{Error, Result};
use crate::sketch::{ConstraintInstance, ConstraintKind, PrimitiveInstance, SketchGraph};

/// Concept type of an instance: a library entry or a decomposition-local wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeRef {
    Library(usize),
    Local(usize),
}

/// Parameters carried by one slot of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "snake_case")]
pub enum SlotValue {
    Null,
    Primitive {
        construction: bool,
        params: Vec<u16>,
    },
    Constraint {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<u16>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptInstance {
    pub type_ref: TypeRef,
    pub values: Vec<SlotValue>,
}

impl ConceptInstance {
    pub fn null(k: usize) -> Self {
        Self { type_ref: TypeRef::Library(ConceptLibrary::NULL), values: vec![SlotValue::Null; k] }
    }
}

/// Concept instances plus the cross-concept composition matrix `R_S`.
///
/// Row `i·k_arg + a` of `cross` is outward argument `a` of instance `i`;
/// column `j·k_arg + b` is inward argument `b` of instance `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchDecomposition {
    pub k_l0: usize,
    pub k_arg: usize,
    pub instances: Vec<ConceptInstance>,
    pub local_types: Vec<ConceptType>,
    pub cross: AssignmentMatrix,
}

pub fn cross_mask(n: usize, ka: usize) -> AssignmentMatrix {
    let mut m = AssignmentMatrix::zeros(n * ka, n * ka);
    for i in 0..n {
        for a in 0..ka {
            for b in 0..ka {
                m.set_masked(i * ka + a, i * ka + b);
            }
        }
    }
    m
}

/// A non-Null slot of an expanded instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSkeleton {
    Primitive(PrimitiveInstance),
    Constraint { kind: ConstraintKind, refs: Vec<Option<Target>>, param: Option<u16> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedInstance {
    /// `(slot, element)` in slot order.
    pub elements: Vec<(usize, ElementSkeleton)>,
    /// `structure_matrix[:2k, :k]`.
    pub block: AssignmentMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub instance: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnresolvedReference {
    pub instance: usize,
    pub slot: usize,
    pub ref_pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub sketch: SketchGraph,
    /// Element order of `sketch` (primitives then constraints) to owning instance slot.
    pub provenance: Vec<Provenance>,
    pub unresolved: Vec<UnresolvedReference>,
}

impl Assembled {
    pub fn primitive_owner(&self, p: usize) -> usize {
        self.provenance[p].instance
    }

    pub fn constraint_owner(&self, c: usize) -> usize {
        self.provenance[self.sketch.primitives.len() + c].instance
    }
}

impl SketchDecomposition {
    pub fn new(k_l0: usize, k_arg: usize, instances: Vec<ConceptInstance>) -> Self {
        let n = instances.len();
        Self { k_l0, k_arg, instances, local_types: Vec::new(), cross: cross_mask(n, k_arg) }
    }

    pub fn k_qry(&self) -> usize {
        self.instances.len()
    }

    /// Pads with all-Null instances up to `k_qry`.
    pub fn pad_to(&mut self, k_qry: usize) {
        let n = self.instances.len();
        if n >= k_qry {
            return;
        }
        self.instances.resize(k_qry, ConceptInstance::null(self.k_l0));
        let ka = self.k_arg;
        let mut cross = cross_mask(k_qry, ka);
        for r in 0..n * ka {
            for c in 0..n * ka {
                cross.set(r, c, self.cross.get(r, c));
            }
        }
        self.cross = cross;
    }

    /// Routes outward arg `a` of instance `i` to inward arg `b` of instance `j`.
    pub fn connect(&mut self, i: usize, a: usize, j: usize, b: usize) {
        let ka = self.k_arg;
        self.cross.row_mut(i * ka + a).fill(0.0);
        self.cross.set(i * ka + a, j * ka + b, 1.0);
    }

    pub fn concept_type<'a>(&'a self, lib: &'a ConceptLibrary, t: TypeRef) -> Result<&'a ConceptType> {
        match t {
            TypeRef::Library(i) => lib.get(i).ok_or(Error::UnknownConceptType(i)),
            TypeRef::Local(i) => self.local_types.get(i).ok_or(Error::UnknownConceptType(i)),
        }
    }

    pub fn instance_type<'a>(&'a self, lib: &'a ConceptLibrary, i: usize) -> Result<&'a ConceptType> {
        self.concept_type(lib, self.instances[i].type_ref)
    }

    /// Concept type of every instance, in instance order.
    pub fn instance_types<'a>(&'a self, lib: &'a ConceptLibrary) -> Result<Vec<&'a ConceptType>> {
        self.types(lib)
    }

    fn types<'a>(&'a self, lib: &'a ConceptLibrary) -> Result<Vec<&'a ConceptType>> {
        let (k, ka) = (self.k_l0, self.k_arg);
        let n = self.instances.len();
        if self.cross.shape() != (n * ka, n * ka) {
            return Err(Error::ShapeMismatch(format!(
                "R_S is {:?}, expected {:?}",
                self.cross.shape(),
                (n * ka, n * ka)
            )));
        }
        (0..n)
            .map(|i| {
                let t = self.instance_type(lib, i)?;
                if t.matrix.shape() != (2 * k + ka, k + ka) {
                    return Err(Error::ShapeMismatch(format!(
                        "instance {i} structure matrix is {:?}, expected {:?}",
                        t.matrix.shape(),
                        (2 * k + ka, k + ka)
                    )));
                }
                Ok(t)
            })
            .collect()
    }

    /// Sparse row `i·2k + row` of the full reference matrix.
    fn compose_row(&self, types: &[&ConceptType], i: usize, row: usize) -> Vec<(usize, f64)> {
        let (k, ka) = (self.k_l0, self.k_arg);
        let ti = types[i];
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for c in 0..k {
            let v = ti.matrix.get(row, c);
            if v != 0.0 {
                *acc.entry(i * k + c).or_default() += v;
            }
        }
        for a in 0..ka {
            let w = ti.matrix.get(row, k + a);
            if w == 0.0 {
                continue;
            }
            for (j, tj) in types.iter().enumerate() {
                if j == i {
                    continue;
                }
                for b in 0..ka {
                    let s = self.cross.get(i * ka + a, j * ka + b);
                    if s == 0.0 {
                        continue;
                    }
                    for p in 0..k {
                        let v = tj.matrix.get(2 * k + b, p);
                        if v != 0.0 {
                            *acc.entry(j * k + p).or_default() += w * s * v;
                        }
                    }
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Full reference matrix of shape `(2·n·k) × (n·k)`.
    pub fn compose_cross_refs(&self, lib: &ConceptLibrary) -> Result<AssignmentMatrix> {
        let types = self.types(lib)?;
        let (k, n) = (self.k_l0, self.instances.len());
        let mut out = AssignmentMatrix::zeros(2 * n * k, n * k);
        for i in 0..n {
            for row in 0..2 * k {
                for (col, v) in self.compose_row(&types, i, row) {
                    out.set(i * 2 * k + row, col, v);
                }
            }
        }
        Ok(out)
    }

    pub fn expand_instance(&self, lib: &ConceptLibrary, i: usize) -> Result<ExpandedInstance> {
        let inst = self.instances.get(i).ok_or(Error::UnknownConceptType(i))?;
        let t = self.concept_type(lib, inst.type_ref)?;
        expand(t, inst)
    }

    /// Concatenates instances into a sketch, resolving references through the composed matrix.
    pub fn assemble(&self, lib: &ConceptLibrary) -> Result<Assembled> {
        let types = self.types(lib)?;
        let k = self.k_l0;
        let mut prim_index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut sketch = SketchGraph::default();
        let mut provenance = Vec::new();
        for (i, (inst, t)) in self.instances.iter().zip(&types).enumerate() {
            for s in t.primitive_slots() {
                let Slot::Primitive(kind) = t.slots[s] else { unreachable!() };
                let (construction, params) = match inst.values.get(s) {
                    Some(SlotValue::Primitive { construction, params }) => (*construction, params.clone()),
                    _ => (false, Vec::new()),
                };
                prim_index.insert(i * k + s, sketch.primitives.len());
                sketch.primitives.push(PrimitiveInstance { kind, construction, params });
                provenance.push(Provenance { instance: i, slot: s });
            }
        }
        let mut constraint_prov = Vec::new();
        let mut unresolved = Vec::new();
        for (i, (inst, t)) in self.instances.iter().zip(&types).enumerate() {
            'slots: for s in t.constraint_slots() {
                let Slot::Constraint(kind) = t.slots[s] else { unreachable!() };
                let mut refs = Vec::with_capacity(kind.arity());
                for r in 0..kind.arity() {
                    let row = self.compose_row(&types, i, 2 * s + r);
                    let mut top: Option<(usize, f64)> = None;
                    for &(c, v) in &row {
                        if v > 0.0 && top.is_none_or(|(_, tv)| v > tv) {
                            top = Some((c, v));
                        }
                    }
                    let best = top.and_then(|(c, _)| prim_index.get(&c));
                    match best {
                        Some(&p) => refs.push(p),
                        None => {
                            unresolved.push(UnresolvedReference { instance: i, slot: s, ref_pos: r });
                            continue 'slots;
                        }
                    }
                }
                let param = match inst.values.get(s) {
                    Some(SlotValue::Constraint { param }) => *param,
                    _ => None,
                };
                sketch.constraints.push(ConstraintInstance { kind, refs, param });
                constraint_prov.push(Provenance { instance: i, slot: s });
            }
        }
        provenance.extend(constraint_prov);
        Ok(Assembled { sketch, provenance, unresolved })
    }

    /// Number of instances that are not all-Null.
    pub fn used_instances(&self, lib: &ConceptLibrary) -> usize {
        (0..self.instances.len())
            .filter(|&i| self.instance_type(lib, i).map(|t| !t.is_null()).unwrap_or(false))
            .count()
    }

    /// Cross references recorded in `R_S`.
    pub fn cross_edges(&self) -> Vec<((usize, usize), (usize, usize))> {
        let ka = self.k_arg;
        (0..self.cross.rows())
            .filter_map(|r| self.cross.argmax_row(r).map(|c| ((r / ka, r % ka), (c / ka, c % ka))))
            .collect()
    }
}

pub fn expand(t: &ConceptType, inst: &ConceptInstance) -> Result<ExpandedInstance> {
    let k = t.k_l0();
    let mut block = AssignmentMatrix::zeros(2 * k, k);
    for r in 0..2 * k {
        for c in 0..k {
            block.set(r, c, t.matrix.get(r, c));
        }
    }
    let mut elements = Vec::new();
    for (s, slot) in t.slots.iter().enumerate() {
        match *slot {
            Slot::Null => {}
            Slot::Primitive(kind) => {
                let (construction, params) = match inst.values.get(s) {
                    Some(SlotValue::Primitive { construction, params }) => (*construction, params.clone()),
                    _ => (false, Vec::new()),
                };
                elements.push((s, ElementSkeleton::Primitive(PrimitiveInstance { kind, construction, params })));
            }
            Slot::Constraint(kind) => {
                let param = match inst.values.get(s) {
                    Some(SlotValue::Constraint { param }) => *param,
                    _ => None,
                };
                elements.push((s, ElementSkeleton::Constraint { kind, refs: t.ref_targets(s), param }));
            }
        }
    }
    Ok(ExpandedInstance { elements, block })
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    schema_version: u32,
    k_l0: usize,
    k_arg: usize,
    k_qry: usize,
    instances: Vec<ConceptInstance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    local_types: Vec<ConceptType>,
    cross_matrix: Vec<Vec<f64>>,
}

impl Serialize for SketchDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            schema_version: crate::sketch::corpus::SCHEMA_VERSION,
            k_l0: self.k_l0,
            k_arg: self.k_arg,
            k_qry: self.instances.len(),
            instances: self.instances.clone(),
            local_types: self.local_types.clone(),
            cross_matrix: self.cross.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SketchDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DecompositionJson::deserialize(d)?;
        let n = j.instances.len();
        let mut cross = cross_mask(n, j.k_arg);
        let expected = n * j.k_arg;
        if j.cross_matrix.len() != expected || j.cross_matrix.iter().any(|r| r.len() != expected) {
            return Err(serde::de::Error::custom(format!("cross_matrix must be {expected}×{expected}")));
        }
        for (r, row) in j.cross_matrix.iter().enumerate() {
            cross.row_mut(r).copy_from_slice(row);
        }
        Ok(Self { k_l0: j.k_l0, k_arg: j.k_arg, instances: j.instances, local_types: j.local_types, cross })
    }
}
