//! Parsing a sketch into library concept instances.

use std::cmp::Ordering;

use serde::Serialize;

use super::pattern::{cover_all, Embedding, Pattern, SketchIndex};
use crate::concept::{
    ConceptInstance, ConceptLibrary, ConceptType, Provenance, SketchDecomposition, Slot, SlotValue, Target, TypeRef,
    K_QRY,
};
use crate::error::{Error, Result};
use crate::sketch::SketchGraph;

#[derive(Debug, Clone, Serialize)]
pub struct ParseResult {
    pub decomposition: SketchDecomposition,
    /// Owner `(instance, slot)` of every sketch element (primitives then constraints).
    pub provenance: Vec<Provenance>,
    /// Element ids wrapped in trivial or local concepts.
    pub residual: Vec<usize>,
    /// Constraints that could not be routed through trivial wrappers and were
    /// packed into local concepts together with their endpoints.
    pub arg_budget_exceeded: Vec<usize>,
}

impl ParseResult {
    /// Instance owning primitive `p`.
    pub fn primitive_owner(&self, p: usize) -> usize {
        self.provenance[p].instance
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Minimum number of instances; decompositions grow beyond this as needed.
    pub k_qry: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { k_qry: K_QRY }
    }
}

/// Induced library entries in matching priority: gain, then size, then index.
pub fn priority(lib: &ConceptLibrary) -> Vec<usize> {
    let mut order: Vec<usize> = lib
        .induced()
        .filter(|&i| {
            let t = lib.get(i).unwrap();
            t.k_l0() == lib.k_l0 && t.k_arg == lib.k_arg && !t.is_null()
        })
        .collect();
    order.sort_by(|&a, &b| {
        lib.gain(b)
            .partial_cmp(&lib.gain(a))
            .unwrap_or(Ordering::Equal)
            .then(lib.get(b).unwrap().element_count().cmp(&lib.get(a).unwrap().element_count()))
            .then(a.cmp(&b))
    });
    order
}

struct Placed {
    type_ref: TypeRef,
    /// Sketch element per slot: primitive index or constraint index.
    slots: Vec<Option<usize>>,
    outward: Vec<Option<usize>>,
    residual: bool,
}

pub fn parse_sketch(sketch: &SketchGraph, lib: &ConceptLibrary) -> Result<ParseResult> {
    parse_with(sketch, lib, &priority(lib), &ParseOptions::default())
}

/// Parses with an explicit concept priority list.
pub fn parse_with(
    sketch: &SketchGraph,
    lib: &ConceptLibrary,
    order: &[usize],
    opts: &ParseOptions,
) -> Result<ParseResult> {
    let violations = sketch.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSketch(violations));
    }
    let (k, ka) = (lib.k_l0, lib.k_arg);
    let n_p = sketch.primitives.len();
    let n = sketch.element_count();
    let idx = SketchIndex::new(sketch);
    let mut covered = vec![false; n];
    let mut placed: Vec<Placed> = Vec::new();
    for &ci in order {
        let t = lib.get(ci).ok_or(Error::UnknownConceptType(ci))?;
        let pat = Pattern::new(t);
        for Embedding { slots, outward } in cover_all(&pat, &idx, &mut covered) {
            placed.push(Placed { type_ref: TypeRef::Library(ci), slots, outward, residual: false });
        }
    }

    let mut local_types: Vec<ConceptType> = Vec::new();
    let mut unroutable: Vec<usize> = (0..sketch.constraints.len())
        .filter(|&c| !covered[n_p + c] && lib.trivial_constraint(sketch.constraints[c].kind).is_none())
        .collect();
    let arg_budget_exceeded = unroutable.clone();
    if !unroutable.is_empty() {
        pack_unroutable(sketch, lib, &mut placed, &mut covered, &mut unroutable, &mut local_types)?;
    }

    for p in 0..n_p {
        if !covered[p] {
            let mut slots = vec![None; k];
            slots[0] = Some(p);
            placed.push(Placed {
                type_ref: TypeRef::Library(lib.trivial_primitive(sketch.primitives[p].kind)),
                slots,
                outward: vec![None; ka],
                residual: true,
            });
            covered[p] = true;
        }
    }
    for (c, sc) in sketch.constraints.iter().enumerate() {
        if covered[n_p + c] {
            continue;
        }
        let ti = lib.trivial_constraint(sc.kind).expect("unroutable constraints were packed");
        let mut slots = vec![None; k];
        slots[0] = Some(c);
        let mut outward = vec![None; ka];
        for (r, &q) in sc.refs.iter().enumerate() {
            outward[r] = Some(q);
        }
        placed.push(Placed { type_ref: TypeRef::Library(ti), slots, outward, residual: true });
        covered[n_p + c] = true;
    }

    let types: Vec<&ConceptType> = placed
        .iter()
        .map(|pl| match pl.type_ref {
            TypeRef::Library(i) => lib.get(i).unwrap(),
            TypeRef::Local(i) => &local_types[i],
        })
        .collect();
    let mut provenance = vec![Provenance { instance: usize::MAX, slot: 0 }; n];
    let mut instances = Vec::with_capacity(placed.len());
    let mut residual = Vec::new();
    for (i, (pl, t)) in placed.iter().zip(&types).enumerate() {
        let mut values = vec![SlotValue::Null; k];
        for (s, e) in pl.slots.iter().enumerate() {
            let Some(e) = *e else { continue };
            let id = match t.slots[s] {
                Slot::Primitive(_) => {
                    let p = &sketch.primitives[e];
                    values[s] = SlotValue::Primitive { construction: p.construction, params: p.params.clone() };
                    e
                }
                Slot::Constraint(_) => {
                    values[s] = SlotValue::Constraint { param: sketch.constraints[e].param };
                    n_p + e
                }
                Slot::Null => continue,
            };
            provenance[id] = Provenance { instance: i, slot: s };
            if pl.residual {
                residual.push(id);
            }
        }
        instances.push(ConceptInstance { type_ref: pl.type_ref, values });
    }
    residual.sort_unstable();

    let mut decomposition = SketchDecomposition::new(k, ka, instances);
    decomposition.local_types = local_types.clone();
    for (i, pl) in placed.iter().enumerate() {
        for (a, target) in pl.outward.iter().enumerate() {
            let Some(q) = *target else { continue };
            let Provenance { instance: j, slot } = provenance[q];
            let b = (0..ka).find(|&b| types[j].inward_target(b) == Some(slot)).ok_or_else(|| {
                Error::ShapeMismatch(format!("primitive {q} is referenced from instance {i} but not exposed by instance {j}"))
            })?;
            decomposition.connect(i, a, j, b);
        }
    }
    if decomposition.k_qry() > opts.k_qry {
        log::debug!("k_qry grows to {} for this sketch", decomposition.k_qry());
    }
    decomposition.pad_to(opts.k_qry);
    Ok(ParseResult { decomposition, provenance, residual, arg_budget_exceeded })
}

/// Moves constraints that no trivial concept can wrap (arity above `k_arg`) into
/// local concepts together with their endpoints, dissolving library instances
/// that hold those endpoints.
fn pack_unroutable(
    sketch: &SketchGraph,
    lib: &ConceptLibrary,
    placed: &mut Vec<Placed>,
    covered: &mut [bool],
    unroutable: &mut Vec<usize>,
    local_types: &mut Vec<ConceptType>,
) -> Result<()> {
    let (k, ka) = (lib.k_l0, lib.k_arg);
    let n_p = sketch.primitives.len();
    let incidence = sketch.incidence();
    // Dissolve library instances that own an endpoint of an unroutable constraint.
    loop {
        let touched: Vec<usize> = unroutable.iter().flat_map(|&c| sketch.constraints[c].refs.iter().copied()).collect();
        let owner = |p: usize| placed.iter().position(|pl| matches!(pl.type_ref, TypeRef::Library(_)) && element_in(pl, lib, p, false));
        let Some(i) = touched.iter().find_map(|&p| owner(p)) else { break };
        let pl = placed.remove(i);
        let t = match pl.type_ref {
            TypeRef::Library(ti) => lib.get(ti).unwrap(),
            TypeRef::Local(_) => unreachable!(),
        };
        for (s, e) in pl.slots.iter().enumerate() {
            let Some(e) = *e else { continue };
            match t.slots[s] {
                Slot::Primitive(_) => covered[e] = false,
                Slot::Constraint(kind) => {
                    covered[n_p + e] = false;
                    if lib.trivial_constraint(kind).is_none() {
                        unroutable.push(e);
                    }
                }
                Slot::Null => {}
            }
        }
        unroutable.sort_unstable();
        unroutable.dedup();
    }
    // Group unroutable constraints sharing endpoints.
    let mut parent: Vec<usize> = (0..n_p).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for &c in unroutable.iter() {
        let refs = &sketch.constraints[c].refs;
        for w in refs.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for &c in unroutable.iter() {
        let root = find(&mut parent, sketch.constraints[c].refs[0]);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => g.2.push(c),
            None => groups.push((root, Vec::new(), vec![c])),
        }
    }
    for (_, prims, cons) in &mut groups {
        for &c in cons.iter() {
            prims.extend(sketch.constraints[c].refs.iter().copied());
        }
        prims.sort_unstable();
        prims.dedup();
        let size = prims.len() + cons.len();
        let exposed: Vec<usize> = prims
            .iter()
            .copied()
            .filter(|&p| incidence[p].iter().any(|&(c, _)| !cons.contains(&c)))
            .collect();
        if size > k || exposed.len() > ka {
            return Err(Error::ArgBudgetExceeded { constraints: cons.clone(), slots: size, inward: exposed.len() });
        }
        let mut slots: Vec<Slot> = prims.iter().map(|&p| Slot::Primitive(sketch.primitives[p].kind)).collect();
        let mut refs = Vec::new();
        for &c in cons.iter() {
            let targets = sketch.constraints[c]
                .refs
                .iter()
                .map(|&r| Target::Slot(prims.iter().position(|&p| p == r).unwrap()))
                .collect();
            refs.push((slots.len(), targets));
            slots.push(Slot::Constraint(sketch.constraints[c].kind));
        }
        let inward: Vec<usize> = exposed.iter().map(|&p| prims.iter().position(|&q| q == p).unwrap()).collect();
        local_types.push(ConceptType::hard(k, ka, &slots, &refs, &inward));
        let mut slot_elems: Vec<Option<usize>> = prims.iter().map(|&p| Some(p)).collect();
        slot_elems.extend(cons.iter().map(|&c| Some(c)));
        slot_elems.resize(k, None);
        for &p in prims.iter() {
            covered[p] = true;
        }
        for &c in cons.iter() {
            covered[n_p + c] = true;
        }
        placed.push(Placed {
            type_ref: TypeRef::Local(local_types.len() - 1),
            slots: slot_elems,
            outward: vec![None; ka],
            residual: true,
        });
    }
    Ok(())
}

fn element_in(pl: &Placed, lib: &ConceptLibrary, p: usize, constraint: bool) -> bool {
    let TypeRef::Library(ti) = pl.type_ref else { return false };
    let t = lib.get(ti).unwrap();
    pl.slots.iter().enumerate().any(|(s, e)| {
        *e == Some(p) && matches!(t.slots[s], Slot::Constraint(_)) == constraint && !t.slots[s].is_null()
    })
}
