//! Candidate concept enumeration over connected primitive subsets.

use std::collections::BTreeSet;

use crate::concept::{ConceptType, Slot, Target};
use crate::sketch::SketchGraph;

pub const DEFAULT_BUDGET: usize = 20_000;

/// One occurrence of a candidate structure inside a sketch.
#[derive(Debug, Clone, PartialEq)]
pub struct Occurrence {
    /// Structure in sketch order (not canonicalized).
    pub concept: ConceptType,
    /// Sorted element ids: primitives `0..n_p`, constraints `n_p + c`.
    pub elements: Vec<usize>,
    pub inward: usize,
    pub outward: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    pub k_l0: usize,
    pub k_arg: usize,
    pub budget: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self { k_l0: crate::concept::K_L0, k_arg: crate::concept::K_ARG, budget: DEFAULT_BUDGET }
    }
}

pub(crate) struct Adjacency {
    pub incidence: Vec<Vec<(usize, usize)>>,
    pub neighbors: Vec<Vec<usize>>,
}

pub(crate) fn adjacency(sketch: &SketchGraph) -> Adjacency {
    let incidence = sketch.incidence();
    let mut neighbors = vec![BTreeSet::new(); sketch.primitives.len()];
    for c in &sketch.constraints {
        for &a in &c.refs {
            for &b in &c.refs {
                if a != b {
                    neighbors[a].insert(b);
                }
            }
        }
    }
    Adjacency { incidence, neighbors: neighbors.into_iter().map(|s| s.into_iter().collect()).collect() }
}

/// Constraints with every reference inside `member`, and those touching it.
fn touching(sketch: &SketchGraph, adj: &Adjacency, prims: &[usize], member: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut touch: Vec<usize> = prims.iter().flat_map(|&p| adj.incidence[p].iter().map(|&(c, _)| c)).collect();
    touch.sort_unstable();
    touch.dedup();
    let closed = touch.iter().copied().filter(|&c| sketch.constraints[c].refs.iter().all(|&r| member[r])).collect();
    (closed, touch)
}

/// Builds the occurrence for primitives `prims` and constraints `cons`, if it fits the budget.
pub(crate) fn occurrence(
    sketch: &SketchGraph,
    adj: &Adjacency,
    prims: &[usize],
    cons: &[usize],
    member: &[bool],
    k_l0: usize,
    k_arg: usize,
) -> Option<Occurrence> {
    let size = prims.len() + cons.len();
    if size < 2 || size > k_l0 {
        return None;
    }
    let mut exposed: Vec<usize> = Vec::new();
    for &p in prims {
        let is_in = |c: usize| cons.binary_search(&c).is_ok();
        if adj.incidence[p].iter().any(|&(c, _)| !is_in(c)) {
            exposed.push(p);
        }
    }
    if exposed.len() > k_arg {
        return None;
    }
    let mut external: Vec<usize> = Vec::new();
    for &c in cons {
        for &r in &sketch.constraints[c].refs {
            if !member[r] && !external.contains(&r) {
                external.push(r);
            }
        }
    }
    if external.len() > k_arg {
        return None;
    }
    let slot_of = |p: usize| prims.iter().position(|&q| q == p).unwrap();
    let mut slots: Vec<Slot> = prims.iter().map(|&p| Slot::Primitive(sketch.primitives[p].kind)).collect();
    let mut refs = Vec::new();
    for &c in cons {
        let ci = &sketch.constraints[c];
        let targets = ci
            .refs
            .iter()
            .map(|&r| {
                if member[r] {
                    Target::Slot(slot_of(r))
                } else {
                    Target::Outward(external.iter().position(|&e| e == r).unwrap())
                }
            })
            .collect();
        refs.push((slots.len(), targets));
        slots.push(Slot::Constraint(ci.kind));
    }
    let inward: Vec<usize> = exposed.iter().map(|&p| slot_of(p)).collect();
    let n_p = sketch.primitives.len();
    let mut elements: Vec<usize> = prims.to_vec();
    elements.extend(cons.iter().map(|&c| n_p + c));
    elements.sort_unstable();
    Some(Occurrence {
        concept: ConceptType::hard(k_l0, k_arg, &slots, &refs, &inward),
        elements,
        inward: exposed.len(),
        outward: external.len(),
    })
}

/// Emits, for each connected primitive subset in BFS order, the closed variant
/// (constraints entirely inside) and the open variant (all touching constraints).
pub fn enumerate_candidates(sketch: &SketchGraph, opts: &EnumerateOptions) -> Vec<Occurrence> {
    let n_p = sketch.primitives.len();
    let adj = adjacency(sketch);
    let mut out = Vec::new();
    let mut member = vec![false; n_p];
    let mut level: BTreeSet<Vec<usize>> = (0..n_p).map(|p| vec![p]).collect();
    let mut visited = 0;
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for prims in &level {
            if visited >= opts.budget {
                return out;
            }
            visited += 1;
            for &p in prims {
                member[p] = true;
            }
            let (closed, open) = touching(sketch, &adj, prims, &member);
            out.extend(occurrence(sketch, &adj, prims, &closed, &member, opts.k_l0, opts.k_arg));
            if open.len() != closed.len() {
                out.extend(occurrence(sketch, &adj, prims, &open, &member, opts.k_l0, opts.k_arg));
            }
            if prims.len() + closed.len() < opts.k_l0 {
                for &p in prims {
                    for &q in &adj.neighbors[p] {
                        if !member[q] {
                            let mut grown = prims.clone();
                            let at = grown.partition_point(|&x| x < q);
                            grown.insert(at, q);
                            next.insert(grown);
                        }
                    }
                }
            }
            for &p in prims {
                member[p] = false;
            }
        }
        level = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn closed_rectangle_is_a_candidate() {
        let s = synth::rectangle_sketch();
        let occ = enumerate_candidates(&s, &EnumerateOptions::default());
        let full: Vec<usize> = (0..s.element_count()).collect();
        let rect = occ.iter().find(|o| o.elements == full).expect("whole rectangle");
        assert_eq!((rect.inward, rect.outward), (0, 0));
    }

    #[test]
    fn primitive_with_three_exposed_neighbours_is_rejected() {
        use crate::sketch::{ConstraintInstance, ConstraintKind, PrimitiveInstance, PrimitiveKind};
        let line = || PrimitiveInstance::new(PrimitiveKind::Line, vec![0, 0, 10, 10]);
        let s = SketchGraph::new(
            vec![line(), line(), line(), line()],
            (1..4).map(|i| ConstraintInstance::new(ConstraintKind::Parallel, vec![0, i])).collect(),
        );
        let occ = enumerate_candidates(&s, &EnumerateOptions::default());
        assert!(occ.iter().all(|o| o.outward <= 2 && o.inward <= 2));
        assert!(!occ.iter().any(|o| o.elements == vec![0, 4, 5, 6]));
    }
}
