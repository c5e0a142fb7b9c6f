//! Backtracking subgraph matching of concept structures against sketches.

use crate::concept::{ConceptType, Slot, Target};
use crate::sketch::{ElementKind, SketchGraph};

use super::enumerate::{adjacency, Adjacency};

/// Placement of a concept inside a sketch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    /// Sketch element per concept slot (`None` for Null slots); primitives are
    /// primitive indices, constraints are constraint indices.
    pub slots: Vec<Option<usize>>,
    /// Sketch primitive bound to each outward argument.
    pub outward: Vec<Option<usize>>,
}

impl Embedding {
    /// Element ids (`n_p + c` for constraints) covered by the placement.
    pub fn element_ids(&self, t: &ConceptType, n_p: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(s, e)| {
                e.map(|e| if matches!(t.slots[s], Slot::Constraint(_)) { n_p + e } else { e })
            })
            .collect();
        ids.sort_unstable();
        ids
    }
}

struct Anchor {
    constraint_slot: usize,
    own_pos: usize,
    other_slot: usize,
    other_pos: usize,
}

/// Precomputed search plan for one concept.
pub struct Pattern<'a> {
    t: &'a ConceptType,
    prim_order: Vec<usize>,
    anchors: Vec<Option<Anchor>>,
    /// Constraint slots whose slot targets are all assigned once `prim_order[i]` is.
    completes: Vec<Vec<usize>>,
    cons_slots: Vec<usize>,
    in_degree: Vec<usize>,
    exposed: Vec<bool>,
    kind_counts: Vec<(ElementKind, usize)>,
    pub(crate) targets: Vec<Vec<Option<Target>>>,
}

impl<'a> Pattern<'a> {
    pub fn new(t: &'a ConceptType) -> Self {
        let k = t.k_l0();
        let targets: Vec<Vec<Option<Target>>> = (0..k).map(|s| t.ref_targets(s)).collect();
        let prims: Vec<usize> = t.primitive_slots().collect();
        let cons_slots: Vec<usize> = t.constraint_slots().collect();
        let mut in_degree = vec![0; k];
        for &c in &cons_slots {
            for tg in targets[c].iter().flatten() {
                if let Target::Slot(x) = tg {
                    in_degree[*x] += 1;
                }
            }
        }
        let exposed = t.inward_exposure().into_iter().map(|e| e > 0).collect();

        let mut placed = vec![false; k];
        let mut prim_order = Vec::new();
        let mut anchors = Vec::new();
        while prim_order.len() < prims.len() {
            let mut found = None;
            'search: for &c in &cons_slots {
                for (pos, tg) in targets[c].iter().enumerate() {
                    let Some(Target::Slot(x)) = *tg else { continue };
                    if placed[x] {
                        continue;
                    }
                    for (opos, otg) in targets[c].iter().enumerate() {
                        if let Some(Target::Slot(y)) = *otg {
                            if placed[y] {
                                found = Some((x, Anchor { constraint_slot: c, own_pos: pos, other_slot: y, other_pos: opos }));
                                break 'search;
                            }
                        }
                    }
                }
            }
            let (x, anchor) = match found {
                Some((x, a)) => (x, Some(a)),
                None => (*prims.iter().find(|&&p| !placed[p]).unwrap(), None),
            };
            placed[x] = true;
            prim_order.push(x);
            anchors.push(anchor);
        }
        let position: Vec<usize> = {
            let mut pos = vec![usize::MAX; k];
            for (i, &x) in prim_order.iter().enumerate() {
                pos[x] = i;
            }
            pos
        };
        let mut completes = vec![Vec::new(); prim_order.len()];
        for &c in &cons_slots {
            let last = targets[c]
                .iter()
                .filter_map(|tg| match tg {
                    Some(Target::Slot(x)) => Some(position[*x]),
                    _ => None,
                })
                .max();
            if let Some(i) = last {
                completes[i].push(c);
            }
        }
        let mut kind_counts: Vec<(ElementKind, usize)> = Vec::new();
        for s in &t.slots {
            let kind = match *s {
                Slot::Null => continue,
                Slot::Primitive(p) => ElementKind::Primitive(p),
                Slot::Constraint(c) => ElementKind::Constraint(c),
            };
            match kind_counts.iter_mut().find(|(k, _)| *k == kind) {
                Some((_, n)) => *n += 1,
                None => kind_counts.push((kind, 1)),
            }
        }
        Self { t, prim_order, anchors, completes, cons_slots, in_degree, exposed, kind_counts, targets }
    }

    pub fn concept(&self) -> &ConceptType {
        self.t
    }

    /// Element-kind multiset; a cheap necessary condition for a match.
    pub fn kind_counts(&self) -> &[(ElementKind, usize)] {
        &self.kind_counts
    }
}

/// Sketch-side state shared across searches.
pub struct SketchIndex<'s> {
    pub sketch: &'s SketchGraph,
    pub(crate) adj: Adjacency,
}

impl<'s> SketchIndex<'s> {
    pub fn new(sketch: &'s SketchGraph) -> Self {
        Self { sketch, adj: adjacency(sketch) }
    }

    /// Uncovered element count per kind.
    pub fn kind_histogram(&self, covered: &[bool]) -> [usize; ElementKind::COUNT] {
        let mut h = [0; ElementKind::COUNT];
        let n_p = self.sketch.primitives.len();
        for (i, p) in self.sketch.primitives.iter().enumerate() {
            if !covered[i] {
                h[ElementKind::Primitive(p.kind).index()] += 1;
            }
        }
        for (i, c) in self.sketch.constraints.iter().enumerate() {
            if !covered[n_p + i] {
                h[ElementKind::Constraint(c.kind).index()] += 1;
            }
        }
        h
    }
}

struct State<'p, 's> {
    pat: &'p Pattern<'p>,
    idx: &'s SketchIndex<'s>,
    covered: &'s [bool],
    n_p: usize,
    slot_map: Vec<Option<usize>>,
    prim_used: Vec<bool>,
    cons_used: Vec<bool>,
    outward: Vec<Option<usize>>,
}

impl State<'_, '_> {
    fn prim_ok(&self, x: usize, p: usize) -> bool {
        if self.prim_used[p] || self.covered[p] {
            return false;
        }
        let Slot::Primitive(kind) = self.pat.t.slots[x] else { return false };
        if self.idx.sketch.primitives[p].kind != kind {
            return false;
        }
        let deg = self.idx.adj.incidence[p].len();
        if self.pat.exposed[x] {
            deg >= self.pat.in_degree[x]
        } else {
            deg == self.pat.in_degree[x]
        }
    }

    /// Whether sketch constraint `c` can fill constraint slot `cs` given current bindings.
    fn constraint_ok(&self, cs: usize, c: usize) -> bool {
        if self.cons_used[c] || self.covered[self.n_p + c] {
            return false;
        }
        let Slot::Constraint(kind) = self.pat.t.slots[cs] else { return false };
        let sc = &self.idx.sketch.constraints[c];
        if sc.kind != kind {
            return false;
        }
        let mut tentative: Vec<(usize, usize)> = Vec::new();
        for (r, tg) in self.pat.targets[cs].iter().enumerate() {
            let q = sc.refs[r];
            match tg {
                Some(Target::Slot(x)) => {
                    if self.slot_map[*x] != Some(q) {
                        return false;
                    }
                }
                Some(Target::Outward(a)) => {
                    if self.prim_used[q] {
                        return false;
                    }
                    let bound = self.outward[*a].or_else(|| tentative.iter().find(|(b, _)| b == a).map(|&(_, p)| p));
                    match bound {
                        Some(p) if p != q => return false,
                        Some(_) => {}
                        None => {
                            let taken = self.outward.iter().enumerate().any(|(b, o)| b != *a && *o == Some(q))
                                || tentative.iter().any(|&(b, p)| b != *a && p == q);
                            if taken {
                                return false;
                            }
                            tentative.push((*a, q));
                        }
                    }
                }
                None => return false,
            }
        }
        true
    }

    fn exists_constraint(&self, cs: usize) -> bool {
        self.constraint_candidates(cs).into_iter().any(|c| self.constraint_ok(cs, c))
    }

    fn constraint_candidates(&self, cs: usize) -> Vec<usize> {
        let anchor = self.pat.targets[cs].iter().enumerate().find_map(|(r, tg)| match tg {
            Some(Target::Slot(x)) => Some((r, *x)),
            _ => None,
        });
        match anchor {
            Some((r, x)) => {
                let p = self.slot_map[x].expect("anchor primitive assigned");
                self.idx.adj.incidence[p].iter().filter(|&&(_, pos)| pos == r).map(|&(c, _)| c).collect()
            }
            None => (0..self.idx.sketch.constraints.len()).collect(),
        }
    }

    fn prims(&mut self, i: usize) -> bool {
        if i == self.pat.prim_order.len() {
            return self.constraints(0);
        }
        let x = self.pat.prim_order[i];
        let candidates: Vec<usize> = match &self.pat.anchors[i] {
            Some(a) => {
                let y = self.slot_map[a.other_slot].unwrap();
                let Slot::Constraint(kind) = self.pat.t.slots[a.constraint_slot] else { unreachable!() };
                let mut v: Vec<usize> = self.idx.adj.incidence[y]
                    .iter()
                    .filter(|&&(c, pos)| pos == a.other_pos && self.idx.sketch.constraints[c].kind == kind)
                    .map(|&(c, _)| self.idx.sketch.constraints[c].refs[a.own_pos])
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            None => (0..self.n_p).collect(),
        };
        for p in candidates {
            if !self.prim_ok(x, p) {
                continue;
            }
            self.slot_map[x] = Some(p);
            self.prim_used[p] = true;
            let feasible = self.pat.completes[i].iter().all(|&cs| self.exists_constraint(cs));
            if feasible && self.prims(i + 1) {
                return true;
            }
            self.slot_map[x] = None;
            self.prim_used[p] = false;
        }
        false
    }

    fn constraints(&mut self, i: usize) -> bool {
        if i == self.pat.cons_slots.len() {
            return true;
        }
        let cs = self.pat.cons_slots[i];
        for c in self.constraint_candidates(cs) {
            if !self.constraint_ok(cs, c) {
                continue;
            }
            let saved = self.outward.clone();
            for (r, tg) in self.pat.targets[cs].iter().enumerate() {
                if let Some(Target::Outward(a)) = tg {
                    self.outward[*a] = Some(self.idx.sketch.constraints[c].refs[r]);
                }
            }
            self.slot_map[cs] = Some(c);
            self.cons_used[c] = true;
            if self.constraints(i + 1) {
                return true;
            }
            self.slot_map[cs] = None;
            self.cons_used[c] = false;
            self.outward = saved;
        }
        false
    }
}

/// First placement of `pat` on elements not marked in `covered` (indexed by element id).
pub fn find_embedding(pat: &Pattern<'_>, idx: &SketchIndex<'_>, covered: &[bool]) -> Option<Embedding> {
    let n_p = idx.sketch.primitives.len();
    let t = pat.t;
    if t.is_null() {
        return None;
    }
    let hist = idx.kind_histogram(covered);
    if pat.kind_counts.iter().any(|(k, n)| hist[k.index()] < *n) {
        return None;
    }
    let mut st = State {
        pat,
        idx,
        covered,
        n_p,
        slot_map: vec![None; t.k_l0()],
        prim_used: vec![false; n_p],
        cons_used: vec![false; idx.sketch.constraints.len()],
        outward: vec![None; t.k_arg],
    };
    st.prims(0).then_some(Embedding { slots: st.slot_map, outward: st.outward })
}

/// Greedily places `pat` as many times as possible, marking covered elements.
pub fn cover_all(pat: &Pattern<'_>, idx: &SketchIndex<'_>, covered: &mut [bool]) -> Vec<Embedding> {
    let n_p = idx.sketch.primitives.len();
    let mut out = Vec::new();
    while let Some(e) = find_embedding(pat, idx, covered) {
        for id in e.element_ids(pat.t, n_p) {
            covered[id] = true;
        }
        out.push(e);
    }
    out
}
