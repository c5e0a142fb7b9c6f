//! Sketch auto-completion: partial concept matches are completed with the
//! missing slots of their concept.

mod geometry;
mod partial;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

pub use partial::{remove_last, synthesize_partial, synthesize_random_partial, PartialSketch};

use crate::concept::{ConceptLibrary, ConceptType, Provenance, SketchDecomposition, Slot, Target};
use crate::error::Result;
use crate::induction::parse::{parse_sketch, priority};
use crate::induction::pattern::{cover_all, Pattern, SketchIndex};
use crate::sketch::geometry::{infer_constraint_params, Shape};
use crate::sketch::{ConstraintInstance, QuantizationSpec, SketchGraph};

#[derive(Debug, Clone, Copy)]
pub struct CompletionOptions {
    pub top_k: usize,
    pub quant: QuantizationSpec,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self { top_k: 5, quant: QuantizationSpec::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionCandidate {
    pub sketch: SketchGraph,
    pub decomposition: SketchDecomposition,
    /// Owner of every element of `sketch`, primitives first.
    pub provenance: Vec<Provenance>,
    pub score: f64,
    /// Completed library concept; `None` for the unchanged partial.
    pub concept: Option<usize>,
    pub added_primitives: Vec<usize>,
    pub added_constraints: Vec<usize>,
    /// Number of partial elements matched by the concept.
    pub matched: usize,
}

/// A concept partially embedded in the sketch.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PartialMatch {
    concept: usize,
    /// Sketch primitive or constraint per slot; `None` for missing slots.
    slots: Vec<Option<usize>>,
    outward: Vec<Option<usize>>,
}

impl PartialMatch {
    fn matched_ids(&self, t: &ConceptType, n_p: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(s, e)| e.map(|e| if matches!(t.slots[s], Slot::Constraint(_)) { n_p + e } else { e }))
            .collect();
        ids.sort_unstable();
        ids
    }

    fn missing(&self, t: &ConceptType) -> usize {
        (0..t.k_l0()).filter(|&s| !t.slots[s].is_null() && self.slots[s].is_none()).count()
    }
}

struct Matcher<'a> {
    t: &'a ConceptType,
    sketch: &'a SketchGraph,
    covered: &'a [bool],
    incidence: Vec<Vec<(usize, usize)>>,
    targets: Vec<Vec<Option<Target>>>,
    cons_slots: Vec<usize>,
    exposed: Vec<bool>,
    order: Vec<usize>,
    /// Constraint slots joining `order[i]` to earlier primitive slots.
    anchors: Vec<Vec<(usize, usize, usize, usize)>>,
}

impl<'a> Matcher<'a> {
    fn new(t: &'a ConceptType, sketch: &'a SketchGraph, covered: &'a [bool]) -> Self {
        let k = t.k_l0();
        let targets: Vec<Vec<Option<Target>>> = (0..k).map(|s| t.ref_targets(s)).collect();
        let cons_slots: Vec<usize> = t.constraint_slots().collect();
        let exposed = t.inward_exposure().into_iter().map(|e| e > 0).collect();
        Self {
            t,
            sketch,
            covered,
            incidence: sketch.incidence(),
            targets,
            cons_slots,
            exposed,
            order: Vec::new(),
            anchors: Vec::new(),
        }
    }

    /// Breadth-first order of primitive slots from `seed` through binary constraints.
    fn plan(&mut self, seed: usize) {
        let prims: Vec<usize> = self.t.primitive_slots().collect();
        let mut order = vec![seed];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for &c in &self.cons_slots {
                let tg = &self.targets[c];
                if !tg.contains(&Some(Target::Slot(x))) {
                    continue;
                }
                for t in tg.iter().flatten() {
                    if let Target::Slot(y) = *t {
                        if !order.contains(&y) {
                            order.push(y);
                        }
                    }
                }
            }
            i += 1;
        }
        for p in prims {
            if !order.contains(&p) {
                order.push(p);
            }
        }
        let anchors = order
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut out = Vec::new();
                for &c in &self.cons_slots {
                    let tg = &self.targets[c];
                    for (pos, t) in tg.iter().enumerate() {
                        if *t != Some(Target::Slot(x)) {
                            continue;
                        }
                        for (opos, ot) in tg.iter().enumerate() {
                            if let Some(Target::Slot(y)) = *ot {
                                if opos != pos && order[..i].contains(&y) {
                                    out.push((c, pos, y, opos));
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        self.order = order;
        self.anchors = anchors;
    }

    fn prim_fits(&self, x: usize, p: usize) -> bool {
        let Slot::Primitive(kind) = self.t.slots[x] else { return false };
        !self.covered[p] && self.sketch.primitives[p].kind == kind
    }

    /// Uncovered sketch constraints of `kind` whose refs agree with `fixed` `(pos, prim)` pairs.
    fn constraints_with(&self, c_slot: usize, fixed: &[(usize, usize)]) -> Vec<usize> {
        let Slot::Constraint(kind) = self.t.slots[c_slot] else { return Vec::new() };
        let n_p = self.sketch.primitives.len();
        let Some(&(pos0, p0)) = fixed.first() else { return Vec::new() };
        self.incidence[p0]
            .iter()
            .filter(|&&(c, r)| r == pos0 && !self.covered[n_p + c])
            .map(|&(c, _)| c)
            .filter(|&c| {
                let sc = &self.sketch.constraints[c];
                sc.kind == kind && fixed.iter().all(|&(pos, p)| sc.refs[pos] == p)
            })
            .collect()
    }

    fn candidates(&self, i: usize, map: &[Option<usize>], used: &[bool]) -> Vec<usize> {
        let x = self.order[i];
        let mut out: Option<Vec<usize>> = None;
        for &(c, pos, y, opos) in &self.anchors[i] {
            let Some(py) = map[y] else { continue };
            let found: Vec<usize> = self
                .constraints_with(c, &[(opos, py)])
                .into_iter()
                .map(|sc| self.sketch.constraints[sc].refs[pos])
                .filter(|&p| !used[p] && self.prim_fits(x, p))
                .collect();
            out = Some(match out {
                None => found,
                Some(prev) => prev.into_iter().filter(|p| found.contains(p)).collect(),
            });
        }
        let mut v = out.unwrap_or_default();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Maps constraint slots given a primitive assignment; `None` when a fully
    /// assigned constraint slot has no counterpart or a boundary is violated.
    fn resolve(&self, map: &[Option<usize>]) -> Option<PartialMatch> {
        let n_p = self.sketch.primitives.len();
        let mut slots = map.to_vec();
        let mut outward = vec![None; self.t.k_arg];
        let mut used: HashSet<usize> = HashSet::new();
        let image: HashSet<usize> = map.iter().flatten().copied().collect();
        for &c in &self.cons_slots {
            let tg = &self.targets[c];
            let mut fixed = Vec::new();
            let mut complete = true;
            for (pos, t) in tg.iter().enumerate() {
                match t {
                    Some(Target::Slot(x)) => match map[*x] {
                        Some(p) => fixed.push((pos, p)),
                        None => complete = false,
                    },
                    Some(Target::Outward(_)) | None => {}
                }
            }
            if !complete || fixed.is_empty() {
                continue;
            }
            let has_outward = tg.iter().any(|t| matches!(t, Some(Target::Outward(_))));
            let found = self.constraints_with(c, &fixed).into_iter().find(|sc| {
                if used.contains(sc) {
                    return false;
                }
                tg.iter().enumerate().all(|(pos, t)| match t {
                    Some(Target::Outward(a)) => {
                        let q = self.sketch.constraints[*sc].refs[pos];
                        !image.contains(&q) && outward[*a].is_none_or(|b| b == q)
                    }
                    _ => true,
                })
            });
            match found {
                Some(sc) => {
                    for (pos, t) in tg.iter().enumerate() {
                        if let Some(Target::Outward(a)) = t {
                            outward[*a] = Some(self.sketch.constraints[sc].refs[pos]);
                        }
                    }
                    used.insert(sc);
                    slots[c] = Some(sc);
                }
                None if has_outward => {}
                None => return None,
            }
        }
        if used.is_empty() {
            return None;
        }
        for x in self.t.primitive_slots() {
            let Some(p) = map[x] else { continue };
            if !self.exposed[x] && self.incidence[p].iter().any(|&(c, _)| !used.contains(&c)) {
                return None;
            }
            if self.incidence[p].iter().any(|&(c, _)| !used.contains(&c) && self.covered[n_p + c]) && !self.exposed[x] {
                return None;
            }
        }
        Some(PartialMatch { concept: usize::MAX, slots, outward })
    }

    fn search(&self, i: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, best: &mut Option<(usize, PartialMatch)>) {
        let assigned = map.iter().flatten().count();
        let bound = assigned + (self.order.len() - i) + self.cons_slots.len();
        if best.as_ref().is_some_and(|(b, _)| bound <= *b) {
            return;
        }
        if i == self.order.len() {
            if let Some(m) = self.resolve(map) {
                let size = m.slots.iter().flatten().count();
                if best.as_ref().is_none_or(|(b, _)| size > *b) {
                    *best = Some((size, m));
                }
            }
            return;
        }
        let x = self.order[i];
        for p in self.candidates(i, map, used) {
            map[x] = Some(p);
            used[p] = true;
            self.search(i + 1, map, used, best);
            used[p] = false;
            map[x] = None;
        }
        self.search(i + 1, map, used, best);
    }

    fn matches(&mut self) -> Vec<PartialMatch> {
        let mut out: Vec<PartialMatch> = Vec::new();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let n_p = self.sketch.primitives.len();
        let seeds: Vec<usize> = self.t.primitive_slots().collect();
        for s0 in seeds {
            self.plan(s0);
            for p in 0..n_p {
                if !self.prim_fits(s0, p) {
                    continue;
                }
                let mut map = vec![None; self.t.k_l0()];
                let mut used = vec![false; n_p];
                map[s0] = Some(p);
                used[p] = true;
                let mut best = None;
                self.search(1, &mut map, &mut used, &mut best);
                if let Some((_, m)) = best {
                    if m.missing(self.t) > 0 && seen.insert(m.matched_ids(self.t, n_p)) {
                        out.push(m);
                    }
                }
            }
        }
        out
    }
}

/// Partial matches of library concepts, in parse priority order.
fn partial_matches(sketch: &SketchGraph, lib: &ConceptLibrary) -> Vec<PartialMatch> {
    let idx = SketchIndex::new(sketch);
    let mut covered = vec![false; sketch.element_count()];
    let mut out = Vec::new();
    for ci in priority(lib) {
        let t = lib.get(ci).expect("priority lists library entries");
        cover_all(&Pattern::new(t), &idx, &mut covered);
        let mut m = Matcher::new(t, sketch, &covered);
        for mut pm in m.matches() {
            pm.concept = ci;
            out.push(pm);
        }
    }
    out
}

fn build(partial: &SketchGraph, t: &ConceptType, m: &PartialMatch, quant: &QuantizationSpec) -> (SketchGraph, Vec<usize>, Vec<usize>) {
    let matched: HashMap<usize, Shape> = t
        .primitive_slots()
        .filter_map(|x| m.slots[x].and_then(|p| Shape::from_primitive(&partial.primitives[p], quant)).map(|s| (x, s)))
        .collect();
    let missing: Vec<usize> = t.primitive_slots().filter(|&x| m.slots[x].is_none()).collect();
    let shapes = geometry::instantiate(t, &matched, &missing);

    let mut sketch = partial.clone();
    let mut prim_of: Vec<Option<usize>> = m.slots.clone();
    let mut added_p = Vec::new();
    for &x in &missing {
        prim_of[x] = Some(sketch.primitives.len());
        added_p.push(sketch.primitives.len());
        sketch.primitives.push(shapes[&x].to_primitive(false, quant));
    }
    let mut added_c = Vec::new();
    for c in t.constraint_slots() {
        if m.slots[c].is_some() {
            continue;
        }
        let Slot::Constraint(kind) = t.slots[c] else { continue };
        let refs: Option<Vec<usize>> = t
            .ref_targets(c)
            .into_iter()
            .take(kind.arity())
            .map(|tg| match tg? {
                Target::Slot(x) => prim_of[x],
                Target::Outward(a) => m.outward[a],
            })
            .collect();
        if let Some(refs) = refs {
            added_c.push(sketch.constraints.len());
            sketch.constraints.push(ConstraintInstance::new(kind, refs));
        }
    }
    infer_constraint_params(&mut sketch, quant);
    (sketch, added_p, added_c)
}

/// Up to `top_k` completions ranked by frequency times size of the completed
/// concept. A partial that already parses without residual elements yields
/// itself as the only candidate.
pub fn complete_sketch(partial: &SketchGraph, lib: &ConceptLibrary, opts: &CompletionOptions) -> Result<Vec<CompletionCandidate>> {
    if partial.is_empty() {
        return Ok(Vec::new());
    }
    let parsed = parse_sketch(partial, lib)?;
    if parsed.residual.is_empty() {
        return Ok(vec![CompletionCandidate {
            sketch: partial.clone(),
            decomposition: parsed.decomposition,
            provenance: parsed.provenance,
            score: 0.0,
            concept: None,
            added_primitives: Vec::new(),
            added_constraints: Vec::new(),
            matched: 0,
        }]);
    }
    let n_p = partial.primitives.len();
    let mut ranked: Vec<(f64, usize, PartialMatch)> = partial_matches(partial, lib)
        .into_iter()
        .map(|m| {
            let t = lib.get(m.concept).unwrap();
            let score = lib.entry(m.concept).unwrap().count as f64 * t.element_count() as f64;
            let matched = m.matched_ids(t, n_p).len();
            (score, matched, m)
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(b.1.cmp(&a.1))
            .then(a.2.concept.cmp(&b.2.concept))
            .then_with(|| {
                let t = lib.get(a.2.concept).unwrap();
                a.2.matched_ids(t, n_p).cmp(&b.2.matched_ids(t, n_p))
            })
    });

    let mut out = Vec::new();
    let mut produced: BTreeSet<Vec<u8>> = BTreeSet::new();
    for (score, matched, m) in ranked {
        if out.len() >= opts.top_k {
            break;
        }
        let t = lib.get(m.concept).unwrap();
        let (sketch, added_primitives, added_constraints) = build(partial, t, &m, &opts.quant);
        if !produced.insert(serde_json::to_vec(&sketch).unwrap_or_default()) {
            continue;
        }
        let parsed = parse_sketch(&sketch, lib)?;
        out.push(CompletionCandidate {
            sketch,
            decomposition: parsed.decomposition,
            provenance: parsed.provenance,
            score,
            concept: Some(m.concept),
            added_primitives,
            added_constraints,
            matched,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn completes_the_missing_frame_side() {
        let s = synth::slot_sketch();
        let lib = synth::slot_library();
        // Drop the top line (index 3) by moving it to the end first.
        let mut order: Vec<usize> = (0..s.primitives.len()).filter(|&p| p != 3).collect();
        order.push(3);
        let s = synth::reorder_primitives(&s, &order);
        let partial = synthesize_partial(&s, 1.0 / 6.0);
        assert_eq!(partial.removed_primitives.len(), 1);
        let cands = complete_sketch(&partial.sketch, &lib, &CompletionOptions::default()).unwrap();
        assert!(!cands.is_empty());
        let best = &cands[0];
        assert_eq!(best.added_primitives.len(), 1);
        assert_eq!(best.sketch.constraints.len(), s.constraints.len());
        let f = crate::eval::fscore(&best.sketch, &s, &QuantizationSpec::default());
        assert_eq!((f.primitive_f, f.constraint_f), (1.0, 1.0));
    }

    #[test]
    fn empty_sketch_has_no_candidates() {
        let cands = complete_sketch(&SketchGraph::default(), &synth::slot_library(), &CompletionOptions::default());
        assert!(cands.unwrap().is_empty());
    }

    #[test]
    fn complete_partial_returns_itself() {
        let lib = synth::slot_library();
        let s = synth::slot_sketch();
        let cands = complete_sketch(&s, &lib, &CompletionOptions::default()).unwrap();
        assert_eq!(cands.len(), 1);
        assert!(cands[0].concept.is_none());
        assert_eq!(cands[0].sketch, s);
    }
}
