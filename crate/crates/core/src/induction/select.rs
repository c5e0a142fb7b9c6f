//! Greedy library selection from pooled candidates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::canonical::canonical_key;
use super::enumerate::{enumerate_candidates, EnumerateOptions, DEFAULT_BUDGET};
use crate::concept::{concept_gain, ConceptLibrary, ConceptType, Target, K_ARG, K_L0};
use crate::error::{Error, Result};
use crate::sketch::SketchGraph;

#[derive(Debug, Clone, Copy)]
pub struct InduceOptions {
    pub max_size: usize,
    pub lambda_bias: f64,
    pub k_l0: usize,
    pub k_arg: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for InduceOptions {
    fn default() -> Self {
        Self { max_size: 1000, lambda_bias: 0.5, k_l0: K_L0, k_arg: K_ARG, budget: DEFAULT_BUDGET, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectedConcept {
    pub index: usize,
    pub gain: f64,
    pub count: usize,
    pub elements: usize,
    pub boundary_refs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductionReport {
    pub sketches: usize,
    pub candidates: usize,
    pub occurrences: usize,
    pub selected: Vec<SelectedConcept>,
}

struct Candidate {
    key: Vec<u8>,
    concept: ConceptType,
    elements: usize,
    boundary: usize,
    /// `(sketch, sorted element ids)`, grouped by sketch in corpus order.
    occurrences: Vec<(usize, Vec<usize>)>,
}

/// Order-sensitive encoding used to memoize canonical keys within a sketch.
fn raw_code(t: &ConceptType) -> Vec<u8> {
    let mut code: Vec<u8> = t.slots.iter().map(|s| s.type_index() as u8).collect();
    for s in t.constraint_slots() {
        for tg in t.ref_targets(s) {
            code.push(match tg {
                Some(Target::Slot(x)) => x as u8,
                Some(Target::Outward(a)) => 64 + a as u8,
                None => 255,
            });
        }
    }
    for a in 0..t.k_arg {
        code.push(t.inward_target(a).map_or(255, |s| s as u8));
    }
    code
}

type SketchCandidates = Vec<(Vec<u8>, Option<ConceptType>, Vec<usize>)>;

fn sketch_candidates(sketch: &SketchGraph, opts: &EnumerateOptions) -> SketchCandidates {
    let mut cache: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let mut out = Vec::new();
    for occ in enumerate_candidates(sketch, opts) {
        let raw = raw_code(&occ.concept);
        let key = cache.entry(raw).or_insert_with(|| canonical_key(&occ.concept)).clone();
        let first = seen.insert(key.clone(), ()).is_none();
        out.push((key, first.then_some(occ.concept), occ.elements));
    }
    out
}

/// Disjoint, uncovered occurrences taken greedily in order.
fn effective(c: &Candidate, covered: &[Vec<bool>]) -> Vec<usize> {
    let mut taken = Vec::new();
    let mut claimed: Vec<usize> = Vec::new();
    let mut current = usize::MAX;
    for (i, (s, elems)) in c.occurrences.iter().enumerate() {
        if *s != current {
            current = *s;
            claimed.clear();
        }
        if elems.iter().any(|&e| covered[*s][e] || claimed.contains(&e)) {
            continue;
        }
        claimed.extend_from_slice(elems);
        taken.push(i);
    }
    taken
}

#[derive(PartialEq)]
struct HeapItem {
    gain: f64,
    count: usize,
    candidate: usize,
    key: Vec<u8>,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .partial_cmp(&other.gain)
            .unwrap_or(Ordering::Equal)
            .then(self.count.cmp(&other.count))
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn induce_library(sketches: &[SketchGraph], opts: &InduceOptions) -> Result<(ConceptLibrary, InductionReport)> {
    if sketches.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let eopts = EnumerateOptions { k_l0: opts.k_l0, k_arg: opts.k_arg, budget: opts.budget };
    let per_sketch: Vec<SketchCandidates> = sketches.par_iter().map(|s| sketch_candidates(s, &eopts)).collect();

    let mut pool: BTreeMap<Vec<u8>, Candidate> = BTreeMap::new();
    let mut occurrences = 0;
    for (si, found) in per_sketch.into_iter().enumerate() {
        for (key, concept, elems) in found {
            occurrences += 1;
            match pool.get_mut(&key) {
                Some(c) => c.occurrences.push((si, elems)),
                None => {
                    let concept = concept.expect("first occurrence carries its concept");
                    pool.insert(
                        key.clone(),
                        Candidate {
                            key,
                            elements: concept.element_count(),
                            boundary: concept.boundary_refs(),
                            concept,
                            occurrences: vec![(si, elems)],
                        },
                    );
                }
            }
        }
    }
    let candidates: Vec<Candidate> = pool.into_values().collect();
    log::info!("{} candidates from {} occurrences over {} sketches", candidates.len(), occurrences, sketches.len());

    let mut lib = ConceptLibrary::builtin(opts.k_l0, opts.k_arg, opts.lambda_bias);
    lib.seed = opts.seed;
    let mut covered: Vec<Vec<bool>> = sketches.iter().map(|s| vec![false; s.element_count()]).collect();
    let score = |c: &Candidate, n: usize| concept_gain(n, c.elements, c.boundary, opts.lambda_bias);

    let mut heap: BinaryHeap<HeapItem> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = effective(c, &covered).len();
            HeapItem { gain: score(c, n), count: n, candidate: i, key: c.key.clone() }
        })
        .filter(|h| h.gain > 0.0)
        .collect();

    let mut selected = Vec::new();
    while selected.len() < opts.max_size {
        let Some(top) = heap.pop() else { break };
        let c = &candidates[top.candidate];
        let taken = effective(c, &covered);
        let fresh = HeapItem { gain: score(c, taken.len()), count: taken.len(), candidate: top.candidate, key: top.key };
        if fresh.gain <= 0.0 {
            continue;
        }
        if let Some(next) = heap.peek() {
            if fresh < *next {
                heap.push(fresh);
                continue;
            }
        }
        for &o in &taken {
            let (s, elems) = &c.occurrences[o];
            for &e in elems {
                covered[*s][e] = true;
            }
        }
        let (index, _) = lib.insert(c.concept.clone(), fresh.count);
        selected.push(SelectedConcept {
            index,
            gain: fresh.gain,
            count: fresh.count,
            elements: c.elements,
            boundary_refs: c.boundary,
        });
    }
    let report = InductionReport { sketches: sketches.len(), candidates: candidates.len(), occurrences, selected };
    Ok((lib, report))
}
