//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sketch_concepts::concept::{ConceptType, SketchDecomposition, Slot, Target};
use sketch_concepts::sketch::{ConstraintKind, PrimitiveKind};

pub const K: usize = 12;
pub const KA: usize = 2;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exhaustive isomorphism test: slot bijections respecting kinds, outward
/// argument relabelings, and inward exposure compared as multisets.
pub fn isomorphic(a: &ConceptType, b: &ConceptType) -> bool {
    if a.k_l0() != b.k_l0() || a.k_arg != b.k_arg {
        return false;
    }
    let used_a: Vec<usize> = (0..a.k_l0()).filter(|&s| !a.slots[s].is_null()).collect();
    let used_b: Vec<usize> = (0..b.k_l0()).filter(|&s| !b.slots[s].is_null()).collect();
    let mut ka: Vec<Slot> = used_a.iter().map(|&s| a.slots[s]).collect();
    let mut kb: Vec<Slot> = used_b.iter().map(|&s| b.slots[s]).collect();
    ka.sort();
    kb.sort();
    if ka != kb {
        return false;
    }
    // Primitives first so constraint targets are mapped when the constraint is.
    let mut order = used_a.clone();
    order.sort_by_key(|&s| matches!(a.slots[s], Slot::Constraint(_)));
    for sigma in permutations(a.k_arg) {
        let mut pi = vec![usize::MAX; a.k_l0()];
        let mut taken = vec![false; b.k_l0()];
        if extend(a, b, &order, 0, &sigma, &mut pi, &mut taken) {
            return true;
        }
    }
    false
}

fn map_target(t: Option<Target>, pi: &[usize], sigma: &[usize]) -> Option<Target> {
    t.map(|t| match t {
        Target::Slot(x) => Target::Slot(pi[x]),
        Target::Outward(o) => Target::Outward(sigma[o]),
    })
}

fn extend(a: &ConceptType, b: &ConceptType, order: &[usize], i: usize, sigma: &[usize], pi: &mut [usize], taken: &mut [bool]) -> bool {
    if i == order.len() {
        let mut ea: Vec<usize> = (0..a.k_arg).filter_map(|x| a.inward_target(x)).map(|s| pi[s]).collect();
        let mut eb: Vec<usize> = (0..b.k_arg).filter_map(|x| b.inward_target(x)).collect();
        ea.sort_unstable();
        eb.sort_unstable();
        return ea == eb;
    }
    let s = order[i];
    for w in 0..b.k_l0() {
        if taken[w] || b.slots[w] != a.slots[s] {
            continue;
        }
        pi[s] = w;
        if matches!(a.slots[s], Slot::Constraint(_)) {
            let ok = (0..a.slots[s].arity()).all(|r| map_target(a.ref_target(s, r), pi, sigma) == b.ref_target(w, r));
            if !ok {
                continue;
            }
        }
        taken[w] = true;
        if extend(a, b, order, i + 1, sigma, pi, taken) {
            return true;
        }
        taken[w] = false;
    }
    pi[s] = usize::MAX;
    false
}

const PRIMS: [PrimitiveKind; 2] = [PrimitiveKind::Line, PrimitiveKind::Circle];
const CONS: [ConstraintKind; 4] =
    [ConstraintKind::Coincident, ConstraintKind::Parallel, ConstraintKind::Horizontal, ConstraintKind::Tangent];

/// Small random hard concept over a narrow alphabet, so that distinct draws
/// are often isomorphic.
pub fn random_concept(rng: &mut ChaCha8Rng, max_prims: usize, max_cons: usize) -> ConceptType {
    let n_p = rng.gen_range(1..=max_prims);
    let n_c = rng.gen_range(1..=max_cons);
    let mut slots: Vec<Slot> = (0..n_p).map(|_| Slot::Primitive(*PRIMS.choose(rng).unwrap())).collect();
    let mut refs = Vec::new();
    for c in 0..n_c {
        let kind = *CONS.choose(rng).unwrap();
        slots.push(Slot::Constraint(kind));
        let targets = (0..kind.arity())
            .map(|_| if rng.gen_bool(0.2) { Target::Outward(rng.gen_range(0..KA)) } else { Target::Slot(rng.gen_range(0..n_p)) })
            .collect();
        refs.push((n_p + c, targets));
    }
    let inward: Vec<usize> = (0..rng.gen_range(0..=KA)).map(|_| rng.gen_range(0..n_p)).collect();
    ConceptType::hard(K, KA, &slots, &refs, &inward)
}

/// The same concept with slots moved by a random permutation of all `k` positions
/// and outward arguments relabeled.
pub fn permuted(t: &ConceptType, rng: &mut ChaCha8Rng) -> ConceptType {
    let k = t.k_l0();
    let mut pi: Vec<usize> = (0..k).collect();
    pi.shuffle(rng);
    let mut sigma: Vec<usize> = (0..t.k_arg).collect();
    sigma.shuffle(rng);
    let mut out = ConceptType::null(k, t.k_arg);
    for s in 0..k {
        out.slots[pi[s]] = t.slots[s];
    }
    for s in t.constraint_slots() {
        for r in 0..t.slots[s].arity() {
            if let Some(tg) = map_target(t.ref_target(s, r), &pi, &sigma) {
                out.bind_ref(pi[s], r, tg);
            }
        }
    }
    let mut inward: Vec<usize> = (0..t.k_arg).filter_map(|a| t.inward_target(a)).map(|s| pi[s]).collect();
    inward.shuffle(rng);
    for (a, s) in inward.into_iter().enumerate() {
        out.bind_inward(a, s);
    }
    out
}

/// Resolves every reference of a hard decomposition by walking the argument
/// graph one hop: slot targets stay inside the instance, outward arguments
/// follow their routing to the receiving instance's inward binding.
pub fn walk_references(d: &SketchDecomposition, types: &[&ConceptType]) -> BTreeMap<(usize, usize), usize> {
    let (k, ka) = (d.k_l0, d.k_arg);
    let mut out = BTreeMap::new();
    for (i, t) in types.iter().enumerate() {
        for s in t.constraint_slots() {
            for r in 0..t.slots[s].arity() {
                let row = i * 2 * k + 2 * s + r;
                match t.ref_target(s, r) {
                    Some(Target::Slot(x)) => {
                        out.insert((row, i * k + x), 1);
                    }
                    Some(Target::Outward(a)) => {
                        for j in 0..types.len() {
                            for b in 0..ka {
                                if j != i && d.cross.get(i * ka + a, j * ka + b) == 1.0 {
                                    if let Some(y) = types[j].inward_target(b) {
                                        out.insert((row, j * k + y), 1);
                                    }
                                }
                            }
                        }
                    }
                    None => {}
                }
            }
        }
    }
    out
}

/// Minimum-cost assignment of every row to a distinct column by trying all injections.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                go(cost, row + 1, used, acc + cost[row][c], best);
                used[c] = false;
            }
        }
    }
    let cols = cost.first().map_or(0, Vec::len);
    let mut best = f64::INFINITY;
    go(cost, 0, &mut vec![false; cols], 0.0, &mut best);
    best
}

pub fn floor_log(p: f64) -> f64 {
    -(p.max(1e-9)).ln()
}
