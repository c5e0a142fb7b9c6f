//! Canonical labeling of concept structures.
//!
//! A concept is viewed as a small directed graph: one node per non-Null slot and
//! per used outward argument, with constraint → target edges labeled by the set
//! of reference positions. Colors are refined until stable and ties are broken
//! by individualization; the lexicographically smallest adjacency encoding over
//! all leaves is the key, and its node order yields the canonical slot order.

use crate::concept::{ConceptType, Slot, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NodeLabel {
    Primitive { kind: usize, exposure: usize },
    Constraint { kind: usize },
    Outward,
}

impl NodeLabel {
    fn code(self) -> u32 {
        match self {
            Self::Primitive { kind, exposure } => (kind * 8 + exposure) as u32,
            Self::Constraint { kind } => 100 + kind as u32,
            Self::Outward => 200,
        }
    }
}

struct Graph {
    labels: Vec<NodeLabel>,
    /// `edges[u][v]` = bitmask of reference positions of constraint `u` pointing at `v`.
    edges: Vec<Vec<u8>>,
    /// Slot of each non-argument node, or the outward argument index.
    origin: Vec<Target>,
}

fn build_graph(t: &ConceptType) -> Graph {
    let exposure = t.inward_exposure();
    let mut labels = Vec::new();
    let mut origin = Vec::new();
    let mut node_of_slot = vec![usize::MAX; t.k_l0()];
    for (s, slot) in t.slots.iter().enumerate() {
        let label = match *slot {
            Slot::Null => continue,
            Slot::Primitive(p) => NodeLabel::Primitive { kind: p.index(), exposure: exposure[s] },
            Slot::Constraint(c) => NodeLabel::Constraint { kind: c.index() },
        };
        node_of_slot[s] = labels.len();
        labels.push(label);
        origin.push(Target::Slot(s));
    }
    let mut node_of_arg = vec![usize::MAX; t.k_arg];
    let mut refs = Vec::new();
    for s in t.constraint_slots() {
        for (r, tg) in t.ref_targets(s).into_iter().enumerate() {
            let Some(tg) = tg else { continue };
            if let Target::Outward(a) = tg {
                if node_of_arg[a] == usize::MAX {
                    node_of_arg[a] = labels.len();
                    labels.push(NodeLabel::Outward);
                    origin.push(Target::Outward(a));
                }
            }
            refs.push((s, r, tg));
        }
    }
    let n = labels.len();
    let mut edges = vec![vec![0u8; n]; n];
    for (s, r, tg) in refs {
        let v = match tg {
            Target::Slot(x) => node_of_slot[x],
            Target::Outward(a) => node_of_arg[a],
        };
        if v != usize::MAX {
            edges[node_of_slot[s]][v] |= 1 << r;
        }
    }
    Graph { labels, edges, origin }
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut uniq: Vec<T> = sigs.to_vec();
    uniq.sort();
    uniq.dedup();
    sigs.iter().map(|s| uniq.binary_search(s).unwrap() as u32).collect()
}

fn class_count(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn refine(g: &Graph, mut colors: Vec<u32>) -> Vec<u32> {
    let n = colors.len();
    let mut classes = class_count(&colors);
    loop {
        let sigs: Vec<(u32, Vec<(u8, u32)>, Vec<(u8, u32)>)> = (0..n)
            .map(|v| {
                let mut out: Vec<(u8, u32)> =
                    (0..n).filter(|&u| g.edges[v][u] != 0).map(|u| (g.edges[v][u], colors[u])).collect();
                let mut inc: Vec<(u8, u32)> =
                    (0..n).filter(|&u| g.edges[u][v] != 0).map(|u| (g.edges[u][v], colors[u])).collect();
                out.sort_unstable();
                inc.sort_unstable();
                (colors[v], out, inc)
            })
            .collect();
        let next = rank(&sigs);
        let c = class_count(&next);
        colors = next;
        if c == classes {
            return colors;
        }
        classes = c;
    }
}

fn encode(g: &Graph, order: &[usize]) -> Vec<u32> {
    let mut code = Vec::with_capacity(1 + order.len() * (order.len() + 1));
    code.push(order.len() as u32);
    code.extend(order.iter().map(|&v| g.labels[v].code()));
    for &u in order {
        code.extend(order.iter().map(|&v| u32::from(g.edges[u][v])));
    }
    code
}

fn search(g: &Graph, colors: Vec<u32>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
    let colors = refine(g, colors);
    let n = colors.len();
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, &c) in colors.iter().enumerate() {
        by_color[c as usize].push(v);
    }
    match by_color.iter().position(|cell| cell.len() > 1) {
        None => {
            let order: Vec<usize> = by_color.into_iter().flatten().collect();
            let code = encode(g, &order);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, order));
            }
        }
        Some(ci) => {
            for &v in &by_color[ci] {
                let c = ci as u32;
                let indiv: Vec<u32> =
                    colors.iter().enumerate().map(|(u, &x)| 2 * x + u32::from(x == c && u != v)).collect();
                search(g, rank(&indiv), best);
            }
        }
    }
}

/// Key string and canonical node order of a structure.
fn canonical_order(t: &ConceptType) -> (Graph, Vec<u32>, Vec<usize>) {
    let g = build_graph(t);
    let initial = rank(&g.labels);
    let mut best = None;
    search(&g, initial, &mut best);
    let (code, order) = best.unwrap_or_default();
    (g, code, order)
}

/// Byte key invariant under slot and argument permutation.
pub fn canonical_key(t: &ConceptType) -> Vec<u8> {
    let (_, code, _) = canonical_order(t);
    let mut key = Vec::with_capacity(code.len() + 2);
    key.push(t.k_l0() as u8);
    key.push(t.k_arg as u8);
    key.extend(code.iter().map(|&c| c as u8));
    key
}

/// Key plus an equivalent concept with slots and arguments in canonical order.
pub fn canonicalize(t: &ConceptType) -> (Vec<u8>, ConceptType) {
    let key = canonical_key(t);
    let (g, _, order) = canonical_order(t);
    let k = t.k_l0();
    let mut slot_map = vec![usize::MAX; k];
    let mut arg_map = vec![usize::MAX; t.k_arg];
    let mut slots = Vec::new();
    let mut args = 0;
    for &v in &order {
        match g.origin[v] {
            Target::Slot(s) => {
                slot_map[s] = slots.len();
                slots.push(t.slots[s]);
            }
            Target::Outward(a) => {
                arg_map[a] = args;
                args += 1;
            }
        }
    }
    let mut refs = Vec::new();
    for s in t.constraint_slots() {
        let targets = t
            .ref_targets(s)
            .into_iter()
            .map(|tg| match tg {
                Some(Target::Slot(x)) => Target::Slot(slot_map[x]),
                Some(Target::Outward(a)) => Target::Outward(arg_map[a]),
                None => Target::Slot(slot_map[s]),
            })
            .collect();
        refs.push((slot_map[s], targets));
    }
    let mut exposed: Vec<usize> = Vec::new();
    for a in 0..t.k_arg {
        if let Some(s) = t.inward_target(a) {
            exposed.push(slot_map[s]);
        }
    }
    exposed.sort_unstable();
    (key, ConceptType::hard(k, t.k_arg, &slots, &refs, &exposed))
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Pairwise isomorphism by exhaustive search over kind-respecting bijections.
    pub fn isomorphic(a: &ConceptType, b: &ConceptType) -> bool {
        let (ga, gb) = (build_graph(a), build_graph(b));
        let n = ga.labels.len();
        if n != gb.labels.len() || a.k_l0() != b.k_l0() || a.k_arg != b.k_arg {
            return false;
        }
        let mut la = ga.labels.clone();
        let mut lb = gb.labels.clone();
        la.sort();
        lb.sort();
        if la != lb {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(ga: &Graph, gb: &Graph, v: usize, map: &mut [usize], used: &mut [bool]) -> bool {
            let n = map.len();
            if v == n {
                return true;
            }
            for w in 0..n {
                if used[w] || ga.labels[v] != gb.labels[w] {
                    continue;
                }
                let ok = (0..v).all(|u| {
                    ga.edges[u][v] == gb.edges[map[u]][w] && ga.edges[v][u] == gb.edges[w][map[u]]
                }) && ga.edges[v][v] == gb.edges[w][w];
                if ok {
                    map[v] = w;
                    used[w] = true;
                    if go(ga, gb, v + 1, map, used) {
                        return true;
                    }
                    used[w] = false;
                }
            }
            false
        }
        go(&ga, &gb, 0, &mut map, &mut used)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{K_ARG, K_L0};
    use crate::sketch::{ConstraintKind, PrimitiveKind};

    fn rect(fourth: ConstraintKind) -> ConceptType {
        let l = Slot::Primitive(PrimitiveKind::Line);
        let c = |k| Slot::Constraint(k);
        use ConstraintKind::*;
        ConceptType::hard(
            K_L0,
            K_ARG,
            &[l, l, l, l, c(Coincident), c(Coincident), c(Coincident), c(Coincident), c(Perpendicular), c(Parallel), c(fourth)],
            &[
                (4, vec![Target::Slot(0), Target::Slot(1)]),
                (5, vec![Target::Slot(1), Target::Slot(2)]),
                (6, vec![Target::Slot(2), Target::Slot(3)]),
                (7, vec![Target::Slot(3), Target::Slot(0)]),
                (8, vec![Target::Slot(0), Target::Slot(1)]),
                (9, vec![Target::Slot(0), Target::Slot(2)]),
                (10, vec![Target::Slot(1), Target::Slot(3)]),
            ],
            &[],
        )
    }

    #[test]
    fn distance_and_equal_rectangles_differ() {
        assert_ne!(canonical_key(&rect(ConstraintKind::Distance)), canonical_key(&rect(ConstraintKind::Equal)));
    }

    #[test]
    fn canonical_form_has_same_key_and_is_valid() {
        let t = rect(ConstraintKind::Distance);
        let (key, c) = canonicalize(&t);
        assert!(c.is_valid(), "{:?}", c.validate());
        assert_eq!(canonical_key(&c), key);
        assert!(oracle::isomorphic(&t, &c));
    }
}
