//! Synthetic sketches and corpora with known structure.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concept::{
    ConceptInstance, ConceptLibrary, ConceptType, SketchDecomposition, Slot, SlotValue, Target, TypeRef, K_ARG, K_L0,
    K_QRY,
};
use crate::sketch::geometry::{infer_constraint_params, Shape};
use crate::sketch::{
    ConstraintInstance, ConstraintKind, PrimitiveInstance, PrimitiveKind, QuantizationSpec, SketchGraph,
};

fn line(q: &QuantizationSpec, a: (f64, f64), b: (f64, f64)) -> PrimitiveInstance {
    Shape::Line { start: a, end: b }.to_primitive(false, q)
}

fn constraints(list: &[(ConstraintKind, &[usize])]) -> Vec<ConstraintInstance> {
    list.iter().map(|(k, r)| ConstraintInstance::new(*k, r.to_vec())).collect()
}

/// Axis-aligned rectangle: four lines, four corner coincidences, one perpendicular, one parallel.
pub fn rectangle_sketch() -> SketchGraph {
    let q = QuantizationSpec::default();
    let (lo, hi) = (-0.5, 0.5);
    let primitives = vec![
        line(&q, (lo, lo), (hi, lo)),
        line(&q, (hi, lo), (hi, hi)),
        line(&q, (hi, hi), (lo, hi)),
        line(&q, (lo, hi), (lo, lo)),
    ];
    use ConstraintKind::*;
    SketchGraph::new(
        primitives,
        constraints(&[
            (Coincident, &[0, 1]),
            (Coincident, &[1, 2]),
            (Coincident, &[2, 3]),
            (Coincident, &[3, 0]),
            (Perpendicular, &[0, 1]),
            (Parallel, &[0, 2]),
        ]),
    )
}

/// The rectangle structure planted in [`planted_corpus`], with lines 0 and 1 exposed.
pub fn planted_concept() -> ConceptType {
    let l = Slot::Primitive(PrimitiveKind::Line);
    use ConstraintKind::*;
    let s = Target::Slot;
    ConceptType::hard(
        K_L0,
        K_ARG,
        &[l, l, l, l, Slot::Constraint(Coincident), Slot::Constraint(Coincident), Slot::Constraint(Coincident),
          Slot::Constraint(Coincident), Slot::Constraint(Perpendicular), Slot::Constraint(Parallel)],
        &[
            (4, vec![s(0), s(1)]),
            (5, vec![s(1), s(2)]),
            (6, vec![s(2), s(3)]),
            (7, vec![s(3), s(0)]),
            (8, vec![s(0), s(1)]),
            (9, vec![s(0), s(2)]),
        ],
        &[0, 1],
    )
}

/// A sketch with the planted rectangle at known element ids.
#[derive(Debug, Clone)]
pub struct PlantedSketch {
    pub sketch: SketchGraph,
    /// Element ids (primitives, then `n_p + c`) of the planted occurrence, sorted.
    pub planted: Vec<usize>,
    /// Planted primitive indices in concept slot order.
    pub planted_lines: [usize; 4],
}

const BINARY_NOISE: [ConstraintKind; 8] = [
    ConstraintKind::Coincident,
    ConstraintKind::Distance,
    ConstraintKind::Parallel,
    ConstraintKind::Tangent,
    ConstraintKind::Perpendicular,
    ConstraintKind::Equal,
    ConstraintKind::Concentric,
    ConstraintKind::Angle,
];

const UNARY_NOISE: [ConstraintKind; 4] =
    [ConstraintKind::Horizontal, ConstraintKind::Vertical, ConstraintKind::Length, ConstraintKind::Radius];

fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let mut p = || (rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
    let (a, b) = (p(), p());
    let r = rng.gen_range(0.05..0.4);
    match rng.gen_range(0..4) {
        0 => Shape::Line { start: a, end: b },
        1 => Shape::Circle { center: a, radius: r },
        2 => Shape::Point { at: a },
        _ => {
            let start = rng.gen_range(0.0..PI);
            Shape::Arc { center: a, radius: r, start, end: start + rng.gen_range(0.5..PI) }
        }
    }
}

fn with_param(kind: ConstraintKind, refs: Vec<usize>, rng: &mut ChaCha8Rng, q: &QuantizationSpec) -> ConstraintInstance {
    let mut c = ConstraintInstance::new(kind, refs);
    if let Some(pk) = kind.param_kind() {
        c.param = Some(rng.gen_range(0..q.bins(pk)));
    }
    c
}

/// One sketch: rectangle lines 0..4 plus `noise` extra elements attached as a
/// sparse tree hanging off lines 0 and 1, then shuffled.
pub fn planted_sketch(rng: &mut ChaCha8Rng, noise: usize) -> PlantedSketch {
    let q = QuantizationSpec::default();
    let base = rectangle_sketch();
    let mut prims = base.primitives.clone();
    let mut cons = base.constraints.clone();
    let mut left = noise.max(4);
    let mut attach_points = vec![0usize, 1];
    let mut noise_prims: Vec<usize> = Vec::new();
    for &anchor in &[0usize, 1] {
        prims.push(random_shape(rng).to_primitive(false, &q));
        let p = prims.len() - 1;
        let kind = *BINARY_NOISE.choose(rng).unwrap();
        cons.push(with_param(kind, vec![anchor, p], rng, &q));
        noise_prims.push(p);
        attach_points.push(p);
        left -= 2;
    }
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.75) {
            prims.push(random_shape(rng).to_primitive(false, &q));
            let p = prims.len() - 1;
            let anchor = *attach_points.choose(rng).unwrap();
            let kind = *BINARY_NOISE.choose(rng).unwrap();
            let refs = if rng.gen_bool(0.5) { vec![anchor, p] } else { vec![p, anchor] };
            cons.push(with_param(kind, refs, rng, &q));
            noise_prims.push(p);
            attach_points.push(p);
            left -= 2;
        } else {
            let p = *noise_prims.choose(rng).unwrap();
            let kind = *UNARY_NOISE.choose(rng).unwrap();
            cons.push(with_param(kind, vec![p], rng, &q));
            left -= 1;
        }
    }

    let mut prim_perm: Vec<usize> = (0..prims.len()).collect();
    prim_perm.shuffle(rng);
    let mut cons_perm: Vec<usize> = (0..cons.len()).collect();
    cons_perm.shuffle(rng);
    // prim_perm[new] = old
    let mut new_of = vec![0; prims.len()];
    for (new, &old) in prim_perm.iter().enumerate() {
        new_of[old] = new;
    }
    let primitives: Vec<PrimitiveInstance> = prim_perm.iter().map(|&o| prims[o].clone()).collect();
    let mut new_cons_of = vec![0; cons.len()];
    let constraints: Vec<ConstraintInstance> = cons_perm
        .iter()
        .enumerate()
        .map(|(new, &o)| {
            new_cons_of[o] = new;
            let mut c = cons[o].clone();
            c.refs = c.refs.iter().map(|&r| new_of[r]).collect();
            c
        })
        .collect();
    let n_p = primitives.len();
    let mut planted: Vec<usize> = (0..4).map(|p| new_of[p]).collect();
    planted.extend((0..base.constraints.len()).map(|c| n_p + new_cons_of[c]));
    planted.sort_unstable();
    PlantedSketch {
        sketch: SketchGraph::new(primitives, constraints),
        planted,
        planted_lines: [new_of[0], new_of[1], new_of[2], new_of[3]],
    }
}

/// `n` planted sketches with 10–30 noise elements each.
pub fn planted_corpus(n: usize, seed: u64) -> Vec<PlantedSketch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let noise = rng.gen_range(10..=30);
            planted_sketch(&mut rng, noise)
        })
        .collect()
}

/// Copy of `sketch` whose primitive `i` is `sketch.primitives[order[i]]`.
pub fn reorder_primitives(sketch: &SketchGraph, order: &[usize]) -> SketchGraph {
    let mut new_of = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_of[old] = new;
    }
    let primitives = order.iter().map(|&o| sketch.primitives[o].clone()).collect();
    let constraints = sketch
        .constraints
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.refs = c.refs.iter().map(|&r| new_of[r]).collect();
            c
        })
        .collect();
    SketchGraph::new(primitives, constraints)
}

/// Planted sketches with the rectangle lines moved to the end of the primitive
/// sequence, so that suffix removal cuts into the rectangle only.
pub fn completion_corpus(n: usize, seed: u64) -> Vec<PlantedSketch> {
    planted_corpus(n, seed)
        .into_iter()
        .map(|ps| {
            let n_p = ps.sketch.primitives.len();
            let mut order: Vec<usize> = (0..n_p).filter(|p| !ps.planted_lines.contains(p)).collect();
            order.extend(ps.planted_lines);
            let sketch = reorder_primitives(&ps.sketch, &order);
            let base = n_p - 4;
            let mut planted: Vec<usize> = (base..n_p).collect();
            planted.extend(ps.planted.iter().filter(|&&e| e >= n_p));
            PlantedSketch { sketch, planted, planted_lines: [base, base + 1, base + 2, base + 3] }
        })
        .collect()
}

/// Random sketch of roughly `size` elements with no planted structure.
pub fn random_sketch(rng: &mut ChaCha8Rng, size: usize) -> SketchGraph {
    let q = QuantizationSpec::default();
    let n_p = (size / 2).max(1);
    let primitives: Vec<PrimitiveInstance> = (0..n_p).map(|_| random_shape(rng).to_primitive(rng.gen_bool(0.1), &q)).collect();
    let mut constraints = Vec::new();
    for _ in n_p..size {
        let kind = ConstraintKind::ALL[rng.gen_range(0..ConstraintKind::ALL.len())];
        let refs: Vec<usize> = (0..kind.arity()).map(|_| rng.gen_range(0..n_p)).collect();
        constraints.push(with_param(kind, refs, rng, &q));
    }
    SketchGraph::new(primitives, constraints)
}

/// The arc cap of the two-concept slot example: an arc tangent and coincident to
/// outward argument 0 and coincident to outward argument 1.
pub fn arc_cap_concept() -> ConceptType {
    use ConstraintKind::*;
    ConceptType::hard(
        K_L0,
        K_ARG,
        &[Slot::Primitive(PrimitiveKind::Arc), Slot::Constraint(Tangent), Slot::Constraint(Coincident), Slot::Constraint(Coincident)],
        &[
            (1, vec![Target::Slot(0), Target::Outward(0)]),
            (2, vec![Target::Slot(0), Target::Outward(0)]),
            (3, vec![Target::Slot(0), Target::Outward(1)]),
        ],
        &[],
    )
}

/// The rectangle frame of the slot example: twelve elements, lines 1 and 0 exposed
/// as inward arguments 0 and 1.
pub fn frame_concept() -> ConceptType {
    use ConstraintKind::*;
    let l = Slot::Primitive(PrimitiveKind::Line);
    let c = Slot::Constraint;
    let s = Target::Slot;
    let mut t = ConceptType::hard(
        K_L0,
        K_ARG,
        &[l, l, l, l, c(Coincident), c(Coincident), c(Coincident), c(Coincident), c(Perpendicular), c(Parallel), c(Distance), c(Horizontal)],
        &[
            (4, vec![s(0), s(3)]),
            (5, vec![s(0), s(2)]),
            (6, vec![s(1), s(2)]),
            (7, vec![s(1), s(3)]),
            (8, vec![s(1), s(2)]),
            (9, vec![s(2), s(3)]),
            (10, vec![s(2), s(3)]),
            (11, vec![s(3)]),
        ],
        &[],
    );
    t.bind_inward(0, 1);
    t.bind_inward(1, 0);
    t
}

/// Builtins plus the arc cap and the frame.
pub fn slot_library() -> ConceptLibrary {
    let mut lib = ConceptLibrary::default();
    lib.insert(frame_concept(), 1);
    lib.insert(arc_cap_concept(), 2);
    lib
}

/// The slot-shaped sketch: a frame of four lines closed by two arcs.
///
/// Primitive order: lines 0..4 (left, right, bottom, top), arcs 4 and 5.
pub fn slot_sketch() -> SketchGraph {
    let q = QuantizationSpec::default();
    let (w, h) = (0.6, 0.3);
    let primitives = vec![
        line(&q, (-w, -h), (-w, h)),
        line(&q, (w, -h), (w, h)),
        line(&q, (-w, -h), (w, -h)),
        line(&q, (-w, h), (w, h)),
        Shape::Arc { center: (0.0, h), radius: w, start: 0.0, end: PI }.to_primitive(false, &q),
        Shape::Arc { center: (0.0, -h), radius: w, start: PI, end: 2.0 * PI }.to_primitive(false, &q),
    ];
    use ConstraintKind::*;
    let mut s = SketchGraph::new(
        primitives,
        constraints(&[
            (Coincident, &[0, 3]),
            (Coincident, &[0, 2]),
            (Coincident, &[1, 2]),
            (Coincident, &[1, 3]),
            (Perpendicular, &[1, 2]),
            (Parallel, &[2, 3]),
            (Distance, &[2, 3]),
            (Horizontal, &[3]),
            (Tangent, &[4, 0]),
            (Coincident, &[4, 0]),
            (Coincident, &[4, 1]),
            (Tangent, &[5, 1]),
            (Coincident, &[5, 1]),
            (Coincident, &[5, 0]),
        ]),
    );
    infer_constraint_params(&mut s, &q);
    s
}

/// Program for [`slot_sketch`] with the two concepts as decomposition-local types:
/// two arc caps and one frame, wired through four cross references.
pub fn slot_program() -> SketchDecomposition {
    let sketch = slot_sketch();
    let prim = |i: usize| {
        let p = &sketch.primitives[i];
        SlotValue::Primitive { construction: p.construction, params: p.params.clone() }
    };
    let cons = |i: usize| SlotValue::Constraint { param: sketch.constraints[i].param };
    let pad = |mut v: Vec<SlotValue>| {
        v.resize(K_L0, SlotValue::Null);
        v
    };
    let cap = |arc: usize, first: usize| ConceptInstance {
        type_ref: TypeRef::Local(0),
        values: pad(vec![prim(arc), cons(first), cons(first + 1), cons(first + 2)]),
    };
    let mut frame_values: Vec<SlotValue> = (0..4).map(prim).collect();
    frame_values.extend((0..8).map(cons));
    let frame = ConceptInstance { type_ref: TypeRef::Local(1), values: frame_values };
    let mut d = SketchDecomposition::new(K_L0, K_ARG, vec![cap(4, 8), cap(5, 11), frame]);
    d.local_types = vec![arc_cap_concept(), frame_concept()];
    d.connect(0, 0, 2, 1);
    d.connect(0, 1, 2, 0);
    d.connect(1, 0, 2, 0);
    d.connect(1, 1, 2, 1);
    d.pad_to(K_QRY);
    d
}
