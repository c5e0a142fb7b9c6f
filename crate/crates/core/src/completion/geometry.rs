//! Best-effort geometry for completed primitives: coincidence snapping, then
//! direction constraints, then lengths, then reflection of matched geometry.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::concept::{ConceptType, Slot, Target};
use crate::sketch::geometry::{dist, BoundingBox, Point2, Shape};
use crate::sketch::{ConstraintKind, PrimitiveKind};

const SNAP: f64 = 1e-6;

struct Link {
    kind: ConstraintKind,
    /// Reference position of the slot being placed.
    pos: usize,
    other: usize,
}

fn links(t: &ConceptType, x: usize) -> Vec<Link> {
    let mut out = Vec::new();
    for cs in t.constraint_slots() {
        let Slot::Constraint(kind) = t.slots[cs] else { continue };
        let targets = t.ref_targets(cs);
        for (pos, tg) in targets.iter().enumerate() {
            if *tg != Some(Target::Slot(x)) {
                continue;
            }
            for (op, otg) in targets.iter().enumerate() {
                if let Some(Target::Slot(y)) = *otg {
                    if op != pos && y != x {
                        out.push(Link { kind, pos, other: y });
                    }
                }
            }
            if kind.arity() == 1 {
                out.push(Link { kind, pos, other: x });
            }
        }
    }
    out
}

fn line_parts(s: &Shape) -> Option<(Point2, Point2)> {
    match *s {
        Shape::Line { start, end } => Some((start, end)),
        _ => None,
    }
}

fn unit(v: (f64, f64)) -> Option<(f64, f64)> {
    let n = (v.0 * v.0 + v.1 * v.1).sqrt();
    (n > 1e-12).then(|| (v.0 / n, v.1 / n))
}

/// Anchor of `y` not shared with any other placed coincident partner of `y`.
fn free_anchor(t: &ConceptType, y: usize, x: usize, placed: &HashMap<usize, Shape>) -> Option<Point2> {
    let shape = placed.get(&y)?;
    let shared: Vec<Point2> = links(t, y)
        .iter()
        .filter(|l| l.kind == ConstraintKind::Coincident && l.other != x && l.other != y)
        .filter_map(|l| placed.get(&l.other))
        .flat_map(|s| s.anchor_points())
        .collect();
    let anchors = shape.anchor_points();
    anchors
        .iter()
        .copied()
        .find(|a| shared.iter().all(|s| dist(*a, *s) > SNAP))
        .or_else(|| anchors.first().copied())
}

fn place_line(t: &ConceptType, x: usize, placed: &HashMap<usize, Shape>, center: Point2, mean_len: f64) -> Option<Shape> {
    let ls = links(t, x);
    let (mut start, mut end): (Option<Point2>, Option<Point2>) = (None, None);
    for l in ls.iter().filter(|l| l.kind == ConstraintKind::Coincident && l.other != x) {
        let Some(p) = free_anchor(t, l.other, x, placed) else { continue };
        // A primitive listed first meets its partner with its end.
        let (first, second) = if l.pos == 0 { (&mut end, &mut start) } else { (&mut start, &mut end) };
        match *first {
            None => *first = Some(p),
            Some(f) if second.is_none() && dist(f, p) > SNAP => *second = Some(p),
            _ => {}
        }
    }
    if let (Some(s), Some(e)) = (start, end) {
        return Some(Shape::Line { start: s, end: e });
    }
    let anchor = start.or(end)?;
    let mut dir = None;
    let mut len = None;
    for l in &ls {
        let partner = placed.get(&l.other).and_then(line_parts);
        match (l.kind, partner) {
            (ConstraintKind::Horizontal, _) => dir = dir.or(Some((1.0, 0.0))),
            (ConstraintKind::Vertical, _) => dir = dir.or(Some((0.0, 1.0))),
            (ConstraintKind::Parallel, Some((a, b))) => {
                dir = dir.or(unit((b.0 - a.0, b.1 - a.1)));
                len = len.or(Some(dist(a, b)));
            }
            (ConstraintKind::Perpendicular, Some((a, b))) => dir = dir.or(unit((a.1 - b.1, b.0 - a.0))),
            (ConstraintKind::Equal, Some((a, b))) => len = Some(dist(a, b)),
            _ => {}
        }
    }
    let dir = dir?;
    let len = len.unwrap_or(mean_len);
    let towards = |sign: f64| (anchor.0 + sign * dir.0 * len, anchor.1 + sign * dir.1 * len);
    let other = if dist(towards(1.0), center) <= dist(towards(-1.0), center) { towards(1.0) } else { towards(-1.0) };
    Some(if start.is_some() { Shape::Line { start: anchor, end: other } } else { Shape::Line { start: other, end: anchor } })
}

fn place_round(t: &ConceptType, x: usize, kind: PrimitiveKind, placed: &HashMap<usize, Shape>) -> Option<Shape> {
    let mut center = None;
    let mut radius = None;
    for l in links(t, x) {
        let Some(partner) = placed.get(&l.other) else { continue };
        match (l.kind, partner) {
            (ConstraintKind::Concentric, Shape::Circle { center: c, radius: r } | Shape::Arc { center: c, radius: r, .. }) => {
                center = Some(*c);
                radius = radius.or(Some(*r));
            }
            (ConstraintKind::Equal, Shape::Circle { radius: r, .. } | Shape::Arc { radius: r, .. }) => radius = Some(*r),
            (ConstraintKind::Coincident, _) if l.other != x => {
                center = center.or_else(|| free_anchor(t, l.other, x, placed));
            }
            _ => {}
        }
    }
    let c = center?;
    let r = radius.unwrap_or(0.2);
    Some(match kind {
        PrimitiveKind::Circle => Shape::Circle { center: c, radius: r },
        PrimitiveKind::Point => Shape::Point { at: c },
        _ => Shape::Arc { center: c, radius: r, start: 0.0, end: PI },
    })
}

fn reflect(s: &Shape, c: Point2) -> Shape {
    let m = |p: Point2| (2.0 * c.0 - p.0, 2.0 * c.1 - p.1);
    match *s {
        Shape::Line { start, end } => Shape::Line { start: m(start), end: m(end) },
        Shape::Circle { center, radius } => Shape::Circle { center: m(center), radius },
        Shape::Point { at } => Shape::Point { at: m(at) },
        Shape::Arc { center, radius, start, end } => Shape::Arc { center: m(center), radius, start: start + PI, end: end + PI },
    }
}

fn default_shape(kind: PrimitiveKind, at: Point2) -> Shape {
    match kind {
        PrimitiveKind::Line => Shape::Line { start: at, end: (at.0 + 0.2, at.1) },
        PrimitiveKind::Circle => Shape::Circle { center: at, radius: 0.2 },
        PrimitiveKind::Point => Shape::Point { at },
        PrimitiveKind::Arc => Shape::Arc { center: at, radius: 0.2, start: 0.0, end: PI },
    }
}

fn retype(s: Shape, kind: PrimitiveKind) -> Shape {
    if s.kind() == kind {
        return s;
    }
    let at = match s {
        Shape::Line { start, .. } => start,
        Shape::Circle { center, .. } | Shape::Arc { center, .. } => center,
        Shape::Point { at } => at,
    };
    default_shape(kind, at)
}

/// Shapes for the missing primitive slots of `t`, given the shapes of the matched ones.
pub(crate) fn instantiate(t: &ConceptType, matched: &HashMap<usize, Shape>, missing: &[usize]) -> HashMap<usize, Shape> {
    let mut placed = matched.clone();
    let mut bb = BoundingBox::empty();
    for s in matched.values() {
        s.extend_bbox(&mut bb);
    }
    let center = if bb.is_empty() { (0.0, 0.0) } else { bb.center() };
    let lines: Vec<f64> = matched.values().filter_map(line_parts).map(|(a, b)| dist(a, b)).collect();
    let mean_len = if lines.is_empty() { 0.4 } else { lines.iter().sum::<f64>() / lines.len() as f64 };

    let mut todo: Vec<usize> = missing.to_vec();
    loop {
        let before = todo.len();
        todo.retain(|&x| {
            let Slot::Primitive(kind) = t.slots[x] else { return false };
            let shape = match kind {
                PrimitiveKind::Line => place_line(t, x, &placed, center, mean_len),
                _ => place_round(t, x, kind, &placed),
            };
            match shape {
                Some(s) => {
                    placed.insert(x, s);
                    false
                }
                None => true,
            }
        });
        if todo.is_empty() || todo.len() == before {
            break;
        }
    }
    for x in todo {
        let Slot::Primitive(kind) = t.slots[x] else { continue };
        let source = links(t, x)
            .iter()
            .filter_map(|l| placed.get(&l.other).copied())
            .find(|s| s.kind() == kind)
            .or_else(|| placed.values().copied().find(|s| s.kind() == kind))
            .or_else(|| placed.values().copied().next());
        let shape = match source {
            Some(s) => retype(reflect(&s, center), kind),
            None => default_shape(kind, center),
        };
        placed.insert(x, shape);
    }
    placed.retain(|k, _| missing.contains(k));
    placed
}
