//! Continuous geometry of primitives, used for normalization, rasterization,
//! SVG output, completion heuristics, and constraint-parameter inference.

use std::f64::consts::{FRAC_PI_2, TAU};

use super::graph::{PrimitiveInstance, SketchGraph};
use super::kinds::{ConstraintKind, ParamKind, PrimitiveKind};
use super::quantize::QuantizationSpec;

pub type Point2 = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Line { start: Point2, end: Point2 },
    Circle { center: Point2, radius: f64 },
    Point { at: Point2 },
    /// Counter-clockwise sweep from `start` to `end` (radians).
    Arc { center: Point2, radius: f64, start: f64, end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn empty() -> Self {
        Self { min: (f64::INFINITY, f64::INFINITY), max: (f64::NEG_INFINITY, f64::NEG_INFINITY) }
    }

    pub fn include(&mut self, p: Point2) {
        self.min.0 = self.min.0.min(p.0);
        self.min.1 = self.min.1.min(p.1);
        self.max.0 = self.max.0.max(p.0);
        self.max.1 = self.max.1.max(p.1);
    }

    pub fn is_empty(&self) -> bool {
        self.min.0 > self.max.0
    }

    pub fn center(&self) -> Point2 {
        ((self.min.0 + self.max.0) / 2.0, (self.min.1 + self.max.1) / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.max.0 - self.min.0
    }

    pub fn height(&self) -> f64 {
        self.max.1 - self.min.1
    }
}

impl Shape {
    pub fn kind(&self) -> PrimitiveKind {
        match self {
            Self::Line { .. } => PrimitiveKind::Line,
            Self::Circle { .. } => PrimitiveKind::Circle,
            Self::Point { .. } => PrimitiveKind::Point,
            Self::Arc { .. } => PrimitiveKind::Arc,
        }
    }

    /// Builds a shape from scalar values laid out per `kind.schema()`.
    pub fn from_values(kind: PrimitiveKind, v: &[f64]) -> Option<Self> {
        if v.len() != kind.schema().len() {
            return None;
        }
        Some(match kind {
            PrimitiveKind::Line => Self::Line { start: (v[0], v[1]), end: (v[2], v[3]) },
            PrimitiveKind::Circle => Self::Circle { center: (v[0], v[1]), radius: v[2] },
            PrimitiveKind::Point => Self::Point { at: (v[0], v[1]) },
            PrimitiveKind::Arc => {
                Self::Arc { center: (v[0], v[1]), radius: v[2], start: v[3], end: v[4] }
            }
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Self::Line { start, end } => vec![start.0, start.1, end.0, end.1],
            Self::Circle { center, radius } => vec![center.0, center.1, radius],
            Self::Point { at } => vec![at.0, at.1],
            Self::Arc { center, radius, start, end } => vec![center.0, center.1, radius, start, end],
        }
    }

    pub fn from_primitive(p: &PrimitiveInstance, quant: &QuantizationSpec) -> Option<Self> {
        let schema = p.kind.schema();
        if p.params.len() != schema.len() {
            return None;
        }
        let values: Vec<f64> =
            p.params.iter().zip(schema).map(|(&b, &k)| quant.dequantize(k, b)).collect();
        Self::from_values(p.kind, &values)
    }

    pub fn to_primitive(&self, construction: bool, quant: &QuantizationSpec) -> PrimitiveInstance {
        let kind = self.kind();
        let params =
            self.values().iter().zip(kind.schema()).map(|(&v, &k)| quant.quantize(k, v)).collect();
        PrimitiveInstance { kind, construction, params }
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// Uniform scale about the origin followed by a translation.
    pub fn transformed(&self, scale: f64, offset: Point2) -> Self {
        let t = |p: Point2| (p.0 * scale + offset.0, p.1 * scale + offset.1);
        match *self {
            Self::Line { start, end } => Self::Line { start: t(start), end: t(end) },
            Self::Circle { center, radius } => Self::Circle { center: t(center), radius: radius * scale },
            Self::Point { at } => Self::Point { at: t(at) },
            Self::Arc { center, radius, start, end } => {
                Self::Arc { center: t(center), radius: radius * scale, start, end }
            }
        }
    }

    fn arc_sweep(start: f64, end: f64) -> f64 {
        let sweep = (end - start).rem_euclid(TAU);
        if sweep == 0.0 {
            TAU
        } else {
            sweep
        }
    }

    pub fn extend_bbox(&self, bb: &mut BoundingBox) {
        match *self {
            Self::Line { start, end } => {
                bb.include(start);
                bb.include(end);
            }
            Self::Circle { center, radius } => {
                bb.include((center.0 - radius, center.1 - radius));
                bb.include((center.0 + radius, center.1 + radius));
            }
            Self::Point { at } => bb.include(at),
            Self::Arc { center, radius, start, end } => {
                let sweep = Self::arc_sweep(start, end);
                let at = |a: f64| (center.0 + radius * a.cos(), center.1 + radius * a.sin());
                bb.include(at(start));
                bb.include(at(start + sweep));
                for k in 0..4 {
                    let cardinal = f64::from(k) * FRAC_PI_2;
                    if (cardinal - start).rem_euclid(TAU) <= sweep {
                        bb.include(at(cardinal));
                    }
                }
            }
        }
    }

    /// Points along the curve spaced by at most `step` in arc length, endpoints included.
    pub fn sample(&self, step: f64) -> Vec<Point2> {
        match *self {
            Self::Point { at } => vec![at],
            Self::Line { start, end } => {
                let len = dist(start, end);
                let n = (len / step).ceil().max(1.0) as usize;
                (0..=n)
                    .map(|i| {
                        let t = i as f64 / n as f64;
                        (start.0 + (end.0 - start.0) * t, start.1 + (end.1 - start.1) * t)
                    })
                    .collect()
            }
            Self::Circle { center, radius } => arc_points(center, radius, 0.0, TAU, step),
            Self::Arc { center, radius, start, end } => {
                arc_points(center, radius, start, Self::arc_sweep(start, end), step)
            }
        }
    }

    /// Points at which other primitives typically attach.
    pub fn anchor_points(&self) -> Vec<Point2> {
        match *self {
            Self::Line { start, end } => vec![start, end],
            Self::Circle { center, .. } => vec![center],
            Self::Point { at } => vec![at],
            Self::Arc { center, radius, start, end } => vec![
                (center.0 + radius * start.cos(), center.1 + radius * start.sin()),
                (center.0 + radius * end.cos(), center.1 + radius * end.sin()),
                center,
            ],
        }
    }
}

fn arc_points(center: Point2, radius: f64, start: f64, sweep: f64, step: f64) -> Vec<Point2> {
    let len = radius.abs() * sweep;
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| {
            let a = start + sweep * i as f64 / n as f64;
            (center.0 + radius * a.cos(), center.1 + radius * a.sin())
        })
        .collect()
}

pub fn dist(a: Point2, b: Point2) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Bounding box of the dequantized sketch.
pub fn sketch_bbox(sketch: &SketchGraph, quant: &QuantizationSpec) -> BoundingBox {
    let mut bb = BoundingBox::empty();
    for p in &sketch.primitives {
        if let Some(s) = Shape::from_primitive(p, quant) {
            s.extend_bbox(&mut bb);
        }
    }
    bb
}

fn line_dir(s: &Shape) -> Option<(f64, f64)> {
    match *s {
        Shape::Line { start, end } => Some((end.0 - start.0, end.1 - start.1)),
        _ => None,
    }
}

fn point_line_distance(p: Point2, start: Point2, end: Point2) -> f64 {
    let (dx, dy) = (end.0 - start.0, end.1 - start.1);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return dist(p, start);
    }
    ((p.0 - start.0) * dy - (p.1 - start.1) * dx).abs() / len
}

fn representative_point(s: &Shape) -> Point2 {
    match *s {
        Shape::Line { start, end } => ((start.0 + end.0) / 2.0, (start.1 + end.1) / 2.0),
        Shape::Circle { center, .. } | Shape::Arc { center, .. } => center,
        Shape::Point { at } => at,
    }
}

/// Recomputes the scalar of a dimensional constraint from primitive geometry.
pub fn infer_constraint_value(kind: ConstraintKind, shapes: &[&Shape]) -> Option<f64> {
    match (kind, shapes) {
        (ConstraintKind::Length, [Shape::Line { start, end }]) => Some(dist(*start, *end)),
        (ConstraintKind::Radius, [Shape::Circle { radius, .. } | Shape::Arc { radius, .. }]) => {
            Some(*radius)
        }
        (ConstraintKind::Diameter, [Shape::Circle { radius, .. } | Shape::Arc { radius, .. }]) => {
            Some(2.0 * radius)
        }
        (ConstraintKind::Distance, [a, b]) => match (a, b) {
            (Shape::Line { start, end }, other) | (other, Shape::Line { start, end }) => {
                Some(point_line_distance(representative_point(other), *start, *end))
            }
            _ => Some(dist(representative_point(a), representative_point(b))),
        },
        (ConstraintKind::Angle, [a, b]) => {
            let (u, v) = (line_dir(a)?, line_dir(b)?);
            Some((u.0 * v.1 - u.1 * v.0).atan2(u.0 * v.0 + u.1 * v.1))
        }
        _ => None,
    }
}

/// Fills missing scalars of dimensional constraints from the primitives they reference.
pub fn infer_constraint_params(sketch: &mut SketchGraph, quant: &QuantizationSpec) {
    let shapes: Vec<Option<Shape>> =
        sketch.primitives.iter().map(|p| Shape::from_primitive(p, quant)).collect();
    for c in &mut sketch.constraints {
        let Some(pk) = c.kind.param_kind() else { continue };
        if c.param.is_some() {
            continue;
        }
        let refs: Option<Vec<&Shape>> =
            c.refs.iter().map(|&r| shapes.get(r).and_then(|s| s.as_ref())).collect();
        if let Some(value) = refs.and_then(|r| infer_constraint_value(c.kind, &r)) {
            let value = if pk == ParamKind::Angle { value } else { value.abs() };
            c.param = Some(quant.quantize(pk, value));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_bbox_covers_cardinal_extreme() {
        let arc = Shape::Arc { center: (0.0, 0.0), radius: 1.0, start: -0.5, end: 0.5 };
        let mut bb = BoundingBox::empty();
        arc.extend_bbox(&mut bb);
        assert!((bb.max.0 - 1.0).abs() < 1e-12);
        assert!(bb.min.0 > 0.8);
    }

    #[test]
    fn line_samples_respect_step() {
        let l = Shape::Line { start: (-1.0, 0.0), end: (1.0, 0.0) };
        let pts = l.sample(1.0 / 64.0);
        assert_eq!(pts.len(), 129);
        for w in pts.windows(2) {
            assert!(dist(w[0], w[1]) <= 1.0 / 64.0 + 1e-12);
        }
    }

    #[test]
    fn distance_between_parallel_lines() {
        let a = Shape::Line { start: (0.0, 0.0), end: (1.0, 0.0) };
        let b = Shape::Line { start: (0.0, 0.5), end: (1.0, 0.5) };
        let d = infer_constraint_value(ConstraintKind::Distance, &[&a, &b]).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }
}
