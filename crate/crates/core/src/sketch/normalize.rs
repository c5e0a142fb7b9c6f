//! Fitting raw geometry into the canonical 2×2 square and quantizing it.

use super::corpus::{ConstraintRecord, PrimitiveRecord, SketchRecord};
use super::geometry::{BoundingBox, Shape};
use super::graph::{ConstraintInstance, PrimitiveInstance, SketchGraph};
use super::kinds::ParamKind;
use super::quantize::QuantizationSpec;
use crate::error::{Error, Result};

/// Uniform scale and offset mapping raw coordinates into `[-1, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub scale: f64,
    pub offset: (f64, f64),
}

pub fn fit(shapes: &[Shape]) -> Result<Fit> {
    if shapes.is_empty() {
        return Err(Error::DegenerateSketch("no primitives".into()));
    }
    if let Some(i) = shapes.iter().position(|s| !s.is_finite()) {
        return Err(Error::DegenerateSketch(format!("primitive {i} has non-finite geometry")));
    }
    let mut bb = BoundingBox::empty();
    for s in shapes {
        s.extend_bbox(&mut bb);
    }
    let extent = bb.width().max(bb.height());
    if !(extent > 0.0) {
        return Err(Error::DegenerateSketch("bounding box has zero extent".into()));
    }
    let scale = 2.0 / extent;
    let c = bb.center();
    Ok(Fit { scale, offset: (-c.0 * scale, -c.1 * scale) })
}

fn raw_shapes(record: &SketchRecord) -> Result<Vec<Shape>> {
    record
        .primitives
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Shape::from_values(p.kind, &p.params).ok_or_else(|| {
                Error::DegenerateSketch(format!(
                    "primitive {i}: {} expects {} params, found {}",
                    p.kind,
                    p.kind.schema().len(),
                    p.params.len()
                ))
            })
        })
        .collect()
}

/// Returns a copy whose floats are normalized and whose `quantized` blocks are filled.
///
/// Records that already carry bins for every primitive are passed through, which
/// makes re-ingesting toolkit output a no-op.
pub fn normalize_record(record: &SketchRecord, quant: &QuantizationSpec) -> Result<SketchRecord> {
    if record.is_quantized() {
        return Ok(record.clone());
    }
    let shapes = raw_shapes(record)?;
    let f = fit(&shapes)?;
    Ok(scaled_record(record, &shapes, f.scale, f.offset, quant))
}

fn scaled_record(
    record: &SketchRecord,
    shapes: &[Shape],
    scale: f64,
    offset: (f64, f64),
    quant: &QuantizationSpec,
) -> SketchRecord {
    let primitives = record
        .primitives
        .iter()
        .zip(shapes)
        .map(|(p, s)| {
            let t = s.transformed(scale, offset);
            PrimitiveRecord {
                kind: p.kind,
                construction: p.construction,
                params: t.values(),
                quantized: Some(t.to_primitive(p.construction, quant).params),
            }
        })
        .collect();
    let constraints = record
        .constraints
        .iter()
        .map(|c| {
            let param = match (c.kind.param_kind(), c.param) {
                (Some(ParamKind::Angle), Some(v)) => Some(v),
                (Some(_), Some(v)) => Some(v * scale),
                _ => None,
            };
            let quantized = c.kind.param_kind().zip(param).map(|(k, v)| quant.quantize(k, v));
            ConstraintRecord { kind: c.kind, refs: c.refs.clone(), param, quantized }
        })
        .collect();
    SketchRecord { primitives, constraints }
}

/// Uniformly shrinks a normalized record about the origin and requantizes it.
pub fn shrink_record(record: &SketchRecord, factor: f64, quant: &QuantizationSpec) -> Result<SketchRecord> {
    let shapes = raw_shapes(record)?;
    Ok(scaled_record(record, &shapes, factor, (0.0, 0.0), quant))
}

/// Normalizes and quantizes a raw sketch.
pub fn normalize(record: &SketchRecord, quant: &QuantizationSpec) -> Result<SketchGraph> {
    Ok(normalize_record(record, quant)?.to_graph())
}

impl SketchRecord {
    pub fn is_quantized(&self) -> bool {
        !self.primitives.is_empty()
            && self.primitives.iter().all(|p| p.quantized.as_ref().is_some_and(|q| q.len() == p.kind.schema().len()))
    }

    /// Quantized view. Primitives without bins get empty params, which validation reports.
    pub fn to_graph(&self) -> SketchGraph {
        SketchGraph {
            primitives: self
                .primitives
                .iter()
                .map(|p| PrimitiveInstance {
                    kind: p.kind,
                    construction: p.construction,
                    params: p.quantized.clone().unwrap_or_default(),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintInstance { kind: c.kind, refs: c.refs.clone(), param: c.quantized })
                .collect(),
        }
    }

    /// Record whose floats are the bin centers of `sketch`.
    pub fn from_graph(sketch: &SketchGraph, quant: &QuantizationSpec) -> Self {
        Self {
            primitives: sketch
                .primitives
                .iter()
                .map(|p| PrimitiveRecord {
                    kind: p.kind,
                    construction: p.construction,
                    params: p.params.iter().zip(p.kind.schema()).map(|(&b, &k)| quant.dequantize(k, b)).collect(),
                    quantized: Some(p.params.clone()),
                })
                .collect(),
            constraints: sketch
                .constraints
                .iter()
                .map(|c| ConstraintRecord {
                    kind: c.kind,
                    refs: c.refs.clone(),
                    param: c.kind.param_kind().zip(c.param).map(|(k, b)| quant.dequantize(k, b)),
                    quantized: c.param,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::PrimitiveKind;

    fn line(params: [f64; 4]) -> PrimitiveRecord {
        PrimitiveRecord { kind: PrimitiveKind::Line, construction: false, params: params.to_vec(), quantized: None }
    }

    #[test]
    fn diagonal_maps_to_corners() {
        let r = SketchRecord { primitives: vec![line([0.0, 0.0, 10.0, 10.0])], constraints: vec![] };
        let n = normalize_record(&r, &QuantizationSpec::default()).unwrap();
        assert_eq!(n.primitives[0].params, vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(n.primitives[0].quantized, Some(vec![0, 0, 79, 79]));
    }

    #[test]
    fn aspect_is_preserved() {
        let r = SketchRecord { primitives: vec![line([0.0, 0.0, 4.0, 2.0])], constraints: vec![] };
        let n = normalize_record(&r, &QuantizationSpec::default()).unwrap();
        assert_eq!(n.primitives[0].params, vec![-1.0, -0.5, 1.0, 0.5]);
    }

    #[test]
    fn single_point_is_degenerate() {
        let r = SketchRecord {
            primitives: vec![PrimitiveRecord {
                kind: PrimitiveKind::Point,
                construction: false,
                params: vec![3.0, 3.0],
                quantized: None,
            }],
            constraints: vec![],
        };
        assert!(matches!(normalize(&r, &QuantizationSpec::default()), Err(Error::DegenerateSketch(_))));
    }

    #[test]
    fn shrink_halves_the_diagonal() {
        let q = QuantizationSpec::default();
        let r = SketchRecord { primitives: vec![line([-1.0, -1.0, 1.0, 1.0])], constraints: vec![] };
        let s = shrink_record(&r, 0.5, &q).unwrap();
        assert_eq!(s.primitives[0].params, vec![-0.5, -0.5, 0.5, 0.5]);
        assert_eq!(s.primitives[0].quantized, Some(vec![20, 20, 60, 60]));
    }
}
