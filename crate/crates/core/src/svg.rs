//! SVG rendering of sketches colored by owning concept.

use std::fmt::Write;

use crate::concept::{ConceptLibrary, Provenance, SketchDecomposition, TypeRef};
use crate::sketch::geometry::Shape;
use crate::sketch::{QuantizationSpec, SketchGraph};

const GRAY: &str = "#9a9a9a";

/// Stable color for a library index.
pub fn concept_color(index: usize) -> String {
    let hue = (index as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},70%,42%)")
}

/// Induced library index owning each primitive; `None` for built-in wrappers,
/// local concepts, and unparsed primitives.
pub fn primitive_concepts(
    sketch: &SketchGraph,
    decomposition: &SketchDecomposition,
    provenance: &[Provenance],
    lib: &ConceptLibrary,
) -> Vec<Option<usize>> {
    (0..sketch.primitives.len())
        .map(|p| {
            let inst = decomposition.instances.get(provenance.get(p)?.instance)?;
            match inst.type_ref {
                TypeRef::Library(i) if !lib.is_builtin(i) => Some(i),
                _ => None,
            }
        })
        .collect()
}

pub fn render_svg(sketch: &SketchGraph, concepts: &[Option<usize>], quant: &QuantizationSpec) -> String {
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"512\" height=\"512\">\n\
         <g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.012\" stroke-linecap=\"round\">\n",
    );
    for (p, prim) in sketch.primitives.iter().enumerate() {
        let Some(shape) = Shape::from_primitive(prim, quant) else { continue };
        let color = concepts.get(p).copied().flatten().map_or_else(|| GRAY.to_string(), concept_color);
        let dash = if prim.construction { " stroke-dasharray=\"0.03 0.02\"" } else { "" };
        let attrs = format!("stroke=\"{color}\"{dash} data-primitive=\"{p}\"");
        let _ = match shape {
            Shape::Line { start, end } => writeln!(
                out,
                "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" {attrs}/>",
                start.0, start.1, end.0, end.1
            ),
            Shape::Circle { center, radius } => {
                writeln!(out, "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\" {attrs}/>", center.0, center.1, radius)
            }
            Shape::Point { at } => writeln!(
                out,
                "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"0.015\" fill=\"{color}\" {attrs}/>",
                at.0, at.1
            ),
            Shape::Arc { .. } => {
                let pts: Vec<String> =
                    shape.sample(0.02).iter().map(|(x, y)| format!("{x:.4},{y:.4}")).collect();
                writeln!(out, "<polyline points=\"{}\" {attrs}/>", pts.join(" "))
            }
        };
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn parsed_concepts_share_a_color() {
        let lib = synth::slot_library();
        let s = synth::slot_sketch();
        let r = crate::induction::parse::parse_sketch(&s, &lib).unwrap();
        let colors = primitive_concepts(&s, &r.decomposition, &r.provenance, &lib);
        assert!(colors.iter().all(Option::is_some));
        let svg = render_svg(&s, &colors, &QuantizationSpec::default());
        let distinct: std::collections::BTreeSet<_> = colors.iter().flatten().collect();
        assert_eq!(distinct.len(), 2);
        assert_eq!(svg.matches("<line").count(), 4);
        assert!(!svg.contains(GRAY));
    }
}
