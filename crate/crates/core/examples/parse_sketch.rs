//! Parses the slot sketch with its two-concept library, checks the lossless
//! round trip and writes a concept-colored SVG.

use sketch_concepts::eval::fscore;
use sketch_concepts::induction::parse::parse_sketch;
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::svg::{primitive_concepts, render_svg};
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let quant = QuantizationSpec::default();
    let lib = synth::slot_library();
    let sketch = synth::slot_sketch();

    let parsed = parse_sketch(&sketch, &lib)?;
    let d = &parsed.decomposition;
    println!("{} instances ({} non-null), residual {:?}", d.instances.len(), d.used_instances(&lib), parsed.residual);
    for (i, inst) in d.instances.iter().enumerate() {
        println!("  instance {i}: {:?} {}", inst.type_ref, d.instance_type(&lib, i)?.summary());
    }
    for ((i, a), (j, b)) in d.cross_edges() {
        println!("  outward {a} of {i} -> inward {b} of {j}");
    }

    let assembled = d.assemble(&lib)?;
    let f = fscore(&assembled.sketch, &sketch, &quant);
    println!("round trip: primitive F {} constraint F {}", f.primitive_f, f.constraint_f);

    let colors = primitive_concepts(&sketch, d, &parsed.provenance, &lib);
    let path = std::env::temp_dir().join("sketchcon_slot.svg");
    std::fs::write(&path, render_svg(&sketch, &colors, &quant))?;
    println!("wrote {}", path.display());
    Ok(())
}
