//! Builds the two-concept slot program by hand, composes its cross-concept
//! references and assembles it back into an L0 sketch.

use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let lib = synth::slot_library();
    let program = synth::slot_program();
    println!("{} instances, {} cross-argument edges", program.instances.len(), program.cross_edges().len());
    for ((i, a), (j, b)) in program.cross_edges() {
        println!("  outward {a} of instance {i} -> inward {b} of instance {j}");
    }

    let r = program.compose_cross_refs(&lib)?;
    let k = program.k_l0;
    for row in 0..r.rows() {
        let (inst, slot, pos) = (row / (2 * k), (row / 2) % k, row % 2);
        for col in 0..r.cols() {
            let w = r.get(row, col);
            if w > 0.0 && col / k != inst {
                println!("  instance {inst} slot {slot} ref {pos} -> instance {} slot {} ({w})", col / k, col % k);
            }
        }
    }

    let assembled = program.assemble(&lib)?;
    println!(
        "assembled {} primitives and {} constraints ({} unresolved)",
        assembled.sketch.primitives.len(),
        assembled.sketch.constraints.len(),
        assembled.unresolved.len()
    );
    for (c, con) in assembled.sketch.constraints.iter().enumerate() {
        println!("  {:?} {:?} (instance {})", con.kind, con.refs, assembled.constraint_owner(c));
    }
    Ok(())
}
