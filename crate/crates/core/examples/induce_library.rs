//! Induces a concept library from a planted-rectangle corpus and parses it back.

use std::time::Instant;

use sketch_concepts::concept::TypeRef;
use sketch_concepts::induction::parse::parse_sketch;
use sketch_concepts::induction::select::{induce_library, InduceOptions};
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let corpus = synth::planted_corpus(200, 17);
    let sketches: Vec<_> = corpus.iter().map(|p| p.sketch.clone()).collect();

    let t = Instant::now();
    let (lib, report) = induce_library(&sketches, &InduceOptions { seed: 17, ..Default::default() })?;
    println!(
        "induced {} concepts from {} candidates ({} occurrences) in {:.1?}",
        report.selected.len(),
        report.candidates,
        report.occurrences,
        t.elapsed()
    );
    for s in report.selected.iter().take(5) {
        let t = lib.get(s.index).unwrap();
        println!("  #{:<3} gain {:>7.1}  count {:>4}  {}", s.index, s.gain, s.count, t.summary());
    }

    let planted = lib.find_concept(&synth::planted_concept());
    println!("planted concept index: {planted:?}");

    let t = Instant::now();
    let mut hits = 0;
    for p in &corpus {
        let r = parse_sketch(&p.sketch, &lib)?;
        let owner = r.primitive_owner(p.planted_lines[0]);
        let inst = &r.decomposition.instances[owner];
        let whole = p.planted.iter().all(|&e| r.provenance[e].instance == owner);
        if whole && Some(inst.type_ref) == planted.map(TypeRef::Library) {
            hits += 1;
        }
    }
    println!("planted occurrences recovered: {hits}/{} (parse {:.1?})", corpus.len(), t.elapsed());
    Ok(())
}
