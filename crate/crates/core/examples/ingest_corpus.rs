//! Runs the ingestion pipeline over a small generated corpus: size filter,
//! raster deduplication and shrink augmentation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sketch_concepts::sketch::corpus::{ingest_records, CorpusFile, IngestOptions, SketchRecord};
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let quant = QuantizationSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut graphs: Vec<_> = synth::planted_corpus(40, 5).into_iter().map(|p| p.sketch).collect();
    graphs.push(synth::rectangle_sketch()); // too small
    graphs.push(synth::random_sketch(&mut rng, 80)); // too large
    graphs.push(graphs[0].clone()); // duplicate
    let records: Vec<SketchRecord> = CorpusFile::from_graphs(&graphs, &quant).sketches;

    let opts = IngestOptions { seed: 5, ..Default::default() };
    let out = ingest_records(&records, "generated", &opts)?;
    println!("{}", serde_json::to_string_pretty(&out.report)?);

    let path = std::env::temp_dir().join("sketchcon_ingested.json");
    out.corpus_file().write(&path)?;
    println!("wrote {} sketches to {}", out.sketches.len(), path.display());
    Ok(())
}
