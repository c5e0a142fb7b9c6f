use std::path::Path;
use std::process::Command;

use serde_json::Value;

use sketch_concepts::sketch::corpus::{CorpusFile, SketchRecord};
use sketch_concepts::sketch::{QuantizationSpec, SketchGraph};
use sketch_concepts::synth;

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_sketchcon")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn ingest_induce_parse_complete_eval() {
    let dir = tempfile::tempdir().unwrap();
    let quant = QuantizationSpec::default();
    let raw = dir.path().join("raw.json");
    let corpus = dir.path().join("corpus.json");
    let lib = dir.path().join("lib.json");
    let sketches: Vec<SketchGraph> = synth::completion_corpus(30, 5).into_iter().map(|s| s.sketch).collect();
    CorpusFile::from_graphs(&sketches, &quant).write(&raw).unwrap();

    run(&["ingest", "--input", p(&raw), "--out", p(&corpus), "--no-augment"]);
    let ingested = json(&corpus);
    assert_eq!(ingested["sketches"].as_array().unwrap().len(), 30);

    run(&["induce", "--corpus", p(&corpus), "--lib", p(&lib)]);
    assert!(json(&lib)["schema_version"].is_number());

    let one = dir.path().join("one.json");
    std::fs::write(&one, serde_json::to_string(&SketchRecord::from_graph(&sketches[0], &quant)).unwrap()).unwrap();
    let svg = dir.path().join("one.svg");
    let parsed: Value = serde_json::from_str(&run(&["parse", "--lib", p(&lib), "--sketch", p(&one), "--svg", p(&svg)])).unwrap();
    assert_eq!(parsed["roundtrip"], true);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let partial = sketch_concepts::completion::remove_last(&sketches[0], 1).sketch;
    let part = dir.path().join("partial.json");
    std::fs::write(&part, serde_json::to_string(&SketchRecord::from_graph(&partial, &quant)).unwrap()).unwrap();
    let done: Value = serde_json::from_str(&run(&["complete", "--lib", p(&lib), "--sketch", p(&part), "--top-k", "2"])).unwrap();
    let cands = done["candidates"].as_array().unwrap();
    assert!(!cands.is_empty() && cands.len() <= 2);
    assert_eq!(cands[0]["sketch"]["primitives"].as_array().unwrap().len(), sketches[0].primitives.len());

    let curves = dir.path().join("curves.csv");
    let report: Value =
        serde_json::from_str(&run(&["eval", "--lib", p(&lib), "--corpus", p(&corpus), "--ratios", "0.1,0.3", "--curves", p(&curves)]))
            .unwrap();
    assert_eq!(report["primitive_f"], 1.0);
    assert_eq!(std::fs::read_to_string(&curves).unwrap().lines().count(), 3);

    let stats: Value = serde_json::from_str(&run(&["stats", "--lib", p(&lib), "--corpus", p(&corpus)])).unwrap();
    assert_eq!(stats["schema_version"], 1);
}
