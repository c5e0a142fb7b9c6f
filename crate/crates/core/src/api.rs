//! JSON documents shared by the command line and the HTTP service.

use serde::{Deserialize, Serialize};

use crate::completion::{complete_sketch, CompletionOptions};
use crate::concept::{ConceptLibrary, Provenance, SketchDecomposition};
use crate::error::{Error, Location, Result};
use crate::eval::fscore;
use crate::induction::parse::parse_sketch;
use crate::sketch::corpus::{load_sketches, parse_corpus, SketchRecord, SCHEMA_VERSION};
use crate::sketch::{QuantizationSpec, SketchGraph};
use crate::svg::{primitive_concepts, render_svg};

/// Reads a single sketch (bare object or one-element corpus).
pub fn sketch_from_json(text: &str, file: &str, quant: &QuantizationSpec) -> Result<SketchGraph> {
    let records = parse_corpus(text, file)?;
    if records.len() != 1 {
        return Err(Error::Parse {
            location: Location { file: file.into(), record: None, line: None, column: None },
            message: format!("expected one sketch, found {}", records.len()),
        });
    }
    Ok(load_sketches(&records, file, quant)?.remove(0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseOutput {
    pub schema_version: u32,
    pub library_hash: String,
    pub sketch: SketchRecord,
    pub decomposition: SketchDecomposition,
    /// Owner of every element, primitives first.
    pub provenance: Vec<Provenance>,
    pub residual: Vec<usize>,
    /// Induced library index owning each primitive, for coloring.
    pub concepts: Vec<Option<usize>>,
    /// Whether assembling the decomposition reproduces the sketch exactly.
    pub roundtrip: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

pub fn parse_output(sketch: &SketchGraph, lib: &ConceptLibrary, quant: &QuantizationSpec, svg: bool) -> Result<ParseOutput> {
    let r = parse_sketch(sketch, lib)?;
    let assembled = r.decomposition.assemble(lib)?;
    let f = fscore(&assembled.sketch, sketch, quant);
    let roundtrip = assembled.unresolved.is_empty() && f.primitive_f == 1.0 && f.constraint_f == 1.0;
    let concepts = primitive_concepts(sketch, &r.decomposition, &r.provenance, lib);
    Ok(ParseOutput {
        schema_version: SCHEMA_VERSION,
        library_hash: lib.content_hash(),
        sketch: SketchRecord::from_graph(sketch, quant),
        svg: svg.then(|| render_svg(sketch, &concepts, quant)),
        decomposition: r.decomposition,
        provenance: r.provenance,
        residual: r.residual,
        concepts,
        roundtrip,
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct CompleteRequest {
    pub sketch: serde_json::Value,
    #[serde(default)]
    pub top_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateOutput {
    pub rank: usize,
    pub score: f64,
    pub concept: Option<usize>,
    pub matched: usize,
    pub sketch: SketchRecord,
    pub decomposition: SketchDecomposition,
    pub provenance: Vec<Provenance>,
    pub concepts: Vec<Option<usize>>,
    pub added_primitives: Vec<usize>,
    pub added_constraints: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionOutput {
    pub schema_version: u32,
    pub library_hash: String,
    pub candidates: Vec<CandidateOutput>,
}

pub fn complete_output(partial: &SketchGraph, lib: &ConceptLibrary, opts: &CompletionOptions) -> Result<CompletionOutput> {
    let candidates = complete_sketch(partial, lib, opts)?
        .into_iter()
        .enumerate()
        .map(|(rank, c)| CandidateOutput {
            rank,
            score: c.score,
            concept: c.concept,
            matched: c.matched,
            concepts: primitive_concepts(&c.sketch, &c.decomposition, &c.provenance, lib),
            sketch: SketchRecord::from_graph(&c.sketch, &opts.quant),
            decomposition: c.decomposition,
            provenance: c.provenance,
            added_primitives: c.added_primitives,
            added_constraints: c.added_constraints,
        })
        .collect();
    Ok(CompletionOutput { schema_version: SCHEMA_VERSION, library_hash: lib.content_hash(), candidates })
}
