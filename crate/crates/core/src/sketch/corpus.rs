//! Corpus JSON format and the ingestion pipeline (size filter, raster dedup, shrink augmentation).

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::SketchGraph;
use super::kinds::{ConstraintKind, PrimitiveKind};
use super::normalize::{normalize_record, shrink_record};
use super::quantize::QuantizationSpec;
use super::raster::rasterize;
use crate::error::{Error, Location, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveRecord {
    pub kind: PrimitiveKind,
    #[serde(default)]
    pub construction: bool,
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantized: Option<Vec<u16>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintRecord {
    pub kind: ConstraintKind,
    pub refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantized: Option<u16>,
}

/// One sketch in the interchange format; floats are raw until normalized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SketchRecord {
    #[serde(default)]
    pub primitives: Vec<PrimitiveRecord>,
    #[serde(default)]
    pub constraints: Vec<ConstraintRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub sketches: Vec<SketchRecord>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl CorpusFile {
    pub fn new(sketches: Vec<SketchRecord>) -> Self {
        Self { schema_version: SCHEMA_VERSION, sketches }
    }

    pub fn from_graphs(sketches: &[SketchGraph], quant: &QuantizationSpec) -> Self {
        Self::new(sketches.iter().map(|s| SketchRecord::from_graph(s, quant)).collect())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub size_min: usize,
    pub size_max: usize,
    pub augment: bool,
    pub seed: u64,
    pub quant: QuantizationSpec,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { size_min: 20, size_max: 50, augment: true, seed: 0, quant: QuantizationSpec::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub input: usize,
    pub kept: usize,
    pub dropped_size: usize,
    pub dropped_duplicate: usize,
    pub dropped_degenerate: usize,
    pub augmented: usize,
    pub output: usize,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    /// Normalized records, originals first then augmented copies.
    pub records: Vec<SketchRecord>,
    pub sketches: Vec<SketchGraph>,
    pub report: IngestReport,
}

impl Ingested {
    pub fn corpus_file(&self) -> CorpusFile {
        CorpusFile::new(self.records.clone())
    }
}

/// Converts a serde error position into a byte offset of `text`.
pub fn error_offset(text: &str, err: &serde_json::Error) -> usize {
    let (line, column) = (err.line(), err.column());
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn location(file: &str, record: Option<usize>, err: Option<&serde_json::Error>) -> Location {
    Location {
        file: file.to_string(),
        record,
        line: err.map(serde_json::Error::line).filter(|&l| l > 0),
        column: err.filter(|e| e.line() > 0).map(serde_json::Error::column),
    }
}

/// Parses corpus JSON text. A bare sketch object is accepted as a one-sketch corpus.
pub fn parse_corpus(text: &str, file: &str) -> Result<Vec<SketchRecord>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: location(file, None, Some(&e)),
        message: e.to_string(),
    })?;
    let items = match value {
        serde_json::Value::Object(mut map) if map.contains_key("sketches") => match map.remove("sketches") {
            Some(serde_json::Value::Array(items)) => items,
            _ => {
                return Err(Error::Parse {
                    location: location(file, None, None),
                    message: "\"sketches\" must be an array".into(),
                })
            }
        },
        v @ serde_json::Value::Object(_) => vec![v],
        _ => {
            return Err(Error::Parse {
                location: location(file, None, None),
                message: "expected an object with a \"sketches\" array".into(),
            })
        }
    };
    let parsed: Vec<Result<SketchRecord>> = items
        .into_par_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value::<SketchRecord>(v)
                .map_err(|e| Error::Parse { location: location(file, Some(i), None), message: e.to_string() })
        })
        .collect();
    parsed.into_iter().collect()
}

pub fn read_records(path: &Path) -> Result<Vec<SketchRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_corpus(&text, &path.display().to_string())
}

/// Loads sketches for parsing or evaluation: records are normalized unless already quantized,
/// and each must validate. No filtering or deduplication is applied.
pub fn load_sketches(records: &[SketchRecord], file: &str, quant: &QuantizationSpec) -> Result<Vec<SketchGraph>> {
    records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.primitives.is_empty() {
                return if r.constraints.is_empty() {
                    Ok(SketchGraph::default())
                } else {
                    Err(Error::Parse {
                        location: location(file, Some(i), None),
                        message: "constraints without primitives".into(),
                    })
                };
            }
            let g = normalize_record(r, quant)
                .map_err(|e| Error::Parse { location: location(file, Some(i), None), message: e.to_string() })?
                .to_graph();
            let v = g.validate_with(quant);
            if v.is_empty() {
                Ok(g)
            } else {
                Err(Error::Parse { location: location(file, Some(i), None), message: Error::InvalidSketch(v).to_string() })
            }
        })
        .collect()
}

pub fn read_sketches(path: &Path, quant: &QuantizationSpec) -> Result<Vec<SketchGraph>> {
    load_sketches(&read_records(path)?, &path.display().to_string(), quant)
}

enum Outcome {
    Kept(SketchRecord, SketchGraph),
    Size,
    Degenerate,
}

/// Runs the full ingestion pipeline over parsed records.
pub fn ingest_records(records: &[SketchRecord], file: &str, opts: &IngestOptions) -> Result<Ingested> {
    let quant = &opts.quant;
    let outcomes: Vec<Result<Outcome>> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let size = r.primitives.len() + r.constraints.len();
            if size < opts.size_min || size > opts.size_max {
                return Ok(Outcome::Size);
            }
            let n = match normalize_record(r, quant) {
                Ok(n) => n,
                Err(Error::DegenerateSketch(_)) => return Ok(Outcome::Degenerate),
                Err(e) => return Err(e),
            };
            let g = n.to_graph();
            let v = g.validate_with(quant);
            if !v.is_empty() {
                return Err(Error::Parse {
                    location: location(file, Some(i), None),
                    message: Error::InvalidSketch(v).to_string(),
                });
            }
            Ok(Outcome::Kept(n, g))
        })
        .collect();

    let mut report = IngestReport { input: records.len(), ..Default::default() };
    let mut kept = Vec::new();
    for o in outcomes {
        match o? {
            Outcome::Kept(r, g) => kept.push((r, g)),
            Outcome::Size => report.dropped_size += 1,
            Outcome::Degenerate => report.dropped_degenerate += 1,
        }
    }

    let bitmaps: Vec<_> = kept.par_iter().map(|(_, g)| rasterize(g, quant)).collect();
    let mut seen = HashSet::new();
    let mut out_records = Vec::new();
    let mut out_sketches = Vec::new();
    for ((r, g), bm) in kept.into_iter().zip(bitmaps) {
        if seen.insert(bm) {
            out_records.push(r);
            out_sketches.push(g);
        } else {
            report.dropped_duplicate += 1;
        }
    }
    report.kept = out_records.len();

    if opts.augment {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let factors: Vec<f64> = (0..out_records.len()).map(|_| rng.gen_range(0.5..=0.8)).collect();
        let copies: Vec<SketchRecord> = out_records
            .par_iter()
            .zip(&factors)
            .map(|(r, &f)| shrink_record(r, f, quant))
            .collect::<Result<_>>()?;
        for c in copies {
            out_sketches.push(c.to_graph());
            out_records.push(c);
            report.augmented += 1;
        }
    }
    report.output = out_records.len();
    Ok(Ingested { records: out_records, sketches: out_sketches, report })
}

pub fn ingest_corpus(path: &Path, opts: &IngestOptions) -> Result<Ingested> {
    let records = read_records(path)?;
    ingest_records(&records, &path.display().to_string(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(offset: f64, n_lines: usize) -> SketchRecord {
        SketchRecord {
            primitives: (0..n_lines)
                .map(|i| PrimitiveRecord {
                    kind: PrimitiveKind::Line,
                    construction: false,
                    params: vec![offset, i as f64, offset + 5.0, i as f64],
                    quantized: None,
                })
                .collect(),
            constraints: (0..n_lines)
                .map(|i| ConstraintRecord {
                    kind: ConstraintKind::Horizontal,
                    refs: vec![i],
                    param: None,
                    quantized: None,
                })
                .collect(),
        }
    }

    #[test]
    fn identical_sketches_are_deduplicated() {
        let recs = vec![record(0.0, 10); 3];
        let opts = IngestOptions { augment: false, ..Default::default() };
        let out = ingest_records(&recs, "mem", &opts).unwrap();
        assert_eq!(out.report.kept, 1);
        assert_eq!(out.report.dropped_duplicate, 2);
    }

    #[test]
    fn malformed_record_reports_location() {
        let text = r#"{"sketches":[{"primitives":[],"constraints":[]},{"primitives":[{"kind":"blob","params":[]}]}]}"#;
        match parse_corpus(text, "bad.json") {
            Err(Error::Parse { location, .. }) => {
                assert_eq!(location.file, "bad.json");
                assert_eq!(location.record, Some(1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn offset_of_syntax_error() {
        let text = "{\n  \"sketches\": [,]\n}";
        let err = serde_json::from_str::<serde_json::Value>(text).unwrap_err();
        assert_eq!(&text[error_offset(text, &err)..error_offset(text, &err) + 1], ",");
    }
}
