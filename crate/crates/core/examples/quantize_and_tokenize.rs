//! Normalizes a raw rectangle record, quantizes it, prints its token sequence
//! and rasterizes it for deduplication.

use sketch_concepts::sketch::corpus::{ConstraintRecord, PrimitiveRecord, SketchRecord};
use sketch_concepts::sketch::normalize::normalize;
use sketch_concepts::sketch::raster::raster_dedup_key;
use sketch_concepts::sketch::{tokenize, ConstraintKind, ParamKind, PrimitiveKind, QuantizationSpec};

fn line(x1: f64, y1: f64, x2: f64, y2: f64) -> PrimitiveRecord {
    PrimitiveRecord { kind: PrimitiveKind::Line, construction: false, params: vec![x1, y1, x2, y2], quantized: None }
}

fn main() -> sketch_concepts::Result<()> {
    // A 40 x 20 mm plate somewhere off the origin.
    let record = SketchRecord {
        primitives: vec![line(10.0, 5.0, 50.0, 5.0), line(50.0, 5.0, 50.0, 25.0), line(50.0, 25.0, 10.0, 25.0), line(10.0, 25.0, 10.0, 5.0)],
        constraints: (0..4)
            .map(|i| ConstraintRecord { kind: ConstraintKind::Coincident, refs: vec![i, (i + 1) % 4], param: None, quantized: None })
            .collect(),
    };
    let quant = QuantizationSpec::default();
    println!(
        "bins: coord {} length {} angle {}; tolerance {}/{}/{}",
        quant.bins(ParamKind::Coord),
        quant.bins(ParamKind::Length),
        quant.bins(ParamKind::Angle),
        quant.tolerance(ParamKind::Coord),
        quant.tolerance(ParamKind::Length),
        quant.tolerance(ParamKind::Angle)
    );

    let sketch = normalize(&record, &quant)?;
    for (i, p) in sketch.primitives.iter().enumerate() {
        println!("primitive {i}: {:?} {:?}", p.kind, p.params);
    }
    let tokens = tokenize(&sketch)?;
    let text: Vec<String> = tokens.iter().map(ToString::to_string).collect();
    println!("{} tokens: {}", tokens.len(), text.join(" "));

    let key = raster_dedup_key(&sketch, &quant);
    println!("raster: {} pixels set, hash {:016x}", key.bitmap.count_ones(), key.hash);
    Ok(())
}
