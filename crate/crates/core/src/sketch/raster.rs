//! Binary rasterization used as a geometric deduplication key.

use super::geometry::Shape;
use super::graph::SketchGraph;
use super::quantize::QuantizationSpec;

pub const RASTER_SIZE: usize = 128;
const WORDS_PER_ROW: usize = RASTER_SIZE / 64;

/// 128×128 bitmap over the normalized square; row 0 is y = −1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    words: Vec<u64>,
}

impl std::fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bitmap({} set, hash {:016x})", self.count_ones(), self.hash())
    }
}

impl Default for Bitmap {
    fn default() -> Self {
        Self { words: vec![0; RASTER_SIZE * WORDS_PER_ROW] }
    }
}

impl Bitmap {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.words[row * WORDS_PER_ROW + col / 64] >> (col % 64) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.words[row * WORDS_PER_ROW + col / 64] |= 1 << (col % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rows with at least one set pixel.
    pub fn occupied_rows(&self) -> Vec<usize> {
        (0..RASTER_SIZE)
            .filter(|&r| self.words[r * WORDS_PER_ROW..(r + 1) * WORDS_PER_ROW].iter().any(|&w| w != 0))
            .collect()
    }

    /// FNV-1a over the row-major packed bits.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.words {
            for b in w.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

pub fn pixel(v: f64) -> usize {
    let p = ((v + 1.0) / 2.0 * RASTER_SIZE as f64).floor();
    if p.is_nan() || p < 0.0 {
        0
    } else {
        (p as usize).min(RASTER_SIZE - 1)
    }
}

/// Rasterizes dequantized geometry, construction primitives included.
pub fn rasterize(sketch: &SketchGraph, quant: &QuantizationSpec) -> Bitmap {
    let mut bm = Bitmap::default();
    let step = 2.0 / RASTER_SIZE as f64;
    for p in &sketch.primitives {
        let Some(shape) = Shape::from_primitive(p, quant) else { continue };
        for (x, y) in shape.sample(step) {
            bm.set(pixel(y), pixel(x));
        }
    }
    bm
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupKey {
    pub bitmap: Bitmap,
    pub hash: u64,
}

pub fn raster_dedup_key(sketch: &SketchGraph, quant: &QuantizationSpec) -> DedupKey {
    let bitmap = rasterize(sketch, quant);
    let hash = bitmap.hash();
    DedupKey { bitmap, hash }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::{PrimitiveInstance, PrimitiveKind};

    #[test]
    fn empty_sketch_is_blank() {
        let k = raster_dedup_key(&SketchGraph::default(), &QuantizationSpec::default());
        assert_eq!(k.bitmap.count_ones(), 0);
    }

    #[test]
    fn horizontal_midline_fills_row_64() {
        let q = QuantizationSpec::default();
        let s = SketchGraph::new(vec![PrimitiveInstance::new(PrimitiveKind::Line, vec![0, 40, 79, 40])], vec![]);
        let bm = rasterize(&s, &q);
        assert_eq!(bm.occupied_rows(), vec![64]);
    }
}
