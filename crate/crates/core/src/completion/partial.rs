use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::sketch::SketchGraph;

/// A sketch with a suffix of its primitive sequence removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSketch {
    pub sketch: SketchGraph,
    pub ratio: f64,
    /// Original indices of the removed primitives (a suffix).
    pub removed_primitives: Vec<usize>,
    /// Original indices of the removed constraints.
    pub removed_constraints: Vec<usize>,
    /// Original index of every kept constraint, in order.
    pub kept_constraints: Vec<usize>,
}

/// Drops the last `⌈ratio·n⌉` primitives and every constraint touching them.
pub fn synthesize_partial(sketch: &SketchGraph, ratio: f64) -> PartialSketch {
    let n = sketch.primitives.len();
    let ratio = ratio.clamp(0.0, 1.0);
    let mut p = remove_last(sketch, ((ratio * n as f64).ceil() as usize).min(n));
    p.ratio = ratio;
    p
}

/// Drops the last `count` primitives and every constraint touching them.
pub fn remove_last(sketch: &SketchGraph, count: usize) -> PartialSketch {
    let n = sketch.primitives.len();
    let removed = count.min(n);
    let keep = n - removed;
    let ratio = if n == 0 { 0.0 } else { removed as f64 / n as f64 };
    let mut kept_constraints = Vec::new();
    let mut removed_constraints = Vec::new();
    let mut constraints = Vec::new();
    for (i, c) in sketch.constraints.iter().enumerate() {
        if c.refs.iter().all(|&r| r < keep) {
            kept_constraints.push(i);
            constraints.push(c.clone());
        } else {
            removed_constraints.push(i);
        }
    }
    PartialSketch {
        sketch: SketchGraph::new(sketch.primitives[..keep].to_vec(), constraints),
        ratio,
        removed_primitives: (keep..n).collect(),
        removed_constraints,
        kept_constraints,
    }
}

/// [`synthesize_partial`] with the ratio drawn uniformly from `(0, 0.5]`.
pub fn synthesize_random_partial(sketch: &SketchGraph, seed: u64) -> PartialSketch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = 0.5 - rng.gen_range(0.0..0.5);
    synthesize_partial(sketch, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn zero_ratio_keeps_everything() {
        let s = synth::slot_sketch();
        assert_eq!(synthesize_partial(&s, 0.0).sketch, s);
    }

    #[test]
    fn half_of_fifteen_primitives() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = synth::random_sketch(&mut rng, 30);
        assert_eq!(s.primitives.len(), 15);
        let p = synthesize_partial(&s, 0.5);
        assert_eq!(p.removed_primitives, (7..15).collect::<Vec<_>>());
        assert!(p.sketch.is_valid());
        assert_eq!(p.kept_constraints.len() + p.removed_constraints.len(), s.constraints.len());
    }
}
