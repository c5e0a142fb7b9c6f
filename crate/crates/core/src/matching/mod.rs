//! Cost matrices, linear-assignment matching, and the induction losses.

mod cost;
mod generated;
mod hungarian;
mod loss;

pub use cost::{
    binary_cost_matrix, match_costs, match_graphs, unary_cost, unary_cost_matrix, CostMatrix, CostWeights,
    MatchingResult, EPS,
};
pub use generated::{generate, segment_bins, GeneratedElement, TYPE_CLASSES};
pub use hungarian::assign;
pub use loss::{loss_bias, loss_sharp, loss_total, LossWeights, Losses};

use crate::concept::{ConceptLibrary, SketchDecomposition};
use crate::error::Result;
use crate::induction::canonical::canonicalize;
use crate::sketch::{QuantizationSpec, SketchGraph};
use crate::vq::Codebook;

/// Scores a hard decomposition against its target sketch. The VQ term quantizes
/// instance feature vectors against `book` when one is given.
pub fn decomposition_losses(
    decomp: &SketchDecomposition,
    lib: &ConceptLibrary,
    target: &SketchGraph,
    book: Option<&Codebook>,
    quant: &QuantizationSpec,
) -> Result<(Losses, MatchingResult)> {
    let generated = generate(decomp, lib, quant)?;
    let r = decomp.compose_cross_refs(lib)?;
    let m = match_graphs(&generated, &r, target, CostWeights::default())?;
    let types = decomp.instance_types(lib)?;
    let structures: Vec<_> = types.iter().map(|t| &t.matrix).collect();
    let vq = match book {
        Some(b) => {
            // Library entries are stored canonically; query with the same slot order.
            let feats: Vec<Vec<f64>> = types.iter().map(|t| canonicalize(t).1.feature_vector()).collect();
            b.assign(&feats)?.loss
        }
        None => 0.0,
    };
    let losses = Losses {
        recon: m.l_recon,
        sharp: loss_sharp(&r, &m.inverse, target)?,
        vq,
        bias: loss_bias(&structures, decomp.k_l0, &m.inverse, target)?,
    };
    Ok((losses, m))
}

/// Codebook holding the feature vector of every library concept.
pub fn library_codebook(lib: &ConceptLibrary) -> Result<Codebook> {
    let feats: Vec<Vec<f64>> = lib.entries().iter().map(|e| e.concept.feature_vector()).collect();
    Codebook::from_prototypes(&feats)
}
