use serde::Serialize;

use super::cost::nlog;
use crate::concept::AssignmentMatrix;
use crate::error::{Error, Result};
use crate::sketch::SketchGraph;

fn matched(inverse: &[Option<usize>], e: usize) -> Result<usize> {
    inverse.get(e).copied().flatten().ok_or(Error::UnmatchedTarget(e))
}

/// Mean negative log-probability of the correct references over target constraints.
pub fn loss_sharp(r: &AssignmentMatrix, inverse: &[Option<usize>], target: &SketchGraph) -> Result<f64> {
    let n_c = target.constraints.len();
    if n_c == 0 {
        return Ok(0.0);
    }
    let n_p = target.primitives.len();
    let mut s = 0.0;
    for (c, con) in target.constraints.iter().enumerate() {
        let q = matched(inverse, n_p + c)?;
        for (ref_pos, &pr) in con.refs.iter().enumerate() {
            s += nlog(r.get(2 * q + ref_pos, matched(inverse, pr)?));
        }
    }
    Ok(s / n_c as f64)
}

/// Mean reference mass on outward arguments, read from each generated
/// constraint's own concept structure matrix.
pub fn loss_bias(
    structures: &[&AssignmentMatrix],
    k_l0: usize,
    inverse: &[Option<usize>],
    target: &SketchGraph,
) -> Result<f64> {
    let n_c = target.constraints.len();
    if n_c == 0 {
        return Ok(0.0);
    }
    let n_p = target.primitives.len();
    let mut s = 0.0;
    for (c, con) in target.constraints.iter().enumerate() {
        let q = matched(inverse, n_p + c)?;
        let m = structures
            .get(q / k_l0)
            .ok_or_else(|| Error::ShapeMismatch(format!("no structure for generated slot {q}")))?;
        let slot = q % k_l0;
        for ref_pos in 0..con.refs.len() {
            for col in k_l0..m.cols() {
                s += m.get(2 * slot + ref_pos, col);
            }
        }
    }
    Ok(s / n_c as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossWeights {
    pub recon: f64,
    pub sharp: f64,
    pub vq: f64,
    pub bias: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { recon: 1.0, sharp: 20.0, vq: 1.0, bias: 25.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Losses {
    pub recon: f64,
    pub sharp: f64,
    pub vq: f64,
    pub bias: f64,
}

impl Losses {
    pub fn total(&self, w: &LossWeights) -> f64 {
        loss_total(self.recon, self.sharp, self.vq, self.bias, w)
    }
}

pub fn loss_total(recon: f64, sharp: f64, vq: f64, bias: f64, w: &LossWeights) -> f64 {
    w.recon * recon + w.sharp * sharp + w.vq * vq + w.bias * bias
}
