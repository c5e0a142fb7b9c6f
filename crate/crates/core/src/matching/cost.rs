use super::generated::GeneratedElement;
use super::hungarian::assign;
use crate::concept::AssignmentMatrix;
use crate::error::{Error, Result};
use crate::sketch::{ElementKind, SketchGraph};

/// Floor applied inside every logarithm.
pub const EPS: f64 = 1e-9;

pub(crate) fn nlog(p: f64) -> f64 {
    -p.max(EPS).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub unary: f64,
    pub binary: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { unary: 50.0, binary: 1.0 }
    }
}

/// Target-by-generation costs, components kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub unary: Vec<Vec<f64>>,
    pub binary: Vec<Vec<f64>>,
    pub weights: CostWeights,
}

impl CostMatrix {
    pub fn total(&self, p: usize, q: usize) -> f64 {
        self.weights.unary * self.unary[p][q] + self.weights.binary * self.binary[p][q]
    }

    pub fn combined(&self) -> Vec<Vec<f64>> {
        (0..self.unary.len()).map(|p| (0..self.unary[p].len()).map(|q| self.total(p, q)).collect()).collect()
    }
}

/// Cross-entropy of target element `p` under generation `q`, reading parameters
/// from the segment of `p`'s kind.
pub fn unary_cost(g: &GeneratedElement, target: &SketchGraph, p: usize) -> f64 {
    let kind = target.element_kind(p);
    let mut c = nlog(g.type_dist[kind.index()]);
    if let ElementKind::Primitive(pk) = kind {
        let prim = &target.primitives[p];
        let seg = &g.param_dists[pk.index()];
        c += nlog(seg[0][usize::from(prim.construction)]);
        for (i, &b) in prim.params.iter().enumerate() {
            c += nlog(seg[i + 1].get(usize::from(b)).copied().unwrap_or(0.0));
        }
    }
    c
}

pub fn unary_cost_matrix(generated: &[GeneratedElement], target: &SketchGraph) -> Vec<Vec<f64>> {
    (0..target.element_count())
        .map(|p| generated.iter().map(|g| unary_cost(g, target, p)).collect())
        .collect()
}

/// Reference-weighted unary costs for target constraints; zero rows for primitives.
pub fn binary_cost_matrix(unary: &[Vec<f64>], r: &AssignmentMatrix, target: &SketchGraph) -> Result<Vec<Vec<f64>>> {
    let n_gen = unary.first().map_or(0, Vec::len);
    if r.shape() != (2 * n_gen, n_gen) {
        return Err(Error::ShapeMismatch(format!("reference matrix is {:?}, expected {:?}", r.shape(), (2 * n_gen, n_gen))));
    }
    let n_p = target.primitives.len();
    let mut out = vec![vec![0.0; n_gen]; target.element_count()];
    for (c, con) in target.constraints.iter().enumerate() {
        let row = &mut out[n_p + c];
        for (q, cell) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for (ref_pos, &pr) in con.refs.iter().enumerate() {
                for (j, &w) in r.row(2 * q + ref_pos).iter().enumerate() {
                    if w != 0.0 {
                        s += w * unary[pr][j];
                    }
                }
            }
            *cell = s;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingResult {
    /// Target element matched to each generated slot.
    pub sigma: Vec<Option<usize>>,
    /// Generated slot matched to each target element.
    pub inverse: Vec<Option<usize>>,
    /// Sum of `C[σ(q), q]` over matched slots.
    pub cost: f64,
    pub l_recon: f64,
    pub costs: CostMatrix,
}

/// Optimal assignment of targets to generated slots and the reconstruction loss.
pub fn match_graphs(
    generated: &[GeneratedElement],
    r: &AssignmentMatrix,
    target: &SketchGraph,
    weights: CostWeights,
) -> Result<MatchingResult> {
    let n_gen = generated.len();
    let n_tgt = target.element_count();
    if n_gen < n_tgt {
        return Err(Error::InfeasibleMatch { generated: n_gen, targets: n_tgt });
    }
    let unary = unary_cost_matrix(generated, target);
    let binary = binary_cost_matrix(&unary, r, target)?;
    let costs = CostMatrix { unary, binary, weights };
    match_costs(generated, costs)
}

/// Matching on precomputed costs.
pub fn match_costs(generated: &[GeneratedElement], costs: CostMatrix) -> Result<MatchingResult> {
    let n_gen = generated.len();
    let n_tgt = costs.unary.len();
    if n_gen < n_tgt {
        return Err(Error::InfeasibleMatch { generated: n_gen, targets: n_tgt });
    }
    let (rows, cost) = assign(&costs.combined());
    let mut sigma = vec![None; n_gen];
    let inverse: Vec<Option<usize>> = rows.iter().map(|&q| Some(q)).collect();
    for (p, &q) in rows.iter().enumerate() {
        sigma[q] = Some(p);
    }
    let mut total = 0.0;
    for (q, g) in generated.iter().enumerate() {
        total += match sigma[q] {
            Some(p) => costs.total(p, q),
            None => nlog(g.type_dist[ElementKind::NULL_INDEX]),
        };
    }
    let l_recon = if n_gen == 0 { 0.0 } else { total / n_gen as f64 };
    Ok(MatchingResult { sigma, inverse, cost, l_recon, costs })
}
