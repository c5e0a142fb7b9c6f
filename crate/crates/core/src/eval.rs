//! Reconstruction F-scores, modularity, and library statistics.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{complete_sketch, synthesize_partial, CompletionOptions};
use crate::concept::{ConceptLibrary, Provenance, SketchDecomposition, TypeRef};
use crate::error::Result;
use crate::induction::parse::parse_sketch;
use crate::matching::{assign, decomposition_losses, library_codebook, LossWeights, Losses};
use crate::sketch::{PrimitiveInstance, QuantizationSpec, SketchGraph};

/// Cost placed on pairs of different kinds; large enough that the assignment
/// never prefers them over any same-kind pair.
const KIND_MISMATCH: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FScore {
    pub primitive_f: f64,
    pub constraint_f: f64,
    pub primitive_precision: f64,
    pub primitive_recall: f64,
    pub constraint_precision: f64,
    pub constraint_recall: f64,
    /// Target primitive matched to each generated primitive.
    pub correspondence: Vec<Option<usize>>,
    pub primitive_correct: Vec<bool>,
    pub constraint_correct: Vec<bool>,
}

fn prf(correct: usize, generated: usize, target: usize) -> (f64, f64, f64) {
    if generated == 0 && target == 0 {
        return (1.0, 1.0, 1.0);
    }
    let p = if generated == 0 { 0.0 } else { correct as f64 / generated as f64 };
    let r = if target == 0 { 0.0 } else { correct as f64 / target as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Whether two primitives agree in kind, construction flag, and every bin within tolerance.
pub fn primitive_matches(a: &PrimitiveInstance, b: &PrimitiveInstance, quant: &QuantizationSpec) -> bool {
    a.kind == b.kind
        && a.construction == b.construction
        && a.params.len() == b.params.len()
        && a.kind
            .schema()
            .iter()
            .zip(a.params.iter().zip(&b.params))
            .all(|(&k, (&x, &y))| quant.bin_distance(k, x, y) <= quant.tolerance(k))
}

fn primitive_distance(a: &PrimitiveInstance, b: &PrimitiveInstance, quant: &QuantizationSpec) -> f64 {
    if a.kind != b.kind || a.params.len() != b.params.len() {
        return KIND_MISMATCH;
    }
    let mut d = if a.construction == b.construction { 0.0 } else { 1.0 };
    for (&k, (&x, &y)) in a.kind.schema().iter().zip(a.params.iter().zip(&b.params)) {
        d += f64::from(quant.bin_distance(k, x, y)) / f64::from(quant.bins(k));
    }
    d
}

struct Scorer<'a> {
    generated: &'a SketchGraph,
    target: &'a SketchGraph,
    prim_ok: Vec<Vec<bool>>,
    /// Target constraints keyed by `(kind, refs)`.
    target_index: HashMap<(usize, Vec<usize>), usize>,
}

impl Scorer<'_> {
    fn constraint_correct(&self, corr: &[Option<usize>]) -> Vec<bool> {
        let mut available = self.target_index.clone();
        self.generated
            .constraints
            .iter()
            .map(|c| {
                let mapped: Option<Vec<usize>> = c
                    .refs
                    .iter()
                    .map(|&g| corr.get(g).copied().flatten().filter(|&t| self.prim_ok[g][t]))
                    .collect();
                let Some(refs) = mapped else { return false };
                match available.get_mut(&(c.kind.index(), refs)) {
                    Some(n) if *n > 0 => {
                        *n -= 1;
                        true
                    }
                    _ => false,
                }
            })
            .collect()
    }

    fn score(&self, corr: &[Option<usize>]) -> (usize, usize) {
        let prims = corr.iter().enumerate().filter(|(g, t)| t.is_some_and(|t| self.prim_ok[*g][t])).count();
        (prims, self.constraint_correct(corr).iter().filter(|&&b| b).count())
    }
}

/// Element-wise reconstruction quality of `generated` against `target`.
///
/// Primitives are matched by minimum total bin distance; among equally good
/// matchings, swaps between same-kind primitives are accepted while they raise
/// the number of correct constraints.
pub fn fscore(generated: &SketchGraph, target: &SketchGraph, quant: &QuantizationSpec) -> FScore {
    let (ng, nt) = (generated.primitives.len(), target.primitives.len());
    let prim_ok: Vec<Vec<bool>> = generated
        .primitives
        .iter()
        .map(|g| target.primitives.iter().map(|t| primitive_matches(g, t, quant)).collect())
        .collect();
    let cost: Vec<Vec<f64>> = generated
        .primitives
        .iter()
        .map(|g| target.primitives.iter().map(|t| primitive_distance(g, t, quant)).collect())
        .collect();
    let mut corr: Vec<Option<usize>> = if ng == 0 || nt == 0 {
        vec![None; ng]
    } else {
        assign(&cost).0.into_iter().map(|t| (t != usize::MAX).then_some(t)).collect()
    };
    let mut target_index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for c in &target.constraints {
        *target_index.entry((c.kind.index(), c.refs.clone())).or_default() += 1;
    }
    let scorer = Scorer { generated, target, prim_ok, target_index };

    let mut best = scorer.score(&corr);
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 8 && best.1 < generated.constraints.len() {
        improved = false;
        rounds += 1;
        for a in 0..ng {
            for b in a + 1..ng {
                if generated.primitives[a].kind != generated.primitives[b].kind {
                    continue;
                }
                corr.swap(a, b);
                let s = scorer.score(&corr);
                if s > best {
                    best = s;
                    improved = true;
                } else {
                    corr.swap(a, b);
                }
            }
        }
    }

    let primitive_correct: Vec<bool> =
        corr.iter().enumerate().map(|(g, t)| t.is_some_and(|t| scorer.prim_ok[g][t])).collect();
    let constraint_correct = scorer.constraint_correct(&corr);
    let (pp, pr, pf) = prf(best.0, ng, nt);
    let (cp, cr, cf) = prf(best.1, generated.constraints.len(), scorer.target.constraints.len());
    FScore {
        primitive_f: pf,
        constraint_f: cf,
        primitive_precision: pp,
        primitive_recall: pr,
        constraint_precision: cp,
        constraint_recall: cr,
        correspondence: corr,
        primitive_correct,
        constraint_correct,
    }
}

/// Percentage of correct constraints whose referenced primitives all belong to
/// the constraint's own instance; `None` when no constraint is correct.
///
/// `provenance` gives the owner of every element of the generated sketch,
/// primitives first.
pub fn modularity(generated: &SketchGraph, provenance: &[Provenance], score: &FScore) -> Option<f64> {
    let n_p = generated.primitives.len();
    let mut correct = 0;
    let mut inside = 0;
    for (c, con) in generated.constraints.iter().enumerate() {
        if !score.constraint_correct[c] {
            continue;
        }
        correct += 1;
        let owner = provenance[n_p + c].instance;
        if con.refs.iter().all(|&p| provenance[p].instance == owner) {
            inside += 1;
        }
    }
    (correct > 0).then(|| 100.0 * inside as f64 / correct as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LibraryStats {
    /// `(library index, instance count)` sorted by count descending, then index.
    pub usage: Vec<(usize, usize)>,
    /// `complexity[n]` = number of library concepts with `n` non-Null slots.
    pub complexity: Vec<usize>,
    pub induced: usize,
    pub builtin: usize,
}

/// Usage frequency over parsed decompositions (Null padding excluded) and the
/// complexity histogram of the library.
pub fn library_stats(lib: &ConceptLibrary, parses: &[&SketchDecomposition]) -> LibraryStats {
    let mut counts = vec![0usize; lib.len()];
    for d in parses {
        for inst in &d.instances {
            if let TypeRef::Library(i) = inst.type_ref {
                if i != ConceptLibrary::NULL && i < counts.len() {
                    counts[i] += 1;
                }
            }
        }
    }
    let mut usage: Vec<(usize, usize)> = counts.into_iter().enumerate().collect();
    usage.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut complexity = vec![0; lib.k_l0 + 1];
    for i in 0..lib.len() {
        complexity[lib.complexity(i)] += 1;
    }
    LibraryStats { usage, complexity, induced: lib.len() - lib.builtin_count(), builtin: lib.builtin_count() }
}

/// One point of a completion-quality curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub ratio: f64,
    pub primitive_f: f64,
    pub constraint_f: f64,
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("ratio,primitive_f,constraint_f\n");
    for p in points {
        s.push_str(&format!("{:.2},{:.6},{:.6}\n", p.ratio, p.primitive_f, p.constraint_f));
    }
    s
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub losses: bool,
    /// Suffix ratios for completion curves; empty skips completion.
    pub ratios: Vec<f64>,
    pub quant: QuantizationSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct LossSummary {
    pub mean: Losses,
    pub mean_total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub sketches: usize,
    pub primitive_f: f64,
    pub constraint_f: f64,
    /// Mean over sketches with at least one correct constraint.
    pub modularity: Option<f64>,
    pub modularity_defined: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub losses: Option<LossSummary>,
    pub completion: Vec<CurvePoint>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = v.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Parse reconstruction, modularity, optional losses, and completion curves over a corpus.
pub fn evaluate_corpus(lib: &ConceptLibrary, sketches: &[SketchGraph], opts: &EvalOptions) -> Result<EvalReport> {
    let quant = &opts.quant;
    let book = if opts.losses { Some(library_codebook(lib)?) } else { None };
    let rows: Vec<(FScore, Option<f64>, Option<Losses>)> = sketches
        .par_iter()
        .map(|s| {
            let r = parse_sketch(s, lib)?;
            let a = r.decomposition.assemble(lib)?;
            let f = fscore(&a.sketch, s, quant);
            let m = modularity(&a.sketch, &a.provenance, &f);
            let l = match &book {
                Some(b) => Some(decomposition_losses(&r.decomposition, lib, s, Some(b), quant)?.0),
                None => None,
            };
            Ok((f, m, l))
        })
        .collect::<Result<_>>()?;
    let losses = book.as_ref().map(|_| {
        let n = rows.len().max(1) as f64;
        let mut m = Losses::default();
        for l in rows.iter().filter_map(|r| r.2) {
            m.recon += l.recon / n;
            m.sharp += l.sharp / n;
            m.vq += l.vq / n;
            m.bias += l.bias / n;
        }
        LossSummary { mean: m, mean_total: m.total(&LossWeights::default()) }
    });

    let copts = CompletionOptions { quant: *quant, ..Default::default() };
    let mut completion = Vec::new();
    for &ratio in &opts.ratios {
        let scores: Vec<FScore> = sketches
            .par_iter()
            .map(|s| {
                let partial = synthesize_partial(s, ratio);
                let cands = complete_sketch(&partial.sketch, lib, &copts)?;
                let generated = cands.first().map_or(&partial.sketch, |c| &c.sketch);
                Ok(fscore(generated, s, quant))
            })
            .collect::<Result<_>>()?;
        completion.push(CurvePoint {
            ratio,
            primitive_f: mean(scores.iter().map(|f| f.primitive_f)).unwrap_or(0.0),
            constraint_f: mean(scores.iter().map(|f| f.constraint_f)).unwrap_or(0.0),
        });
    }

    Ok(EvalReport {
        sketches: sketches.len(),
        primitive_f: mean(rows.iter().map(|r| r.0.primitive_f)).unwrap_or(0.0),
        constraint_f: mean(rows.iter().map(|r| r.0.constraint_f)).unwrap_or(0.0),
        modularity: mean(rows.iter().filter_map(|r| r.1)),
        modularity_defined: rows.iter().filter(|r| r.1.is_some()).count(),
        losses,
        completion,
    })
}
