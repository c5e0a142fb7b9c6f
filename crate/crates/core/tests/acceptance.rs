//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sketch_concepts::completion::{complete_sketch, remove_last, CompletionOptions};
use sketch_concepts::concept::{ConceptInstance, ConceptLibrary, ConceptType, SketchDecomposition, TypeRef};
use sketch_concepts::eval::{curves_csv, evaluate_corpus, fscore, modularity, CurvePoint, EvalOptions};
use sketch_concepts::induction::canonical::canonical_key;
use sketch_concepts::induction::parse::parse_sketch;
use sketch_concepts::induction::select::{induce_library, InduceOptions};
use sketch_concepts::matching::{
    assign, binary_cost_matrix, loss_bias, loss_sharp, loss_total, match_graphs, segment_bins, unary_cost_matrix,
    CostWeights, GeneratedElement, LossWeights, TYPE_CLASSES,
};
use sketch_concepts::concept::AssignmentMatrix;
use sketch_concepts::sketch::corpus::{ingest_records, CorpusFile, SketchRecord};
use sketch_concepts::sketch::corpus::IngestOptions;
use sketch_concepts::sketch::raster::{rasterize, RASTER_SIZE};
use sketch_concepts::sketch::{ElementKind, ParamKind, PrimitiveKind, QuantizationSpec, SketchGraph};
use sketch_concepts::synth::{self, PlantedSketch};
use sketch_concepts::vq::Codebook;

use common::{brute_force_assignment, floor_log, isomorphic, permuted, random_concept, walk_references, K, KA};

const TOL: f64 = 1e-9;
const ROUNDTRIP_LIMIT: Duration = Duration::from_secs(60);
const INDUCTION_LIMIT: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn planted() -> &'static (Vec<PlantedSketch>, ConceptLibrary, Vec<usize>, Duration) {
    use std::sync::OnceLock;
    static CELL: OnceLock<(Vec<PlantedSketch>, ConceptLibrary, Vec<usize>, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let corpus = synth::planted_corpus(200, 17);
        let sketches: Vec<SketchGraph> = corpus.iter().map(|p| p.sketch.clone()).collect();
        let t = Instant::now();
        let (lib, report) = induce_library(&sketches, &InduceOptions { seed: 17, ..Default::default() }).unwrap();
        let order = report.selected.iter().map(|s| s.index).collect();
        (corpus, lib, order, t.elapsed())
    })
}

fn roundtrip() -> Outcome {
    let quant = QuantizationSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut corpus: Vec<SketchGraph> = synth::planted_corpus(250, 101).into_iter().map(|p| p.sketch).collect();
    while corpus.len() < 500 {
        let size = rng.gen_range(20..=50);
        corpus.push(synth::random_sketch(&mut rng, size));
    }
    let t = Instant::now();
    let (lib, _) = induce_library(&corpus, &InduceOptions::default()).map_err(|e| e.to_string())?;
    for (i, s) in corpus.iter().enumerate() {
        let r = parse_sketch(s, &lib).map_err(|e| format!("sketch {i}: {e}"))?;
        let a = r.decomposition.assemble(&lib).map_err(|e| format!("sketch {i}: {e}"))?;
        let f = fscore(&a.sketch, s, &quant);
        check(a.unresolved.is_empty(), format!("sketch {i}: unresolved references"))?;
        check(f.primitive_f == 1.0 && f.constraint_f == 1.0, format!("sketch {i}: F = {}/{}", f.primitive_f, f.constraint_f))?;
    }
    let el = t.elapsed();
    check(el < ROUNDTRIP_LIMIT, format!("took {el:.1?}"))?;
    Ok(format!("500 sketches, F = 1.0/1.0, induce+parse+assemble {el:.1?} (< 60 s)"))
}

fn random_decomposition(rng: &mut ChaCha8Rng, lib: &ConceptLibrary) -> SketchDecomposition {
    let n = rng.gen_range(2..=6);
    let mut locals: Vec<ConceptType> = Vec::new();
    let instances: Vec<ConceptInstance> = (0..n)
        .map(|_| {
            let mut inst = ConceptInstance::null(K);
            inst.type_ref = if rng.gen_bool(0.2) {
                TypeRef::Library(rng.gen_range(0..lib.len()))
            } else {
                locals.push(random_concept(rng, 4, 5));
                TypeRef::Local(locals.len() - 1)
            };
            inst
        })
        .collect();
    let mut d = SketchDecomposition::new(K, KA, instances);
    d.local_types = locals;
    for i in 0..n {
        for a in 0..KA {
            if rng.gen_bool(0.7) {
                let j = (i + rng.gen_range(1..n)) % n;
                d.connect(i, a, j, rng.gen_range(0..KA));
            }
        }
    }
    d
}

fn composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let lib = ConceptLibrary::builtin(K, KA, 0.5);
    let mut cross = 0;
    for trial in 0..1000 {
        let d = random_decomposition(&mut rng, &lib);
        let r = d.compose_cross_refs(&lib).map_err(|e| e.to_string())?;
        let types = d.instance_types(&lib).map_err(|e| e.to_string())?;
        let oracle = walk_references(&d, &types);
        for row in 0..r.rows() {
            for col in 0..r.cols() {
                let want = oracle.get(&(row, col)).map_or(0.0, |&v| v as f64);
                if r.get(row, col) != want {
                    return Err(format!("trial {trial}: R[{row},{col}] = {} expected {want}", r.get(row, col)));
                }
                if want != 0.0 && row / (2 * K) != col / K {
                    cross += 1;
                }
            }
        }
    }
    Ok(format!("1000 random hard decompositions match the graph walk exactly ({cross} cross-instance references)"))
}

fn hungarian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let rows = rng.gen_range(1..=7);
        let cols = rng.gen_range(rows..=(rows + 1).min(8));
        let cost: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0.0..100.0)).collect()).collect();
        let (a, total) = assign(&cost);
        let mut seen = vec![false; cols];
        let mut recomputed = 0.0;
        for (r, &c) in a.iter().enumerate() {
            check(c < cols && !seen[c], format!("trial {trial}: not an injection"))?;
            seen[c] = true;
            recomputed += cost[r][c];
        }
        let best = brute_force_assignment(&cost);
        let diff = (total - best).abs().max((recomputed - best).abs());
        worst = worst.max(diff);
        check(diff <= TOL, format!("trial {trial}: {total} vs exhaustive {best}"))?;
    }

    // The same through the graph matcher on soft generated graphs.
    let quant = QuantizationSpec::default();
    for trial in 0..200 {
        let size = rng.gen_range(1..=7);
        let target = synth::random_sketch(&mut rng, size);
        let n_gen = target.element_count() + rng.gen_range(0..=1);
        let generated: Vec<GeneratedElement> = (0..n_gen)
            .map(|_| GeneratedElement {
                type_dist: random_dist(&mut rng, TYPE_CLASSES),
                param_dists: PrimitiveKind::ALL
                    .iter()
                    .map(|&pk| segment_bins(pk, &quant).into_iter().map(|b| random_dist(&mut rng, b)).collect())
                    .collect(),
            })
            .collect();
        let r = random_stochastic(&mut rng, 2 * n_gen, n_gen);
        let m = match_graphs(&generated, &r, &target, CostWeights::default()).map_err(|e| e.to_string())?;
        let w = CostWeights::default();
        let combined: Vec<Vec<f64>> = m
            .costs
            .unary
            .iter()
            .zip(&m.costs.binary)
            .map(|(u, b)| u.iter().zip(b).map(|(u, b)| w.unary * u + w.binary * b).collect())
            .collect();
        let best = brute_force_assignment(&combined);
        let diff = (m.cost - best).abs();
        worst = worst.max(diff);
        check(diff <= TOL, format!("match_graphs trial {trial}: {} vs exhaustive {best}", m.cost))?;
    }
    Ok(format!("200 matrices and 200 match_graphs instances (k_tgt <= 7) equal exhaustive search, max |diff| = {worst:.1e} (tol 1e-9)"))
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001..1.0_f64).powi(3)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn random_stochastic(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> AssignmentMatrix {
    AssignmentMatrix::from_rows((0..rows).map(|_| random_dist(rng, cols)).collect())
}

fn losses() -> Outcome {
    let quant = QuantizationSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (k, ka, n) = (4, 2, 3);
    let n_gen = k * n;
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let size = rng.gen_range(4..=n_gen);
        let target = synth::random_sketch(&mut rng, size);
        let generated: Vec<GeneratedElement> = (0..n_gen)
            .map(|_| GeneratedElement {
                type_dist: random_dist(&mut rng, TYPE_CLASSES),
                param_dists: PrimitiveKind::ALL
                    .iter()
                    .map(|&pk| segment_bins(pk, &quant).into_iter().map(|b| random_dist(&mut rng, b)).collect())
                    .collect(),
            })
            .collect();
        let r = random_stochastic(&mut rng, 2 * n_gen, n_gen);
        let structures: Vec<AssignmentMatrix> = (0..n).map(|_| random_stochastic(&mut rng, 2 * k + ka, k + ka)).collect();

        // Unary and binary costs by direct loops.
        let n_p = target.primitives.len();
        let mut ury = vec![vec![0.0; n_gen]; target.element_count()];
        for (p, row) in ury.iter_mut().enumerate() {
            for (q, cell) in row.iter_mut().enumerate() {
                let g = &generated[q];
                let kind = target.element_kind(p);
                let mut c = floor_log(g.type_dist[kind.index()]);
                if let ElementKind::Primitive(pk) = kind {
                    let prim = &target.primitives[p];
                    let seg = &g.param_dists[pk.index()];
                    c += floor_log(seg[0][usize::from(prim.construction)]);
                    for (i, &b) in prim.params.iter().enumerate() {
                        c += floor_log(seg[i + 1][usize::from(b)]);
                    }
                }
                *cell = c;
            }
        }
        let mut bry = vec![vec![0.0; n_gen]; target.element_count()];
        for (ci, con) in target.constraints.iter().enumerate() {
            for q in 0..n_gen {
                let mut s = 0.0;
                for (rp, &pr) in con.refs.iter().enumerate() {
                    for j in 0..n_gen {
                        s += r.get(2 * q + rp, j) * ury[pr][j];
                    }
                }
                bry[n_p + ci][q] = s;
            }
        }
        let u = unary_cost_matrix(&generated, &target);
        let b = binary_cost_matrix(&u, &r, &target).map_err(|e| e.to_string())?;
        for p in 0..target.element_count() {
            for q in 0..n_gen {
                worst = worst.max((u[p][q] - ury[p][q]).abs()).max((b[p][q] - bry[p][q]).abs());
            }
        }

        let m = match_graphs(&generated, &r, &target, CostWeights::default()).map_err(|e| e.to_string())?;
        let inv = |e: usize| m.inverse[e].unwrap();
        let n_c = target.constraints.len().max(1) as f64;
        let mut sharp = 0.0;
        let mut bias = 0.0;
        for (ci, con) in target.constraints.iter().enumerate() {
            let q = inv(n_p + ci);
            for (rp, &pr) in con.refs.iter().enumerate() {
                sharp += floor_log(r.get(2 * q + rp, inv(pr)));
                for a in 0..ka {
                    bias += structures[q / k].get(2 * (q % k) + rp, k + a);
                }
            }
        }
        let srefs: Vec<&AssignmentMatrix> = structures.iter().collect();
        let got_sharp = loss_sharp(&r, &m.inverse, &target).map_err(|e| e.to_string())?;
        let got_bias = loss_bias(&srefs, k, &m.inverse, &target).map_err(|e| e.to_string())?;
        let ds = (got_sharp - sharp / n_c).abs();
        let db = (got_bias - bias / n_c).abs();
        worst = worst.max(ds).max(db);
        check(worst <= TOL, format!("trial {trial}: deviation {worst:e}"))?;
    }

    // Hard, correct decompositions cost nothing.
    let lib = {
        let mut l = ConceptLibrary::builtin(K, KA, 0.5);
        l.insert(synth::planted_concept(), 1);
        l
    };
    let rect = synth::rectangle_sketch();
    let parsed = parse_sketch(&rect, &lib).map_err(|e| e.to_string())?;
    let (l, m) = sketch_concepts::matching::decomposition_losses(&parsed.decomposition, &lib, &rect, None, &quant)
        .map_err(|e| e.to_string())?;
    let matched_bry: f64 = (0..rect.element_count()).map(|p| m.costs.binary[p][m.inverse[p].unwrap()]).sum();
    check(l.recon == 0.0 && l.sharp == 0.0 && l.bias == 0.0 && matched_bry == 0.0, format!("hard-correct losses {l:?}"))?;
    let slot = synth::slot_program();
    let (ls, _) = sketch_concepts::matching::decomposition_losses(&slot, &synth::slot_library(), &synth::slot_sketch(), None, &quant)
        .map_err(|e| e.to_string())?;
    check(ls.recon == 0.0 && ls.sharp == 0.0, format!("slot program losses {ls:?}"))?;

    let total = loss_total(1.0, 1.0, 1.0, 1.0, &LossWeights::default());
    check(total == 47.0, format!("loss_total(1,1,1,1) = {total}"))?;
    Ok(format!("100 soft instances within {worst:.1e} of loop oracles (tol 1e-9); hard-correct = 0; total(1,1,1,1) = 47"))
}

fn vq() -> Outcome {
    // Constant query: the nearest prototype converges geometrically.
    let mut book = Codebook::new(4, 6, 11);
    book.revival_period = 0;
    let q = vec![0.3, -0.2, 0.9, 0.1, -0.5, 0.4];
    let (code, d0) = book.nearest(&q).map_err(|e| e.to_string())?;
    for _ in 0..500 {
        let out = book.train_batch(std::slice::from_ref(&q)).map_err(|e| e.to_string())?;
        check(out.assignment.codes == [code], "constant query changed code")?;
    }
    let d500: f64 = book.prototype(code).iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let ratio = d500 / d0;
    check(ratio < 1e-2, format!("error ratio {ratio:e}"))?;

    // Decay-only codes keep their exact bits.
    let mut book = Codebook::new(5, 3, 12);
    let q = book.prototype(0).to_vec();
    let before: Vec<Vec<u64>> = (1..5).map(|i| book.prototype(i).iter().map(|x| x.to_bits()).collect()).collect();
    for _ in 0..99 {
        book.train_batch(std::slice::from_ref(&q)).map_err(|e| e.to_string())?;
    }
    let after: Vec<Vec<u64>> = (1..5).map(|i| book.prototype(i).iter().map(|x| x.to_bits()).collect()).collect();
    check(before == after, "decay-only prototype changed")?;

    // Revival: every 100 batches, one unused code, nothing else touched.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut book = Codebook::new(8, 2, 13);
    let centers = [book.prototype(0).to_vec(), book.prototype(1).to_vec()];
    let mut fired = Vec::new();
    for step in 1..=350u64 {
        let batch: Vec<Vec<f64>> =
            (0..4).map(|i| centers[i % 2].iter().map(|c| c + rng.gen_range(-0.05..0.05)).collect()).collect();
        let usage_before = book.usage().to_vec();
        let protos_before: Vec<Vec<f64>> = (0..8).map(|i| book.prototype(i).to_vec()).collect();
        let codes = book.assign(&batch).map_err(|e| e.to_string())?.codes;
        let out = book.train_batch(&batch).map_err(|e| e.to_string())?;
        if let Some(c) = out.revived {
            fired.push(step);
            check(usage_before[c] == 0 && !codes.contains(&c), format!("step {step}: revived used code {c}"))?;
            for i in (0..8).filter(|&i| i != c && !codes.contains(&i)) {
                check(book.prototype(i) == protos_before[i].as_slice(), format!("step {step}: code {i} touched"))?;
            }
        }
    }
    check(fired == [100, 200, 300], format!("revival at {fired:?}"))?;
    Ok(format!("EMA error ratio {ratio:.2e} after 500 steps (< 1e-2); decay-only bit-identical; revival at {fired:?}"))
}

fn planted_induction() -> Outcome {
    let (corpus, lib, order, induce_time) = planted();
    let target = lib.find_concept(&synth::planted_concept()).ok_or("planted concept not induced")?;
    check(order.first() == Some(&target), format!("first selected {:?}, planted is {target}", order.first()))?;
    let t = Instant::now();
    let mut hits = 0;
    for p in corpus {
        let r = parse_sketch(&p.sketch, lib).map_err(|e| e.to_string())?;
        let owner = r.provenance[p.planted[0]].instance;
        let whole = p.planted.iter().all(|&e| r.provenance[e].instance == owner);
        if whole && r.decomposition.instances[owner].type_ref == TypeRef::Library(target) {
            hits += 1;
        }
    }
    let total = *induce_time + t.elapsed();
    let frac = hits as f64 / corpus.len() as f64;
    check(frac >= 0.95, format!("parse assigns {hits}/{}", corpus.len()))?;
    check(total < INDUCTION_LIMIT, format!("took {total:.1?}"))?;
    Ok(format!("planted concept ranked first; parse assigns {hits}/{} occurrences; {total:.1?} (< 5 min)", corpus.len()))
}

fn modularity_sweep() -> Outcome {
    let (corpus, _, _, _) = planted();
    let quant = QuantizationSpec::default();
    let sketches: Vec<SketchGraph> = corpus.iter().map(|p| p.sketch.clone()).collect();
    let mut means = Vec::new();
    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let (lib, _) = induce_library(&sketches, &InduceOptions { lambda_bias: lambda, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let mut vals = Vec::new();
        for s in &sketches {
            let r = parse_sketch(s, &lib).map_err(|e| e.to_string())?;
            let a = r.decomposition.assemble(&lib).map_err(|e| e.to_string())?;
            let f = fscore(&a.sketch, s, &quant);
            if let Some(m) = modularity(&a.sketch, &a.provenance, &f) {
                vals.push(m);
            }
        }
        means.push(vals.iter().sum::<f64>() / vals.len().max(1) as f64);
    }
    let ok = means.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.2}")).collect();
    check(ok, format!("means {shown:?}"))?;
    Ok(format!("mean modularity over λ = 0, 0.25, 0.5, 1.0: {}", shown.join(" <= ")))
}

/// Whether the elements added by a completion are exactly the removed ones,
/// up to a relabeling of the new primitives.
fn same_structure(full: &SketchGraph, keep: usize, got: &SketchGraph) -> bool {
    let want_p = &full.primitives[keep..];
    let got_p = &got.primitives[keep..];
    if want_p.len() != got_p.len() {
        return false;
    }
    let key = |s: &SketchGraph, map: &dyn Fn(usize) -> usize| {
        let mut v: Vec<(usize, Vec<usize>)> = s
            .constraints
            .iter()
            .filter(|c| c.refs.iter().any(|&r| r >= keep))
            .map(|c| (c.kind.index(), c.refs.iter().map(|&r| map(r)).collect()))
            .collect();
        v.sort();
        v
    };
    let want = key(full, &|r| r);
    let n = want_p.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let kinds_ok = (0..n).all(|i| got_p[i].kind == want_p[perm[i]].kind);
        if kinds_ok && key(got, &|r| if r < keep { r } else { keep + perm[r - keep] }) == want {
            return true;
        }
        // Next permutation.
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { return false };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

fn completion() -> Outcome {
    let (_, lib, _, _) = planted();
    let quant = QuantizationSpec::default();
    let opts = CompletionOptions::default();
    let corpus = synth::completion_corpus(100, 99);
    let mut exact = 0;
    let mut total = 0;
    let mut by_ratio: BTreeMap<usize, (f64, f64, f64, usize)> = BTreeMap::new();
    for (i, ps) in corpus.iter().enumerate() {
        for removed in 1..=2 {
            let partial = remove_last(&ps.sketch, removed);
            let keep = partial.sketch.primitives.len();
            let cands = complete_sketch(&partial.sketch, lib, &opts).map_err(|e| e.to_string())?;
            let best = cands.first().ok_or(format!("sketch {i}: no candidate"))?;
            check(best.sketch.primitives[..keep] == partial.sketch.primitives[..], "partial primitives changed")?;
            check(best.sketch.constraints[..partial.sketch.constraints.len()] == partial.sketch.constraints[..], "partial constraints changed")?;
            total += 1;
            if same_structure(&ps.sketch, keep, &best.sketch) {
                exact += 1;
            }
            let f = fscore(&best.sketch, &ps.sketch, &quant);
            let e = by_ratio.entry(removed).or_default();
            e.0 += partial.ratio;
            e.1 += f.primitive_f;
            e.2 += f.constraint_f;
            e.3 += 1;
        }
    }
    let mut points: Vec<CurvePoint> = by_ratio
        .values()
        .map(|&(r, p, c, n)| CurvePoint { ratio: r / n as f64, primitive_f: p / n as f64, constraint_f: c / n as f64 })
        .collect();
    let sketches: Vec<SketchGraph> = corpus.iter().take(40).map(|p| p.sketch.clone()).collect();
    let eval = evaluate_corpus(lib, &sketches, &EvalOptions { ratios: vec![0.1, 0.2, 0.3, 0.4, 0.5], ..Default::default() })
        .map_err(|e| e.to_string())?;
    points.extend(eval.completion);
    let csv = curves_csv(&points);
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("completion_curves.csv");
    std::fs::write(&path, &csv).map_err(|e| e.to_string())?;
    check(csv.lines().count() == points.len() + 1 && csv.starts_with("ratio,primitive_f,constraint_f"), "bad CSV")?;
    check(exact == total, format!("top-1 exact on {exact}/{total}"))?;
    Ok(format!("top-1 structure exact on {exact}/{total} confined partials; {} curve points written to {}", points.len(), path.display()))
}

fn canonicalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let structures: Vec<ConceptType> = (0..500).map(|_| random_concept(&mut rng, 3, 4)).collect();
    let keys: Vec<Vec<u8>> = structures.iter().map(canonical_key).collect();
    for (i, t) in structures.iter().enumerate() {
        let p = permuted(t, &mut rng);
        check(canonical_key(&p) == keys[i], format!("structure {i}: permutation changed the key"))?;
        check(isomorphic(t, &p), format!("structure {i}: oracle rejects its own permutation"))?;
    }
    let (mut iso_pairs, mut false_merges, mut false_splits) = (0, 0, 0);
    for i in 0..structures.len() {
        for j in i + 1..structures.len() {
            let iso = isomorphic(&structures[i], &structures[j]);
            let same = keys[i] == keys[j];
            iso_pairs += usize::from(iso);
            false_merges += usize::from(same && !iso);
            false_splits += usize::from(iso && !same);
        }
    }
    check(false_merges == 0 && false_splits == 0, format!("{false_merges} false merges, {false_splits} false splits"))?;
    check(iso_pairs > 0, "no isomorphic pairs drawn")?;
    Ok(format!("500 structures + permutations: key equality iff isomorphic over 124750 pairs ({iso_pairs} isomorphic), zero false merges"))
}

fn pipeline() -> Outcome {
    let quant = QuantizationSpec::default();
    check(
        (quant.bins(ParamKind::Coord), quant.bins(ParamKind::Length), quant.bins(ParamKind::Angle)) == (80, 20, 30),
        "bin counts",
    )?;

    // Size filter keeps [20, 50] inclusive.
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let sized: Vec<SketchGraph> = [19, 20, 50, 51].iter().map(|&s| synth::random_sketch(&mut rng, s)).collect();
    let records = CorpusFile::from_graphs(&sized, &quant).sketches;
    let sizes: Vec<usize> = records.iter().map(|r| r.primitives.len() + r.constraints.len()).collect();
    check(sizes == [19, 20, 50, 51], format!("sizes {sizes:?}"))?;
    let no_aug = IngestOptions { augment: false, ..Default::default() };
    let out = ingest_records(&records, "sizes", &no_aug).map_err(|e| e.to_string())?;
    check(out.report.kept == 2 && out.report.dropped_size == 2, format!("size filter {:?}", out.report))?;
    let kept: Vec<usize> = out.records.iter().map(|r| r.primitives.len() + r.constraints.len()).collect();
    check(kept == [20, 50], format!("kept sizes {kept:?}"))?;

    // 128×128 raster dedup: a translated, scaled copy normalizes onto the same bitmap.
    let base = synth::planted_corpus(1, 1010).remove(0).sketch;
    let mut rec = SketchRecord::from_graph(&base, &quant);
    rec.primitives.iter_mut().for_each(|p| p.quantized = None);
    rec.constraints.iter_mut().for_each(|c| c.quantized = None);
    let mut moved = rec.clone();
    for p in &mut moved.primitives {
        p.quantized = None;
        let schema = p.kind.schema();
        for (v, k) in p.params.iter_mut().zip(schema) {
            *v = match k {
                ParamKind::Coord => *v * 3.0 + 7.0,
                ParamKind::Length => *v * 3.0,
                ParamKind::Angle => *v,
            };
        }
    }
    let other = synth::planted_corpus(1, 2020).remove(0).sketch;
    let inputs = vec![rec.clone(), moved, SketchRecord::from_graph(&other, &quant)];
    let out = ingest_records(&inputs, "dedup", &no_aug).map_err(|e| e.to_string())?;
    check(out.report.dropped_duplicate == 1 && out.report.kept == 2, format!("dedup {:?}", out.report))?;
    check(out.records[0] == normalize_first(&rec, &quant), "dedup did not keep the first occurrence")?;
    let bm = rasterize(&out.sketches[0], &quant);
    check(bm.occupied_rows().iter().all(|&r| r < RASTER_SIZE) && RASTER_SIZE == 128, "raster size")?;

    // Shrink augmentation: one copy per kept sketch, scaled by a factor in [0.5, 0.8].
    let aug = IngestOptions { seed: 3, ..Default::default() };
    let corpus = CorpusFile::from_graphs(&synth::planted_corpus(30, 3030).into_iter().map(|p| p.sketch).collect::<Vec<_>>(), &quant).sketches;
    let out = ingest_records(&corpus, "aug", &aug).map_err(|e| e.to_string())?;
    check(out.report.augmented == out.report.kept, "one augmented copy per sketch")?;
    let extent = |r: &SketchRecord| {
        r.primitives
            .iter()
            .flat_map(|p| p.params.iter().zip(p.kind.schema()).filter(|(_, k)| **k == ParamKind::Coord).map(|(v, _)| v.abs()))
            .fold(0.0, f64::max)
    };
    let kept = out.report.kept;
    let mut lo: f64 = 1.0;
    let mut hi: f64 = 0.0;
    for i in 0..kept {
        let f = extent(&out.records[kept + i]) / extent(&out.records[i]);
        lo = lo.min(f);
        hi = hi.max(f);
    }
    check(lo >= 0.5 - 1e-12 && hi <= 0.8 + 1e-12, format!("shrink factors in [{lo}, {hi}]"))?;
    Ok(format!("bins 80/20/30; sizes 20 and 50 kept, 19 and 51 dropped; 128x128 dedup drops the copy; shrink factors in [{lo:.3}, {hi:.3}]"))
}

fn normalize_first(r: &SketchRecord, quant: &QuantizationSpec) -> SketchRecord {
    sketch_concepts::sketch::normalize::normalize_record(r, quant).unwrap()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 round-trip", roundtrip),
        ("2 cross-reference composition", composition),
        ("3 hungarian optimality", hungarian),
        ("4 loss arithmetic", losses),
        ("5 vq dynamics", vq),
        ("6 planted induction", planted_induction),
        ("7 modularity monotonicity", modularity_sweep),
        ("8 completion exactness", completion),
        ("9 canonicalization", canonicalization),
        ("10 data pipeline", pipeline),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS [{name}] {msg} ({:.1?})", t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{name}] {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
