//! Corpus evaluation: reconstruction F-scores, modularity across λ, losses,
//! completion curves and library statistics.

use sketch_concepts::eval::{curves_csv, evaluate_corpus, library_stats, EvalOptions};
use sketch_concepts::induction::parse::parse_sketch;
use sketch_concepts::induction::select::{induce_library, InduceOptions};
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let sketches: Vec<_> = synth::planted_corpus(100, 3).into_iter().map(|p| p.sketch).collect();
    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let (lib, _) = induce_library(&sketches, &InduceOptions { lambda_bias: lambda, ..Default::default() })?;
        let r = evaluate_corpus(&lib, &sketches, &EvalOptions::default())?;
        println!(
            "λ = {lambda:<4}  {} concepts  F = {:.3}/{:.3}  modularity {:.2}%",
            lib.len() - lib.builtin_count(),
            r.primitive_f,
            r.constraint_f,
            r.modularity.unwrap_or(f64::NAN)
        );
    }

    let (lib, _) = induce_library(&sketches, &InduceOptions::default())?;
    let held_out: Vec<_> = synth::completion_corpus(30, 4).into_iter().map(|p| p.sketch).collect();
    let opts = EvalOptions { losses: true, ratios: vec![0.05, 0.1, 0.2, 0.3], ..Default::default() };
    let r = evaluate_corpus(&lib, &held_out, &opts)?;
    if let Some(l) = &r.losses {
        println!("mean losses {:?}, weighted {:.3}", l.mean, l.mean_total);
    }
    print!("{}", curves_csv(&r.completion));

    let parses = held_out.iter().map(|s| parse_sketch(s, &lib)).collect::<sketch_concepts::Result<Vec<_>>>()?;
    let decomps: Vec<_> = parses.iter().map(|p| &p.decomposition).collect();
    let stats = library_stats(&lib, &decomps);
    println!("top usage {:?}", &stats.usage[..5]);
    println!("complexity histogram {:?}", stats.complexity);
    Ok(())
}
