//! Generates soft elements from a decomposition, matches them to the target
//! sketch and evaluates every loss term.

use sketch_concepts::matching::{
    decomposition_losses, generate, library_codebook, match_graphs, CostWeights, LossWeights,
};
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let quant = QuantizationSpec::default();
    let lib = synth::slot_library();
    let program = synth::slot_program();
    let target = synth::slot_sketch();

    let generated = generate(&program, &lib, &quant)?;
    let r = program.compose_cross_refs(&lib)?;
    let m = match_graphs(&generated, &r, &target, CostWeights::default())?;
    println!("{} generated slots against {} target elements", generated.len(), target.element_count());
    let row: Vec<String> = m.costs.combined()[0].iter().take(6).map(|c| format!("{c:.1}")).collect();
    println!("costs of target primitive 0 against the first slots: {}", row.join(" "));

    let book = library_codebook(&lib)?;
    let (losses, m) = decomposition_losses(&program, &lib, &target, Some(&book), &quant)?;
    println!("assignment cost {:.3e}; sigma = {:?}", m.cost, m.sigma);
    println!("losses: {losses:?}");
    println!("weighted total: {:.3e}", losses.total(&LossWeights::default()));
    Ok(())
}
