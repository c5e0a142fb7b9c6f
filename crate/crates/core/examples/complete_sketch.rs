//! Removes rectangle sides from planted sketches and asks the induced library
//! to put them back.

use sketch_concepts::completion::{complete_sketch, remove_last, CompletionOptions};
use sketch_concepts::eval::{curves_csv, fscore, CurvePoint};
use sketch_concepts::induction::select::{induce_library, InduceOptions};
use sketch_concepts::sketch::QuantizationSpec;
use sketch_concepts::synth;

fn main() -> sketch_concepts::Result<()> {
    let train: Vec<_> = synth::planted_corpus(200, 17).into_iter().map(|p| p.sketch).collect();
    let (lib, _) = induce_library(&train, &InduceOptions::default())?;
    let quant = QuantizationSpec::default();
    let opts = CompletionOptions::default();

    let mut points = Vec::new();
    for removed in 1..=2 {
        let (mut pf, mut cf, mut exact, mut n) = (0.0, 0.0, 0, 0);
        for ps in synth::completion_corpus(50, 99) {
            let partial = remove_last(&ps.sketch, removed);
            let cands = complete_sketch(&partial.sketch, &lib, &opts)?;
            let Some(best) = cands.first() else { continue };
            let f = fscore(&best.sketch, &ps.sketch, &quant);
            pf += f.primitive_f;
            cf += f.constraint_f;
            n += 1;
            if f.primitive_f == 1.0 && f.constraint_f == 1.0 {
                exact += 1;
            }
        }
        println!("{removed} side(s) removed: {exact}/{n} exact");
        points.push(CurvePoint { ratio: removed as f64 / 4.0, primitive_f: pf / n as f64, constraint_f: cf / n as f64 });
    }
    print!("{}", curves_csv(&points));
    Ok(())
}
