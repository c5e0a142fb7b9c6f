//! EMA codebook training on two clusters, dead-code revival, and a checkpoint round trip.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use sketch_concepts::vq::Codebook;

fn main() -> sketch_concepts::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let centers = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let mut book = Codebook::new(4, 3, 7);
    for step in 0..300 {
        let batch: Vec<Vec<f64>> = (0..16)
            .map(|i| centers[i % 2].iter().map(|c| c + noise.sample(&mut rng)).collect())
            .collect();
        let out = book.train_batch(&batch)?;
        if let Some(code) = out.revived {
            println!("step {}: revived code {code}", step + 1);
        }
        if step % 100 == 0 {
            println!("step {}: L_vq = {:.4}", step + 1, out.assignment.loss);
        }
    }
    for i in 0..book.len() {
        let p: Vec<String> = book.prototype(i).iter().map(|v| format!("{v:.3}")).collect();
        println!("code {i}: [{}]", p.join(", "));
    }

    let mut bytes = Vec::new();
    book.write_checkpoint(&mut bytes)?;
    let back = Codebook::read_checkpoint(&mut bytes.as_slice())?;
    println!("checkpoint: {} bytes, identical prototypes: {}", bytes.len(), (0..4).all(|i| back.prototype(i) == book.prototype(i)));
    Ok(())
}
