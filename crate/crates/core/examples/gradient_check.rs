//! Compare the hand-written backward pass with central differences.
//!
//!     cargo run --example gradient_check

use interleaved_cond::gen::{random_segments, SequenceLimits};
use interleaved_cond::toy::{grad_check, linear_schedule, DenoiseExample, LatentState, MaskMode, ModelDims, ToyModelParams};
use interleaved_cond::{build_sequence, AttributeVocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = AttributeVocabulary::default();
    let limits = SequenceLimits { max_len: 12, max_images: 3, max_specials: 3, max_texts: 3, max_patches: 3 };
    let p = 3;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = build_sequence(&random_segments(&mut rng, &vocab, limits), &vocab)?;
        let mut vec = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
        let raw = seq
            .image_blocks
            .iter()
            .map(|b| (b.image_id.clone(), (0..b.patch_count).map(|_| vec(p)).collect()))
            .collect();
        let clean = vec![vec(p), vec(p)];
        let noise = vec![vec(p), vec(p)];
        let latent = LatentState::noised(&clean, &noise, 5, linear_schedule(10))?;
        let example = DenoiseExample::new(&seq, &raw, &latent, &clean, MaskMode::Grouped)?;

        let dims = ModelDims { d: 8, p, attributes: vocab.len(), max_positions: 16, layers: 2 };
        let params = ToyModelParams::random(&mut rng, dims);
        let report = grad_check(&example, &params)?;
        println!(
            "seed {seed}: L = {:>2}, {} parameters, max rel error {:.2e}, worst {:?}",
            example.seq.len(),
            report.checked,
            report.max_rel_error,
            report.worst
        );
    }
    Ok(())
}
