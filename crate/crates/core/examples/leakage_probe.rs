//! Perturb the values of other-group image patches and watch the attribute
//! token outputs, with and without the group constraint.
//!
//!     cargo run --example leakage_probe

use interleaved_cond::toy::{leakage_probe, MaskMode, ModelDims, RawPatches, ToyModelParams};
use interleaved_cond::{build_sequence, AttributeVocabulary, Segment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = AttributeVocabulary::default();
    let seq = build_sequence(
        &[
            Segment::special("subject"),
            Segment::image("cat", 3),
            Segment::special("style"),
            Segment::image("sketch", 2),
            Segment::text("the cat, drawn like the sketch"),
        ],
        &vocab,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let dims = ModelDims { d: 8, p: 4, attributes: vocab.len(), max_positions: seq.len(), layers: 1 };
    let params = ToyModelParams::random(&mut rng, dims);
    let raw: RawPatches = seq
        .image_blocks
        .iter()
        .map(|b| (b.image_id.clone(), (0..b.patch_count).map(|_| (0..4).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()))
        .collect();

    for mode in [MaskMode::Grouped, MaskMode::Ungrouped] {
        let probe = leakage_probe(&seq, &raw, &params, mode)?;
        println!("{mode:?}: max |d out / d v| = {:e} over {} blocked pairs", probe.max_abs, probe.blocked_pairs);
    }
    Ok(())
}
