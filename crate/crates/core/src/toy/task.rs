//! Synthetic denoising tasks.
//!
//! * Copy: one reference image tagged with a random attribute; the target is
//!   the reference patches.
//! * Conflict: two reference images, one tagged `subject` and one tagged
//!   `style`, in random order and with jittered positions. Each image is a
//!   single feature vector repeated over its patches (plus small noise) and
//!   the target is the `subject` image's vector. The attribute token is placed
//!   after its image so it can summarise it; nothing else in the sequence says
//!   which image is which, so the model has to route through the right token.

use rand::Rng;
use rand_distr::StandardNormal;

use super::model::{DenoiseExample, LatentState, MaskMode, RawPatches};
use crate::error::ToyError;
use crate::sequence::{build_sequence, Segment};
use crate::vocab::AttributeVocabulary;

pub const SELECTED_ATTRIBUTE: &str = "subject";
pub const DISTRACTOR_ATTRIBUTE: &str = "style";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Copy,
    Conflict,
}

#[derive(Debug, Clone, Copy)]
pub struct TaskShape {
    pub p: usize,
    pub target_patches: u32,
    pub schedule_len: usize,
}

/// Timestep choice for a generated sample.
#[derive(Debug, Clone, Copy)]
pub enum Timestep {
    /// Uniform over `[min, schedule_len)`.
    Random { min: usize },
    Fixed(usize),
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn latent<R: Rng + ?Sized>(rng: &mut R, clean: &[Vec<f64>], shape: TaskShape, timestep: Timestep) -> Result<LatentState, ToyError> {
    let schedule = super::model::linear_schedule(shape.schedule_len);
    let t = match timestep {
        Timestep::Random { min } => rng.gen_range(min.min(shape.schedule_len - 1)..shape.schedule_len),
        Timestep::Fixed(t) => t,
    };
    let noise: Vec<Vec<f64>> = clean.iter().map(|c| gaussian_vec(rng, c.len())).collect();
    LatentState::noised(clean, &noise, t, schedule)
}

pub fn sample<R: Rng + ?Sized>(
    rng: &mut R,
    kind: TaskKind,
    vocab: &AttributeVocabulary,
    shape: TaskShape,
    timestep: Timestep,
    mode: MaskMode,
) -> Result<DenoiseExample, ToyError> {
    match kind {
        TaskKind::Copy => copy_sample(rng, vocab, shape, timestep, mode),
        TaskKind::Conflict => conflict_sample(rng, vocab, shape, timestep, mode),
    }
}

pub fn copy_sample<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &AttributeVocabulary,
    shape: TaskShape,
    timestep: Timestep,
    mode: MaskMode,
) -> Result<DenoiseExample, ToyError> {
    let (attribute, _) = vocab.entries().nth(rng.gen_range(0..vocab.len())).expect("non-empty vocabulary");
    let n = shape.target_patches;
    let segments = [Segment::plain("copy"), Segment::special(attribute), Segment::image("ref", n)];
    let seq = build_sequence(&segments, vocab)?;
    let patches: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(rng, shape.p)).collect();
    let z = latent(rng, &patches, shape, timestep)?;
    let mut raw = RawPatches::new();
    raw.insert("ref".into(), patches.clone());
    DenoiseExample::new(&seq, &raw, &z, &patches, mode)
}

pub fn conflict_sample<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &AttributeVocabulary,
    shape: TaskShape,
    timestep: Timestep,
    mode: MaskMode,
) -> Result<DenoiseExample, ToyError> {
    for name in [SELECTED_ATTRIBUTE, DISTRACTOR_ATTRIBUTE] {
        if !vocab.contains(name) {
            return Err(ToyError::Config(format!("conflict task needs attribute {name:?} in the vocabulary")));
        }
    }
    let selected_first = rng.gen_bool(0.5);
    let (attr_a, attr_b) = if selected_first {
        (SELECTED_ATTRIBUTE, DISTRACTOR_ATTRIBUTE)
    } else {
        (DISTRACTOR_ATTRIBUTE, SELECTED_ATTRIBUTE)
    };
    let n_a = rng.gen_range(1..=3u32);
    let n_b = rng.gen_range(1..=3u32);
    let feature_a = gaussian_vec(rng, shape.p);
    let feature_b = gaussian_vec(rng, shape.p);

    let mut segments = Vec::new();
    for _ in 0..rng.gen_range(0..=1) {
        segments.push(Segment::plain("combine"));
    }
    segments.push(Segment::image("A", n_a));
    segments.push(Segment::special_bound(attr_a, "A"));
    segments.push(Segment::plain("and"));
    segments.push(Segment::image("B", n_b));
    segments.push(Segment::special_bound(attr_b, "B"));
    let seq = build_sequence(&segments, vocab)?;

    let mut raw = RawPatches::new();
    for (id, n, feature) in [("A", n_a, &feature_a), ("B", n_b, &feature_b)] {
        let patches = (0..n)
            .map(|_| feature.iter().map(|f| f + 0.1 * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        raw.insert(id.to_string(), patches);
    }
    let selected = if selected_first { feature_a } else { feature_b };
    let clean: Vec<Vec<f64>> = (0..shape.target_patches).map(|_| selected.clone()).collect();
    let z = latent(rng, &clean, shape, timestep)?;
    DenoiseExample::new(&seq, &raw, &z, &clean, mode)
}
