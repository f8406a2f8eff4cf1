#![allow(dead_code)]

use interleaved_cond::gen::{random_segments, SequenceLimits};
use interleaved_cond::inject::{AnnotationRecord, Entity, ImageRole, ImageSpec, TaskFamily};
use interleaved_cond::{build_sequence, AttributeVocabulary, InterleavedSequence, Segment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn vocab() -> AttributeVocabulary {
    AttributeVocabulary::default()
}

/// 0 plain, 1 `<id>` g1, 2 text, 3–4 image A g1, 5 `<style>` g2, 6–7 image B
/// g2, 8 text.
pub fn worked_segments() -> Vec<Segment> {
    vec![
        Segment::plain("put"),
        Segment::special("id"),
        Segment::text("this person"),
        Segment::image("A", 2),
        Segment::special("style"),
        Segment::image("B", 2),
        Segment::text("in a garden"),
    ]
}

pub fn worked_sequence() -> InterleavedSequence {
    build_sequence(&worked_segments(), &vocab()).unwrap()
}

pub fn random_sequence(seed: u64) -> (Vec<Segment>, InterleavedSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let segs = random_segments(&mut rng, &vocab(), SequenceLimits::default());
    let seq = build_sequence(&segs, &vocab()).unwrap();
    (segs, seq)
}

pub const JACKET_CAPTION: &str = "Make the man wear the blue jacket and stand beside the car.";

fn span(caption: &str, phrase: &str) -> std::ops::Range<usize> {
    let start = caption.find(phrase).unwrap();
    start..start + phrase.len()
}

pub fn entity(caption: &str, phrase: &str, attribute: &str, image: &str) -> Entity {
    Entity { span: span(caption, phrase), attribute: attribute.into(), image_ref: image.into() }
}

pub fn image(id: &str, patches: u32, role: ImageRole) -> ImageSpec {
    ImageSpec { image_id: id.into(), patch_count: patches, role }
}

pub fn jacket_record() -> AnnotationRecord {
    let c = JACKET_CAPTION;
    AnnotationRecord {
        caption: c.into(),
        entities: vec![
            entity(c, "the man", "id", "portrait"),
            entity(c, "the blue jacket", "clothing", "jacket"),
            entity(c, "the car", "subject", "car"),
        ],
        images: vec![
            image("portrait", 4, ImageRole::Reference),
            image("jacket", 3, ImageRole::Reference),
            image("car", 2, ImageRole::Reference),
            image("out", 4, ImageRole::Target),
        ],
        task_family: TaskFamily::Compositional,
    }
}
