//! Seeded generators for random well-formed segment lists.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::sequence::{Segment, TextKind};
use crate::vocab::AttributeVocabulary;

#[derive(Debug, Clone, Copy)]
pub struct SequenceLimits {
    pub max_len: usize,
    pub max_images: usize,
    pub max_specials: usize,
    pub max_texts: usize,
    pub max_patches: u32,
}

impl Default for SequenceLimits {
    fn default() -> Self {
        Self { max_len: 64, max_images: 4, max_specials: 6, max_texts: 6, max_patches: 8 }
    }
}

/// Random canonical segment list within `limits`.
///
/// Special tokens bind to a random image; the binding is left implicit when
/// that image is the next one in the list, so `to_segments` reproduces the
/// output exactly. Specials are only emitted when at least one image exists.
pub fn random_segments<R: Rng + ?Sized>(rng: &mut R, vocab: &AttributeVocabulary, limits: SequenceLimits) -> Vec<Segment> {
    let images = rng.gen_range(0..=limits.max_images);
    let specials = if images == 0 { 0 } else { rng.gen_range(0..=limits.max_specials) };
    let mut texts = rng.gen_range(0..=limits.max_texts);
    if images + specials + texts == 0 {
        texts = 1;
    }
    let fixed = specials + texts;
    assert!(fixed + images <= limits.max_len, "limits leave no room for patches");
    let mut budget = limits.max_len - fixed;

    #[derive(Clone, Copy)]
    enum Slot {
        Text,
        Special,
        Image(usize),
    }
    let mut slots: Vec<Slot> = Vec::new();
    slots.extend(std::iter::repeat_n(Slot::Text, texts));
    slots.extend(std::iter::repeat_n(Slot::Special, specials));
    slots.extend((0..images).map(Slot::Image));
    slots.shuffle(rng);

    let mut patch_counts = Vec::with_capacity(images);
    for i in 0..images {
        let reserve = images - i - 1;
        let cap = (budget - reserve).min(limits.max_patches as usize).max(1);
        let n = rng.gen_range(1..=cap);
        budget -= n;
        patch_counts.push(n as u32);
    }

    let image_order: Vec<usize> = slots
        .iter()
        .filter_map(|s| if let Slot::Image(i) = s { Some(*i) } else { None })
        .collect();
    let mut images_seen = 0;
    let mut out = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot {
            Slot::Text => {
                let kind = if rng.gen_bool(0.5) { TextKind::Text } else { TextKind::Plain };
                out.push(Segment::Text { kind, text: format!("w{}", rng.gen_range(0..1000)) });
            }
            Slot::Special => {
                let (name, _) = vocab.entries().nth(rng.gen_range(0..vocab.len())).expect("non-empty vocabulary");
                let target = image_order[rng.gen_range(0..images)];
                let next = image_order.get(images_seen).copied();
                let bind = (next != Some(target)).then(|| format!("img{target}"));
                out.push(Segment::Special { attribute: name.to_string(), bind });
            }
            Slot::Image(i) => {
                images_seen += 1;
                out.push(Segment::image(format!("img{i}"), patch_counts[i]));
            }
        }
    }
    out
}
