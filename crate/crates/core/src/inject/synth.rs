//! Seeded synthetic annotation corpora.
//!
//! Family counts are apportioned exactly from a weight vector (largest
//! remainder), so a corpus of `n` records always holds the same per-family
//! counts for the same weights regardless of seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::record::{AnnotationRecord, Entity, ImageRole, ImageSpec, TaskFamily};
use crate::vocab::AttributeVocabulary;

/// Relative family sizes of the reference 700K-sequence corpus, in thousands,
/// ordered as [`TaskFamily::ALL`].
pub const REFERENCE_FAMILY_WEIGHTS: [f64; 6] = [100.0, 226.0, 153.0, 41.6, 70.0, 110.0];

const PHRASES: &[&str] = &[
    "the man",
    "the blue jacket",
    "the car",
    "the dog",
    "the old street",
    "the red bag",
    "the painting",
    "the woman",
    "the lamp",
    "the city background",
    "the wooden table",
    "the sunset light",
];

const CONNECTIVES: &[&str] = &[" with ", " next to ", " wearing ", " in front of ", " beside ", " under "];

/// Splits `total` into per-family counts proportional to `weights`.
pub fn apportion(total: usize, weights: &[f64; 6]) -> [usize; 6] {
    let sum: f64 = weights.iter().sum();
    assert!(sum > 0.0 && weights.iter().all(|w| *w >= 0.0), "weights must be non-negative with a positive sum");
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts = [0usize; 6];
    for (c, q) in counts.iter_mut().zip(&quotas) {
        *c = q.floor() as usize;
    }
    let mut rest = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..6).collect();
    // Largest fractional part first; ties go to the earlier family.
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        counts[i] += 1;
        rest -= 1;
    }
    counts
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub records: usize,
    pub weights: [f64; 6],
    pub seed: u64,
    pub max_references: usize,
    pub max_patches: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { records: 1000, weights: REFERENCE_FAMILY_WEIGHTS, seed: 0, max_references: 3, max_patches: 4 }
    }
}

/// Generates well-formed records that all pass triage against `vocab`.
pub fn generate_corpus(config: &SynthConfig, vocab: &AttributeVocabulary) -> Vec<AnnotationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let counts = apportion(config.records, &config.weights);
    let mut families: Vec<TaskFamily> = TaskFamily::ALL
        .iter()
        .zip(counts)
        .flat_map(|(&f, n)| std::iter::repeat_n(f, n))
        .collect();
    families.shuffle(&mut rng);
    families.into_iter().map(|f| generate_record(&mut rng, f, config, vocab)).collect()
}

fn generate_record<R: Rng>(rng: &mut R, family: TaskFamily, config: &SynthConfig, vocab: &AttributeVocabulary) -> AnnotationRecord {
    let attributes: Vec<&str> = vocab.entries().map(|(n, _)| n).collect();
    let references = rng.gen_range(1..=config.max_references.max(1));

    let mut caption = String::from("Create an image of ");
    let mut entities = Vec::new();
    let mut images = Vec::new();
    let mut phrases: Vec<&str> = PHRASES.to_vec();
    phrases.shuffle(rng);
    let mut phrase_iter = phrases.into_iter().cycle();

    for r in 0..references {
        let image_id = format!("ref_{r}");
        images.push(ImageSpec {
            image_id: image_id.clone(),
            patch_count: rng.gen_range(1..=config.max_patches.max(1)),
            role: ImageRole::Reference,
        });
        // Attribute-dense references carry two mentions.
        let mentions = if rng.gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..mentions {
            if !entities.is_empty() {
                caption.push_str(CONNECTIVES[rng.gen_range(0..CONNECTIVES.len())]);
            }
            let phrase = phrase_iter.next().expect("cycled iterator");
            let start = caption.len();
            caption.push_str(phrase);
            entities.push(Entity {
                span: start..caption.len(),
                attribute: attributes[rng.gen_range(0..attributes.len())].to_string(),
                image_ref: image_id.clone(),
            });
        }
    }
    caption.push('.');

    if family != TaskFamily::Layout || rng.gen_bool(0.5) {
        images.push(ImageSpec {
            image_id: "target".to_string(),
            patch_count: config.max_patches.max(1),
            role: ImageRole::Target,
        });
    }

    AnnotationRecord { caption, entities, images, task_family: family }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inject::{record::check_record, triage, Triage};

    #[test]
    fn apportion_is_exact() {
        assert_eq!(apportion(0, &REFERENCE_FAMILY_WEIGHTS), [0; 6]);
        let c = apportion(7006, &REFERENCE_FAMILY_WEIGHTS);
        assert_eq!(c, [1000, 2260, 1530, 416, 700, 1100]);
        for n in [1, 5, 99, 1000, 12345] {
            assert_eq!(apportion(n, &REFERENCE_FAMILY_WEIGHTS).iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn generated_records_are_clean() {
        let vocab = AttributeVocabulary::default();
        let cfg = SynthConfig { records: 200, ..Default::default() };
        let corpus = generate_corpus(&cfg, &vocab);
        assert_eq!(corpus.len(), 200);
        for rec in &corpus {
            check_record(rec).unwrap();
            assert_eq!(triage(rec, &vocab), Triage::Keep);
        }
        assert_eq!(generate_corpus(&cfg, &vocab), corpus);
    }
}
