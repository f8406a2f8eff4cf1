//! Token injection: annotated captions to interleaved sequences.
//!
//! Each annotated entity span is preceded by its attribute token and followed
//! by the referenced image block; the text between spans is kept verbatim as
//! plain prose. Records whose references are ambiguous or unresolved are
//! discarded by [`triage`] before injection.

mod record;
pub mod synth;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use record::{parse_annotation, AnnotationRecord, Entity, ImageRole, ImageSpec, TaskFamily};

use crate::error::SequenceError;
use crate::sequence::{build_sequence, InterleavedSequence, Segment};
use crate::vocab::AttributeVocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    /// An entity names an attribute outside the vocabulary.
    UnknownAttribute,
    /// One span is bound to two different images.
    AmbiguousReference,
    /// A reference image no entity points at.
    UnreferencedImage,
    /// The record did not parse or failed structural checks.
    ParseError,
    /// Injection produced no valid sequence.
    InjectFailed,
}

impl DiscardReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DiscardReason::UnknownAttribute => "unknown_attribute",
            DiscardReason::AmbiguousReference => "ambiguous_reference",
            DiscardReason::UnreferencedImage => "unreferenced_image",
            DiscardReason::ParseError => "parse_error",
            DiscardReason::InjectFailed => "inject_failed",
        }
    }
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triage {
    Keep,
    Discard(DiscardReason),
}

/// Keep/discard decision for a parsed record. Checks run in a fixed order:
/// unknown attribute, then ambiguous span binding, then unreferenced image.
pub fn triage(ann: &AnnotationRecord, vocab: &AttributeVocabulary) -> Triage {
    if ann.entities.iter().any(|e| !vocab.contains(&e.attribute)) {
        return Triage::Discard(DiscardReason::UnknownAttribute);
    }

    let mut span_image: HashMap<(usize, usize), &str> = HashMap::new();
    for e in &ann.entities {
        let key = (e.span.start, e.span.end);
        match span_image.get(&key) {
            Some(&img) if img != e.image_ref => return Triage::Discard(DiscardReason::AmbiguousReference),
            Some(_) => {}
            None => {
                span_image.insert(key, &e.image_ref);
            }
        }
    }

    let referenced: HashSet<&str> = ann.entities.iter().map(|e| e.image_ref.as_str()).collect();
    if ann.references().any(|img| !referenced.contains(img.image_id.as_str())) {
        return Triage::Discard(DiscardReason::UnreferencedImage);
    }
    Triage::Keep
}

/// Builds the interleaved sequence for a record that passed triage.
///
/// Entities are visited in span order. All entities sharing one span emit
/// their attribute tokens back to back before the span text. An image block is
/// emitted right after the first span that references it; later mentions of
/// the same image bind to it explicitly. The target image is recorded in
/// `target_ref` and is not placed in the sequence.
pub fn inject(ann: &AnnotationRecord, vocab: &AttributeVocabulary) -> Result<InterleavedSequence, SequenceError> {
    let caption = ann.caption.as_str();
    let patches: HashMap<&str, u32> = ann.images.iter().map(|i| (i.image_id.as_str(), i.patch_count)).collect();

    let mut order: Vec<&Entity> = ann.entities.iter().collect();
    order.sort_by_key(|e| (e.span.start, e.span.end));

    let mut segments = Vec::new();
    let mut emitted: HashSet<&str> = HashSet::new();
    let mut cursor = 0;
    let mut i = 0;
    while i < order.len() {
        let span = order[i].span.clone();
        let mut j = i;
        while j < order.len() && order[j].span == span {
            j += 1;
        }
        let mentions = &order[i..j];

        if span.start > cursor {
            segments.push(Segment::plain(&caption[cursor..span.start]));
        }

        let mut fresh: Vec<&str> = Vec::new();
        for e in mentions {
            let img = e.image_ref.as_str();
            if !emitted.contains(img) && !fresh.contains(&img) {
                fresh.push(img);
            }
        }
        for e in mentions {
            let bind = (fresh.first() != Some(&e.image_ref.as_str())).then(|| e.image_ref.clone());
            segments.push(Segment::Special { attribute: e.attribute.clone(), bind });
        }
        segments.push(Segment::text(&caption[span.clone()]));
        for img in fresh {
            let patch_count = patches.get(img).copied().unwrap_or(0);
            segments.push(Segment::image(img, patch_count));
            emitted.insert(img);
        }

        cursor = span.end;
        i = j;
    }
    if cursor < caption.len() || segments.is_empty() {
        segments.push(Segment::plain(&caption[cursor..]));
    }

    let mut seq = build_sequence(&segments, vocab)?;
    seq.target_ref = ann.target().map(|t| t.image_id.clone());
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InjectionReport {
    pub kept: usize,
    pub discarded: usize,
    pub reasons: BTreeMap<DiscardReason, usize>,
}

impl InjectionReport {
    pub fn total(&self) -> usize {
        self.kept + self.discarded
    }

    fn record_discard(&mut self, reason: DiscardReason) {
        self.discarded += 1;
        *self.reasons.entry(reason).or_default() += 1;
    }
}

impl fmt::Display for InjectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kept={} discarded={}", self.kept, self.discarded)?;
        for (reason, count) in &self.reasons {
            write!(f, " {reason}={count}")?;
        }
        Ok(())
    }
}

/// A kept record after injection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectedRecord {
    /// Zero-based index of the source record in the input stream.
    pub source_index: usize,
    pub task: TaskFamily,
    pub sequence: InterleavedSequence,
}

/// Outcome of one record, in isolation.
pub fn process_record(bytes: &[u8], vocab: &AttributeVocabulary) -> Result<(TaskFamily, InterleavedSequence), DiscardReason> {
    let ann = parse_annotation(bytes).map_err(|_| DiscardReason::ParseError)?;
    match triage(&ann, vocab) {
        Triage::Discard(reason) => Err(reason),
        Triage::Keep => inject(&ann, vocab)
            .map(|seq| (ann.task_family, seq))
            .map_err(|_| DiscardReason::InjectFailed),
    }
}

/// Runs the whole pipeline over a batch of records. Records are processed in
/// parallel; kept outputs stay in input order.
pub fn inject_corpus<I, B>(records: I, vocab: &AttributeVocabulary) -> (Vec<InjectedRecord>, InjectionReport)
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]> + Send + Sync,
{
    let records: Vec<B> = records.into_iter().collect();
    let outcomes: Vec<_> = records.par_iter().map(|r| process_record(r.as_ref(), vocab)).collect();

    let mut kept = Vec::new();
    let mut report = InjectionReport::default();
    for (source_index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((task, sequence)) => {
                report.kept += 1;
                kept.push(InjectedRecord { source_index, task, sequence });
            }
            Err(reason) => report.record_discard(reason),
        }
    }
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{validate, TokenKind};

    fn record(caption: &str, entities: &[(usize, usize, &str, &str)], images: &[(&str, u32, ImageRole)]) -> AnnotationRecord {
        AnnotationRecord {
            caption: caption.to_string(),
            entities: entities
                .iter()
                .map(|&(s, e, a, i)| Entity { span: s..e, attribute: a.into(), image_ref: i.into() })
                .collect(),
            images: images
                .iter()
                .map(|&(id, n, role)| ImageSpec { image_id: id.into(), patch_count: n, role })
                .collect(),
            task_family: TaskFamily::Compositional,
        }
    }

    use ImageRole::{Reference, Target};

    #[test]
    fn triage_keeps_resolved_record() {
        let rec = record("the man and the car", &[(0, 7, "id", "a"), (12, 19, "subject", "b")], &[("a", 1, Reference), ("b", 1, Reference)]);
        assert_eq!(triage(&rec, &AttributeVocabulary::default()), Triage::Keep);
    }

    #[test]
    fn triage_reasons() {
        let v = AttributeVocabulary::default();
        let unknown = record("the glow", &[(0, 8, "aura", "a")], &[("a", 1, Reference)]);
        assert_eq!(triage(&unknown, &v), Triage::Discard(DiscardReason::UnknownAttribute));
        let ambiguous = record("the man", &[(0, 7, "id", "a"), (0, 7, "pose", "b")], &[("a", 1, Reference), ("b", 1, Reference)]);
        assert_eq!(triage(&ambiguous, &v), Triage::Discard(DiscardReason::AmbiguousReference));
        let unreferenced = record("the man", &[(0, 7, "id", "img_1")], &[("img_1", 1, Reference), ("img_3", 1, Reference)]);
        assert_eq!(triage(&unreferenced, &v), Triage::Discard(DiscardReason::UnreferencedImage));
    }

    #[test]
    fn unreferenced_target_is_fine() {
        let rec = record("the man", &[(0, 7, "id", "a")], &[("a", 1, Reference), ("out", 4, Target)]);
        assert_eq!(triage(&rec, &AttributeVocabulary::default()), Triage::Keep);
        let seq = inject(&rec, &AttributeVocabulary::default()).unwrap();
        assert_eq!(seq.target_ref.as_deref(), Some("out"));
        assert!(seq.block("out").is_none());
    }

    #[test]
    fn zero_entities_is_plain_text() {
        let rec = record("a quiet street", &[], &[]);
        let seq = inject(&rec, &AttributeVocabulary::default()).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.kind(0), TokenKind::Plain);
        assert_eq!(seq.group_count, 0);
    }

    #[test]
    fn two_entities_one_image_share_a_group() {
        let caption = "put the dress on the street";
        let rec = record(caption, &[(4, 13, "subject", "img_1"), (17, 27, "background", "img_1")], &[("img_1", 2, Reference)]);
        let v = AttributeVocabulary::default();
        assert_eq!(triage(&rec, &v), Triage::Keep);
        let seq = inject(&rec, &v).unwrap();
        assert!(validate(&seq).is_empty());
        assert_eq!(seq.group_count, 1);
        assert_eq!(seq.image_blocks.len(), 1);
        let specials: Vec<_> = seq.special_positions().collect();
        assert_eq!(specials.len(), 2);
        assert!(specials.iter().all(|&p| seq.group(p) == Some(1)));
    }

    #[test]
    fn same_span_two_attributes() {
        let rec = record("the dress", &[(0, 9, "subject", "a"), (0, 9, "clothing", "a")], &[("a", 1, Reference)]);
        let v = AttributeVocabulary::default();
        let seq = inject(&rec, &v).unwrap();
        let kinds: Vec<_> = seq.entries.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![TokenKind::Special, TokenKind::Special, TokenKind::Text, TokenKind::Image]);
        assert_eq!(seq.group_count, 1);
    }

    #[test]
    fn corpus_counts() {
        let v = AttributeVocabulary::default();
        let good = record("the man", &[(0, 7, "id", "a")], &[("a", 1, Reference)]).to_line();
        let (out, report) = inject_corpus([good.as_bytes(), b"{oops", good.as_bytes()], &v);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].source_index, 2);
        assert_eq!(report.kept, 2);
        assert_eq!(report.discarded, 1);
        assert_eq!(report.reasons.get(&DiscardReason::ParseError), Some(&1));

        let (out, report) = inject_corpus(Vec::<Vec<u8>>::new(), &v);
        assert!(out.is_empty());
        assert_eq!(report, InjectionReport::default());
    }
}
