//! Interleaved text/special/image token sequences.
//!
//! A sequence is a flat list of [`TokenEntry`] values. Text spans occupy one
//! position each (their content is opaque here), special tokens one position,
//! and each image one position per patch. Special and image tokens carry a
//! group index in `1..=m`; the reserved target block uses group 0.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SequenceError;
use crate::vocab::{AttributeId, AttributeVocabulary};

/// Image id of the target latent block appended by the toy harness.
pub const TARGET_IMAGE_ID: &str = "__target__";

/// Group index of the target block. No special token ever carries it.
pub const TARGET_GROUP: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Special,
    Text,
    Image,
    Plain,
}

impl TokenKind {
    pub fn is_grouped(self) -> bool {
        matches!(self, TokenKind::Special | TokenKind::Image)
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Special => "special",
            TokenKind::Text => "text",
            TokenKind::Image => "image",
            TokenKind::Plain => "plain",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// Span content for `text` and `plain` tokens.
    Text(String),
    /// Patch index within the owning image.
    Patch(u32),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenEntry {
    pub kind: TokenKind,
    pub group: Option<u32>,
    pub image_id: Option<String>,
    pub attribute: Option<AttributeId>,
    pub payload: Payload,
}

impl TokenEntry {
    pub fn text(span: impl Into<String>) -> Self {
        Self::span(TokenKind::Text, span)
    }

    pub fn plain(span: impl Into<String>) -> Self {
        Self::span(TokenKind::Plain, span)
    }

    fn span(kind: TokenKind, span: impl Into<String>) -> Self {
        Self {
            kind,
            group: None,
            image_id: None,
            attribute: None,
            payload: Payload::Text(span.into()),
        }
    }

    pub fn special(attribute: AttributeId, group: Option<u32>) -> Self {
        Self {
            kind: TokenKind::Special,
            group,
            image_id: None,
            attribute: Some(attribute),
            payload: Payload::None,
        }
    }

    pub fn image(image_id: impl Into<String>, group: u32, patch: u32) -> Self {
        Self {
            kind: TokenKind::Image,
            group: Some(group),
            image_id: Some(image_id.into()),
            attribute: None,
            payload: Payload::Patch(patch),
        }
    }

    pub fn text_payload(&self) -> Option<&str> {
        match &self.payload {
            Payload::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBlock {
    pub image_id: String,
    pub group: u32,
    pub patch_count: u32,
    pub start: usize,
}

impl ImageBlock {
    pub fn end(&self) -> usize {
        self.start + self.patch_count as usize
    }

    pub fn positions(&self) -> std::ops::Range<usize> {
        self.start..self.end()
    }

    pub fn is_target(&self) -> bool {
        self.image_id == TARGET_IMAGE_ID
    }
}

/// The typed token sequence. Build it with [`build_sequence`]; hand-assembled
/// values should be checked with [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedSequence {
    pub entries: Vec<TokenEntry>,
    /// Sorted by `start`.
    pub image_blocks: Vec<ImageBlock>,
    pub group_count: u32,
    pub target_ref: Option<String>,
}

impl InterleavedSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kind(&self, pos: usize) -> TokenKind {
        self.entries[pos].kind
    }

    pub fn group(&self, pos: usize) -> Option<u32> {
        self.entries[pos].group
    }

    pub fn image_id(&self, pos: usize) -> Option<&str> {
        self.entries[pos].image_id.as_deref()
    }

    /// Block containing `pos`, if `pos` is an image patch.
    pub fn block_at(&self, pos: usize) -> Option<&ImageBlock> {
        let idx = self.image_blocks.partition_point(|b| b.start <= pos);
        idx.checked_sub(1)
            .map(|i| &self.image_blocks[i])
            .filter(|b| pos < b.end())
    }

    pub fn block(&self, image_id: &str) -> Option<&ImageBlock> {
        self.image_blocks.iter().find(|b| b.image_id == image_id)
    }

    pub fn special_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == TokenKind::Special)
            .map(|(i, _)| i)
    }

    pub fn target_block(&self) -> Option<&ImageBlock> {
        self.image_blocks.iter().find(|b| b.is_target())
    }

    /// Attributes of the special tokens in `group`, in sequence order.
    pub fn group_attributes(&self, group: u32) -> Vec<AttributeId> {
        self.entries
            .iter()
            .filter(|e| e.kind == TokenKind::Special && e.group == Some(group))
            .filter_map(|e| e.attribute)
            .collect()
    }

    /// Returns a copy with a group-0 target block of `patch_count` patches
    /// appended at the end.
    pub fn with_target_block(&self, patch_count: u32) -> InterleavedSequence {
        let mut out = self.clone();
        let start = out.entries.len();
        for p in 0..patch_count {
            out.entries.push(TokenEntry::image(TARGET_IMAGE_ID, TARGET_GROUP, p));
        }
        out.image_blocks.push(ImageBlock {
            image_id: TARGET_IMAGE_ID.to_string(),
            group: TARGET_GROUP,
            patch_count,
            start,
        });
        out
    }

    /// Decomposes the sequence back into builder segments.
    ///
    /// A special token gets an explicit `bind` only when the implicit rule
    /// (bind to the next image block) would pick a different group, so the
    /// output is the canonical segment list for this sequence.
    pub fn to_segments(&self, vocab: &AttributeVocabulary) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < self.entries.len() {
            let entry = &self.entries[pos];
            match entry.kind {
                TokenKind::Text | TokenKind::Plain => {
                    let text = entry.text_payload().unwrap_or_default().to_string();
                    out.push(Segment::Text {
                        kind: if entry.kind == TokenKind::Text { TextKind::Text } else { TextKind::Plain },
                        text,
                    });
                    pos += 1;
                }
                TokenKind::Special => {
                    let attribute = entry
                        .attribute
                        .and_then(|a| vocab.name(a))
                        .unwrap_or_default()
                        .to_string();
                    let next = self.image_blocks.iter().find(|b| b.start > pos);
                    let bind = match (entry.group, next) {
                        (Some(g), Some(b)) if b.group == g => None,
                        (Some(g), _) => self
                            .image_blocks
                            .iter()
                            .find(|b| b.group == g)
                            .map(|b| b.image_id.clone()),
                        (None, _) => None,
                    };
                    out.push(Segment::Special { attribute, bind });
                    pos += 1;
                }
                TokenKind::Image => match self.block_at(pos) {
                    Some(block) => {
                        out.push(Segment::Image {
                            image_id: block.image_id.clone(),
                            patch_count: block.patch_count,
                        });
                        pos = block.end().max(pos + 1);
                    }
                    None => pos += 1,
                },
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextKind {
    /// Instruction span bound near a group.
    Text,
    /// Connective prose.
    Plain,
}

/// One builder input item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text { kind: TextKind, text: String },
    /// `bind` names the image this token belongs to; `None` binds it to the
    /// next image block in the sequence.
    Special { attribute: String, bind: Option<String> },
    Image { image_id: String, patch_count: u32 },
}

impl Segment {
    pub fn text(text: impl Into<String>) -> Self {
        Segment::Text { kind: TextKind::Text, text: text.into() }
    }

    pub fn plain(text: impl Into<String>) -> Self {
        Segment::Text { kind: TextKind::Plain, text: text.into() }
    }

    pub fn special(attribute: impl Into<String>) -> Self {
        Segment::Special { attribute: attribute.into(), bind: None }
    }

    pub fn special_bound(attribute: impl Into<String>, image_id: impl Into<String>) -> Self {
        Segment::Special { attribute: attribute.into(), bind: Some(image_id.into()) }
    }

    pub fn image(image_id: impl Into<String>, patch_count: u32) -> Self {
        Segment::Image { image_id: image_id.into(), patch_count }
    }
}

/// Assembles segments in the given order and assigns groups.
pub fn build_sequence(segments: &[Segment], vocab: &AttributeVocabulary) -> Result<InterleavedSequence, SequenceError> {
    if segments.is_empty() {
        return Err(SequenceError::EmptySegments);
    }

    // Provisional group label of each image is its block ordinal + 1.
    let mut image_labels: HashMap<&str, u32> = HashMap::new();
    for seg in segments {
        if let Segment::Image { image_id, patch_count } = seg {
            if image_id == TARGET_IMAGE_ID {
                return Err(SequenceError::ReservedImageId(image_id.clone()));
            }
            if *patch_count == 0 {
                return Err(SequenceError::ZeroPatchCount(image_id.clone()));
            }
            let label = image_labels.len() as u32 + 1;
            if image_labels.insert(image_id.as_str(), label).is_some() {
                return Err(SequenceError::DuplicateImageId(image_id.clone()));
            }
        }
    }

    let mut entries = Vec::new();
    let mut image_blocks = Vec::new();
    for seg in segments {
        match seg {
            Segment::Text { kind: TextKind::Text, text } => entries.push(TokenEntry::text(text.clone())),
            Segment::Text { kind: TextKind::Plain, text } => entries.push(TokenEntry::plain(text.clone())),
            Segment::Special { attribute, bind } => {
                let id = vocab
                    .index_of(attribute)
                    .ok_or_else(|| SequenceError::UnknownAttribute(attribute.clone()))?;
                let group = match bind {
                    Some(image) => Some(
                        *image_labels
                            .get(image.as_str())
                            .ok_or_else(|| SequenceError::UnknownBinding(image.clone()))?,
                    ),
                    None => None,
                };
                entries.push(TokenEntry::special(id, group));
            }
            Segment::Image { image_id, patch_count } => {
                let label = image_labels[image_id.as_str()];
                image_blocks.push(ImageBlock {
                    image_id: image_id.clone(),
                    group: label,
                    patch_count: *patch_count,
                    start: entries.len(),
                });
                for p in 0..*patch_count {
                    entries.push(TokenEntry::image(image_id.clone(), label, p));
                }
            }
        }
    }

    assign_groups(InterleavedSequence {
        entries,
        image_blocks,
        group_count: 0,
        target_ref: None,
    })
}

/// Resolves missing group indices and renumbers groups `1..=m` by first
/// appearance.
///
/// Each image block's group is authoritative for its patches. A special token
/// without a group joins the next image block after it; any group it already
/// has is kept as a label and renumbered with the rest. Group 0 is left
/// untouched.
pub fn assign_groups(mut seq: InterleavedSequence) -> Result<InterleavedSequence, SequenceError> {
    seq.image_blocks.sort_by_key(|b| b.start);
    for block in &seq.image_blocks {
        for pos in block.positions() {
            if let Some(entry) = seq.entries.get_mut(pos) {
                entry.group = Some(block.group);
            }
        }
    }

    let mut next_block = seq.image_blocks.len();
    let mut following = vec![None; seq.entries.len()];
    for pos in (0..seq.entries.len()).rev() {
        while next_block > 0 && seq.image_blocks[next_block - 1].start > pos {
            next_block -= 1;
        }
        following[pos] = seq.image_blocks.get(next_block).map(|b| b.group);
    }
    for (pos, entry) in seq.entries.iter_mut().enumerate() {
        if entry.kind == TokenKind::Special && entry.group.is_none() {
            let group = following[pos].ok_or(SequenceError::DanglingSpecialToken(pos))?;
            entry.group = Some(group);
        }
    }

    let mut renumber: BTreeMap<u32, u32> = BTreeMap::new();
    for entry in &seq.entries {
        if !entry.kind.is_grouped() {
            continue;
        }
        if let Some(label) = entry.group {
            if label != TARGET_GROUP && !renumber.contains_key(&label) {
                let next = renumber.len() as u32 + 1;
                renumber.insert(label, next);
            }
        }
    }
    let map = |g: u32| if g == TARGET_GROUP { g } else { renumber.get(&g).copied().unwrap_or(g) };
    for entry in &mut seq.entries {
        if entry.kind.is_grouped() {
            entry.group = entry.group.map(map);
        }
    }
    for block in &mut seq.image_blocks {
        block.group = map(block.group);
    }
    seq.group_count = renumber.len() as u32;
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// A field is present or absent contrary to the token kind.
    FieldPresence(&'static str),
    GroupOutOfRange(u32),
    /// Image token not covered by any block, or covered by more than one.
    BlockCoverage(usize),
    /// Token inside a block disagrees with the block (id, group or patch index).
    BlockMismatch(&'static str),
    BlockOutOfBounds,
    EmptyBlock,
    DuplicateImageId(String),
    TargetGroup,
    UnusedGroup(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// `None` for sequence-level violations (e.g. an unused group).
    pub position: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some(p) => write!(f, "position {p}: {:?}", self.kind),
            None => write!(f, "sequence: {:?}", self.kind),
        }
    }
}

/// Lists every violated structural invariant. Empty means well-formed.
pub fn validate(seq: &InterleavedSequence) -> Vec<Violation> {
    let mut out = Vec::new();
    let at = |p: usize, kind| Violation { position: Some(p), kind };
    let m = seq.group_count;

    for (pos, e) in seq.entries.iter().enumerate() {
        if e.group.is_some() != e.kind.is_grouped() {
            out.push(at(pos, ViolationKind::FieldPresence("group")));
        }
        if e.attribute.is_some() != (e.kind == TokenKind::Special) {
            out.push(at(pos, ViolationKind::FieldPresence("attribute")));
        }
        if e.image_id.is_some() != (e.kind == TokenKind::Image) {
            out.push(at(pos, ViolationKind::FieldPresence("image_id")));
        }
        let payload_ok = match e.kind {
            TokenKind::Text | TokenKind::Plain => matches!(e.payload, Payload::Text(_)),
            TokenKind::Image => matches!(e.payload, Payload::Patch(_)),
            TokenKind::Special => matches!(e.payload, Payload::None),
        };
        if !payload_ok {
            out.push(at(pos, ViolationKind::FieldPresence("payload")));
        }
        if let (true, Some(g)) = (e.kind.is_grouped(), e.group) {
            let is_target = e.kind == TokenKind::Image && e.image_id.as_deref() == Some(TARGET_IMAGE_ID);
            if is_target {
                if g != TARGET_GROUP {
                    out.push(at(pos, ViolationKind::TargetGroup));
                }
            } else if g == TARGET_GROUP || g > m {
                out.push(at(pos, ViolationKind::GroupOutOfRange(g)));
            }
        }
    }

    let mut coverage = vec![0usize; seq.entries.len()];
    let mut seen_ids = HashSet::new();
    for block in &seq.image_blocks {
        if !seen_ids.insert(block.image_id.as_str()) {
            out.push(Violation {
                position: Some(block.start),
                kind: ViolationKind::DuplicateImageId(block.image_id.clone()),
            });
        }
        if block.patch_count == 0 {
            out.push(at(block.start, ViolationKind::EmptyBlock));
            continue;
        }
        if block.end() > seq.entries.len() {
            out.push(at(block.start, ViolationKind::BlockOutOfBounds));
            continue;
        }
        for (offset, pos) in block.positions().enumerate() {
            coverage[pos] += 1;
            let e = &seq.entries[pos];
            if e.kind != TokenKind::Image {
                out.push(at(pos, ViolationKind::BlockMismatch("kind")));
                continue;
            }
            if e.image_id.as_deref() != Some(block.image_id.as_str()) {
                out.push(at(pos, ViolationKind::BlockMismatch("image_id")));
            }
            if e.group != Some(block.group) {
                out.push(at(pos, ViolationKind::BlockMismatch("group")));
            }
            if e.payload != Payload::Patch(offset as u32) {
                out.push(at(pos, ViolationKind::BlockMismatch("patch")));
            }
        }
    }
    for (pos, e) in seq.entries.iter().enumerate() {
        let expected = usize::from(e.kind == TokenKind::Image);
        if e.kind == TokenKind::Image && coverage[pos] != expected {
            out.push(at(pos, ViolationKind::BlockCoverage(coverage[pos])));
        }
    }

    let used: HashSet<u32> = seq
        .entries
        .iter()
        .filter(|e| e.kind.is_grouped())
        .filter_map(|e| e.group)
        .collect();
    for g in 1..=m {
        if !used.contains(&g) {
            out.push(Violation { position: None, kind: ViolationKind::UnusedGroup(g) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> AttributeVocabulary {
        AttributeVocabulary::default()
    }

    #[test]
    fn text_only_has_no_groups() {
        let seq = build_sequence(&[Segment::plain("a photo of")], &vocab()).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.group_count, 0);
        assert!(validate(&seq).is_empty());
    }

    #[test]
    fn special_then_image() {
        let seq = build_sequence(&[Segment::special("style"), Segment::image("S", 2)], &vocab()).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.group_count, 1);
        assert_eq!(seq.image_blocks.len(), 1);
        assert_eq!(seq.image_blocks[0].start, 1);
        assert_eq!(seq.group(0), Some(1));
        assert!(validate(&seq).is_empty());
    }

    #[test]
    fn two_groups_in_order() {
        let segs = [
            Segment::plain("put"),
            Segment::special("id"),
            Segment::image("A", 2),
            Segment::text("in the style of"),
            Segment::special("style"),
            Segment::image("B", 2),
        ];
        let seq = build_sequence(&segs, &vocab()).unwrap();
        assert_eq!(seq.group_count, 2);
        assert_eq!(seq.group(1), Some(1));
        assert_eq!(seq.block("A").unwrap().group, 1);
        assert_eq!(seq.group(5), Some(2));
        assert_eq!(seq.block("B").unwrap().group, 2);
        assert!(validate(&seq).is_empty());
    }

    #[test]
    fn consecutive_specials_share_the_next_image() {
        let segs = [Segment::special("subject"), Segment::special("clothing"), Segment::image("A", 1)];
        let seq = build_sequence(&segs, &vocab()).unwrap();
        assert_eq!(seq.group_count, 1);
        assert!(seq.entries.iter().all(|e| e.group == Some(1)));
    }

    #[test]
    fn dangling_special() {
        let err = build_sequence(&[Segment::special("style")], &vocab()).unwrap_err();
        assert_eq!(err, SequenceError::DanglingSpecialToken(0));
    }

    #[test]
    fn builder_errors() {
        let v = vocab();
        assert_eq!(build_sequence(&[], &v).unwrap_err(), SequenceError::EmptySegments);
        assert_eq!(
            build_sequence(&[Segment::special("aura"), Segment::image("A", 1)], &v).unwrap_err(),
            SequenceError::UnknownAttribute("aura".into())
        );
        assert_eq!(
            build_sequence(&[Segment::image("A", 1), Segment::image("A", 2)], &v).unwrap_err(),
            SequenceError::DuplicateImageId("A".into())
        );
        assert_eq!(
            build_sequence(&[Segment::image("A", 0)], &v).unwrap_err(),
            SequenceError::ZeroPatchCount("A".into())
        );
        assert_eq!(
            build_sequence(&[Segment::special_bound("style", "Z"), Segment::image("A", 1)], &v).unwrap_err(),
            SequenceError::UnknownBinding("Z".into())
        );
    }

    #[test]
    fn explicit_binding_to_an_earlier_image() {
        let segs = [
            Segment::special("subject"),
            Segment::image("A", 1),
            Segment::special("style"),
            Segment::image("B", 1),
            Segment::special_bound("background", "A"),
        ];
        let seq = build_sequence(&segs, &vocab()).unwrap();
        assert_eq!(seq.group(4), Some(1));
        assert!(validate(&seq).is_empty());
        assert_eq!(seq.to_segments(&vocab()), segs);
    }

    #[test]
    fn renumbering_follows_first_appearance() {
        // Hand-built labels 7 and 3, with 7 appearing first.
        let v = vocab();
        let style = v.index_of("style").unwrap();
        let seq = InterleavedSequence {
            entries: vec![
                TokenEntry::special(style, Some(7)),
                TokenEntry::image("A", 3, 0),
                TokenEntry::special(style, None),
                TokenEntry::image("B", 7, 0),
            ],
            image_blocks: vec![
                ImageBlock { image_id: "A".into(), group: 3, patch_count: 1, start: 1 },
                ImageBlock { image_id: "B".into(), group: 7, patch_count: 1, start: 3 },
            ],
            group_count: 0,
            target_ref: None,
        };
        let out = assign_groups(seq).unwrap();
        let groups: Vec<_> = out.entries.iter().map(|e| e.group.unwrap()).collect();
        assert_eq!(groups, vec![1, 2, 1, 1]);
        assert_eq!(out.group_count, 2);
        assert!(validate(&out).is_empty());
        assert_eq!(assign_groups(out.clone()).unwrap(), out);
    }

    #[test]
    fn validate_flags_block_group_mismatch() {
        let segs = [Segment::special("id"), Segment::image("A", 2), Segment::special("style"), Segment::image("B", 2)];
        let mut seq = build_sequence(&segs, &vocab()).unwrap();
        seq.entries[2].group = Some(2);
        let report = validate(&seq);
        assert_eq!(report.len(), 1, "{report:?}");
        assert_eq!(report[0].position, Some(2));
        assert_eq!(report[0].kind, ViolationKind::BlockMismatch("group"));
    }

    #[test]
    fn validate_flags_special_with_image_id() {
        let segs = [Segment::special("id"), Segment::image("A", 2)];
        let mut seq = build_sequence(&segs, &vocab()).unwrap();
        seq.entries[0].image_id = Some("A".into());
        let report = validate(&seq);
        assert_eq!(report, vec![Violation { position: Some(0), kind: ViolationKind::FieldPresence("image_id") }]);
    }

    #[test]
    fn validate_flags_unused_group_and_uncovered_image() {
        let mut seq = build_sequence(&[Segment::special("id"), Segment::image("A", 1)], &vocab()).unwrap();
        seq.group_count = 2;
        seq.entries.push(TokenEntry::image("B", 2, 0));
        let kinds: Vec<_> = validate(&seq).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::BlockCoverage(0)));
        assert!(!kinds.contains(&ViolationKind::UnusedGroup(2)));
        seq.entries.pop();
        let kinds: Vec<_> = validate(&seq).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::UnusedGroup(2)]);
    }

    #[test]
    fn target_block_is_group_zero() {
        let seq = build_sequence(&[Segment::special("id"), Segment::image("A", 2)], &vocab()).unwrap();
        let with_target = seq.with_target_block(3);
        assert_eq!(with_target.len(), 6);
        assert_eq!(with_target.target_block().unwrap().start, 3);
        assert_eq!(with_target.group(4), Some(TARGET_GROUP));
        assert_eq!(with_target.group_count, 1);
        assert!(validate(&with_target).is_empty());
        assert_eq!(
            build_sequence(&[Segment::image(TARGET_IMAGE_ID, 1)], &vocab()).unwrap_err(),
            SequenceError::ReservedImageId(TARGET_IMAGE_ID.into())
        );
    }

    #[test]
    fn block_lookup() {
        let segs = [Segment::plain("x"), Segment::image("A", 2), Segment::plain("y"), Segment::image("B", 3)];
        let seq = build_sequence(&segs, &vocab()).unwrap();
        assert!(seq.block_at(0).is_none());
        assert_eq!(seq.block_at(2).unwrap().image_id, "A");
        assert!(seq.block_at(3).is_none());
        assert_eq!(seq.block_at(6).unwrap().image_id, "B");
    }
}
