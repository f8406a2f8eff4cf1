//! Line-delimited sequence records.
//!
//! ```text
//! {"entries":[{"k":"plain","s":"a photo of"},{"k":"special","a":"style","g":1},
//!             {"k":"image","id":"S","g":1,"n":2}],"groups":1,"target":null,"task":"stylization"}
//! ```
//!
//! Image blocks are stored collapsed, one entry per block. Attributes are
//! written by name, so decoding needs the vocabulary the file was written
//! with.

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::inject::TaskFamily;
use crate::sequence::{validate, ImageBlock, InterleavedSequence, TokenEntry, TokenKind};
use crate::vocab::AttributeVocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "k", rename_all = "lowercase", deny_unknown_fields)]
pub enum EntryRecord {
    Text { s: String },
    Plain { s: String },
    Special { a: String, g: u32 },
    Image { id: String, g: u32, n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceRecord {
    pub entries: Vec<EntryRecord>,
    pub groups: u32,
    pub target: Option<String>,
    #[serde(default)]
    pub task: Option<TaskFamily>,
}

impl SequenceRecord {
    /// Fails on sequences that do not pass [`validate`], since their token
    /// fields cannot all be expressed in the collapsed form.
    pub fn from_sequence(seq: &InterleavedSequence, task: Option<TaskFamily>, vocab: &AttributeVocabulary) -> Result<Self, FormatError> {
        let invalid = |message: String| FormatError::InvalidSequence { line: 0, message };
        if let Some(v) = validate(seq).first() {
            return Err(invalid(v.to_string()));
        }
        let mut entries = Vec::new();
        let mut pos = 0;
        while pos < seq.len() {
            let e = &seq.entries[pos];
            let group = e.group.unwrap_or_default();
            match e.kind {
                TokenKind::Text => entries.push(EntryRecord::Text { s: e.text_payload().unwrap_or_default().into() }),
                TokenKind::Plain => entries.push(EntryRecord::Plain { s: e.text_payload().unwrap_or_default().into() }),
                TokenKind::Special => {
                    let a = e
                        .attribute
                        .and_then(|a| vocab.name(a))
                        .ok_or_else(|| invalid(format!("position {pos}: attribute outside the vocabulary")))?;
                    entries.push(EntryRecord::Special { a: a.to_string(), g: group });
                }
                TokenKind::Image => {
                    let block = seq.block_at(pos).expect("validated");
                    entries.push(EntryRecord::Image { id: block.image_id.clone(), g: block.group, n: block.patch_count });
                    pos = block.end();
                    continue;
                }
            }
            pos += 1;
        }
        Ok(Self { entries, groups: seq.group_count, target: seq.target_ref.clone(), task })
    }

    /// Expands the record and checks the result with [`validate`].
    pub fn to_sequence(&self, vocab: &AttributeVocabulary) -> Result<InterleavedSequence, FormatError> {
        let mut entries = Vec::new();
        let mut image_blocks = Vec::new();
        for e in &self.entries {
            match e {
                EntryRecord::Text { s } => entries.push(TokenEntry::text(s.clone())),
                EntryRecord::Plain { s } => entries.push(TokenEntry::plain(s.clone())),
                EntryRecord::Special { a, g } => {
                    let id = vocab
                        .index_of(a)
                        .ok_or_else(|| FormatError::UnknownAttribute { line: 0, name: a.clone() })?;
                    entries.push(TokenEntry::special(id, Some(*g)));
                }
                EntryRecord::Image { id, g, n } => {
                    image_blocks.push(ImageBlock { image_id: id.clone(), group: *g, patch_count: *n, start: entries.len() });
                    entries.extend((0..*n).map(|p| TokenEntry::image(id.clone(), *g, p)));
                }
            }
        }
        let seq = InterleavedSequence { entries, image_blocks, group_count: self.groups, target_ref: self.target.clone() };
        if let Some(v) = validate(&seq).first() {
            return Err(FormatError::InvalidSequence { line: 0, message: v.to_string() });
        }
        Ok(seq)
    }
}

/// One JSON line, no trailing newline.
pub fn serialize_sequence(seq: &InterleavedSequence, task: Option<TaskFamily>, vocab: &AttributeVocabulary) -> Result<String, FormatError> {
    let record = SequenceRecord::from_sequence(seq, task, vocab)?;
    Ok(serde_json::to_string(&record).expect("sequence records always serialize"))
}

pub fn deserialize_sequence(line: &str, vocab: &AttributeVocabulary) -> Result<(InterleavedSequence, Option<TaskFamily>), FormatError> {
    let record: SequenceRecord =
        serde_json::from_str(line).map_err(|e| FormatError::Parse { line: 0, message: e.to_string() })?;
    Ok((record.to_sequence(vocab)?, record.task))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{build_sequence, Segment};

    fn vocab() -> AttributeVocabulary {
        AttributeVocabulary::default()
    }

    #[test]
    fn collapsed_layout() {
        let seq = build_sequence(&[Segment::special("style"), Segment::image("S", 2)], &vocab()).unwrap();
        let line = serialize_sequence(&seq, Some(TaskFamily::Stylization), &vocab()).unwrap();
        assert_eq!(
            line,
            r#"{"entries":[{"k":"special","a":"style","g":1},{"k":"image","id":"S","g":1,"n":2}],"groups":1,"target":null,"task":"stylization"}"#
        );
        let (back, task) = deserialize_sequence(&line, &vocab()).unwrap();
        assert_eq!(back, seq);
        assert_eq!(task, Some(TaskFamily::Stylization));
    }

    #[test]
    fn target_block_round_trips() {
        let seq = build_sequence(&[Segment::plain("x"), Segment::special("id"), Segment::image("A", 1)], &vocab())
            .unwrap()
            .with_target_block(3);
        let line = serialize_sequence(&seq, None, &vocab()).unwrap();
        assert_eq!(deserialize_sequence(&line, &vocab()).unwrap().0, seq);
    }

    #[test]
    fn rejects_bad_records() {
        let v = vocab();
        let unknown = r#"{"entries":[{"k":"special","a":"aura","g":1},{"k":"image","id":"A","g":1,"n":1}],"groups":1,"target":null}"#;
        assert!(matches!(deserialize_sequence(unknown, &v), Err(FormatError::UnknownAttribute { .. })));
        let unused = r#"{"entries":[{"k":"plain","s":"x"}],"groups":2,"target":null}"#;
        assert!(matches!(deserialize_sequence(unused, &v), Err(FormatError::InvalidSequence { .. })));
        let dup = r#"{"entries":[{"k":"image","id":"A","g":1,"n":1},{"k":"image","id":"A","g":1,"n":1}],"groups":1,"target":null}"#;
        assert!(matches!(deserialize_sequence(dup, &v), Err(FormatError::InvalidSequence { .. })));
        assert!(matches!(deserialize_sequence("{", &v), Err(FormatError::Parse { .. })));
    }
}
