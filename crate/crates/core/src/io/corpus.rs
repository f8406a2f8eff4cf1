//! Reading corpora whose lines are annotation records, sequence records, or a
//! mix of both, and summarising them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::SequenceRecord;
use crate::error::FormatError;
use crate::inject::{inject, parse_annotation, triage, DiscardReason, TaskFamily, Triage};
use crate::sequence::{InterleavedSequence, TokenKind};
use crate::vocab::AttributeVocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Annotation,
    Sequence,
}

/// Annotation lines carry `caption`; sequence lines carry `entries`.
pub fn detect_format(line: &str) -> Option<RecordFormat> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    if obj.contains_key("caption") {
        Some(RecordFormat::Annotation)
    } else if obj.contains_key("entries") {
        Some(RecordFormat::Sequence)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedRecord {
    Kept { task: Option<TaskFamily>, sequence: InterleavedSequence },
    /// An annotation record that parsed but did not survive triage/injection.
    Discarded(DiscardReason),
}

/// Decodes one line. `line_no` is 1-based and only used in errors.
pub fn load_record(line: &str, line_no: usize, vocab: &AttributeVocabulary) -> Result<LoadedRecord, FormatError> {
    let parse_err = |message: String| FormatError::Parse { line: line_no, message };
    let with_line = |e: FormatError| match e {
        FormatError::Parse { message, .. } => FormatError::Parse { line: line_no, message },
        FormatError::UnknownAttribute { name, .. } => FormatError::UnknownAttribute { line: line_no, name },
        FormatError::InvalidSequence { message, .. } => FormatError::InvalidSequence { line: line_no, message },
        FormatError::UnknownRecord { .. } => FormatError::UnknownRecord { line: line_no },
    };
    match detect_format(line) {
        Some(RecordFormat::Annotation) => {
            let ann = parse_annotation(line.as_bytes()).map_err(|e| parse_err(e.to_string()))?;
            if let Triage::Discard(reason) = triage(&ann, vocab) {
                return Ok(LoadedRecord::Discarded(reason));
            }
            Ok(match inject(&ann, vocab) {
                Ok(sequence) => LoadedRecord::Kept { task: Some(ann.task_family), sequence },
                Err(_) => LoadedRecord::Discarded(DiscardReason::InjectFailed),
            })
        }
        Some(RecordFormat::Sequence) => {
            let record: SequenceRecord = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
            let sequence = record.to_sequence(vocab).map_err(with_line)?;
            Ok(LoadedRecord::Kept { task: record.task, sequence })
        }
        None => match serde_json::from_str::<serde_json::Value>(line) {
            Err(e) => Err(parse_err(e.to_string())),
            Ok(_) => Err(FormatError::UnknownRecord { line: line_no }),
        },
    }
}

/// Non-blank lines with their 1-based line numbers.
pub fn record_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCount {
    pub name: String,
    pub count: usize,
}

/// Per-corpus counts over kept records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub records: usize,
    pub discarded: usize,
    /// Every family, in canonical order, including zero counts.
    pub families: Vec<NamedCount>,
    /// Kept sequence records that carry no task family.
    pub untagged: usize,
    /// Special-token occurrences per vocabulary entry, including zero counts.
    pub attributes: Vec<NamedCount>,
    /// Reference images per record → number of records.
    pub image_counts: BTreeMap<usize, usize>,
    /// Special tokens per record → number of records.
    pub special_counts: BTreeMap<usize, usize>,
}

impl CorpusStats {
    pub fn empty(vocab: &AttributeVocabulary) -> Self {
        Self {
            records: 0,
            discarded: 0,
            families: TaskFamily::ALL.iter().map(|f| NamedCount { name: f.as_str().into(), count: 0 }).collect(),
            untagged: 0,
            attributes: vocab.entries().map(|(n, _)| NamedCount { name: n.into(), count: 0 }).collect(),
            image_counts: BTreeMap::new(),
            special_counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, record: &LoadedRecord) {
        let (task, seq) = match record {
            LoadedRecord::Discarded(_) => {
                self.discarded += 1;
                return;
            }
            LoadedRecord::Kept { task, sequence } => (task, sequence),
        };
        self.records += 1;
        match task {
            Some(f) => {
                let i = TaskFamily::ALL.iter().position(|x| x == f).expect("listed family");
                self.families[i].count += 1;
            }
            None => self.untagged += 1,
        }
        let mut specials = 0;
        for e in seq.entries.iter().filter(|e| e.kind == TokenKind::Special) {
            specials += 1;
            if let Some(slot) = e.attribute.and_then(|a| self.attributes.get_mut(a.index())) {
                slot.count += 1;
            }
        }
        let images = seq.image_blocks.iter().filter(|b| !b.is_target()).count();
        *self.image_counts.entry(images).or_default() += 1;
        *self.special_counts.entry(specials).or_default() += 1;
    }

    pub fn family_count(&self, family: TaskFamily) -> usize {
        self.families.iter().find(|n| n.name == family.as_str()).map_or(0, |n| n.count)
    }

    pub fn attribute_count(&self, name: &str) -> usize {
        self.attributes.iter().find(|n| n.name == name).map_or(0, |n| n.count)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats always serialize")
    }
}

/// Loads every line of `text`; the first undecodable line aborts.
pub fn corpus_stats(text: &str, vocab: &AttributeVocabulary) -> Result<CorpusStats, FormatError> {
    let mut stats = CorpusStats::empty(vocab);
    for (line_no, line) in record_lines(text) {
        stats.add(&load_record(line, line_no, vocab)?);
    }
    Ok(stats)
}
